"""fatiguescope: facial-cue fatigue rate prediction and cohort analytics."""

__version__ = "0.1.0"
