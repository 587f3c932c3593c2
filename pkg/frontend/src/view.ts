/** DOM rendering: primary face prominent, reference thumbnails, cue steppers. */

import type { RatingApi } from "./api.js";
import type { SessionController } from "./controller.js";
import { setCue, stepCue, submitEnabled, type RatingFormState } from "./state.js";
import { CUE_LABELS, CUE_NAMES, RATING_MAX, RATING_MIN, type CueName } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Image with a placeholder + retry control on load failure. */
function imageWithRetry(doc: Document, src: string, className: string): HTMLElement {
  const wrap = el(doc, "div", `${className}-wrap`);
  const img = el(doc, "img", className) as HTMLImageElement;
  img.src = src;
  img.onerror = () => {
    img.style.display = "none";
    if (wrap.querySelector(".image-retry")) return;
    const placeholder = el(doc, "div", "image-placeholder", "image unavailable");
    const retry = el(doc, "button", "image-retry", "retry");
    retry.onclick = () => {
      placeholder.remove();
      retry.remove();
      img.style.display = "";
      img.src = ""; // force a reload
      img.src = src;
    };
    wrap.append(placeholder, retry);
  };
  wrap.appendChild(img);
  return wrap;
}

export function renderFaceView(
  root: HTMLElement,
  state: RatingFormState,
  controller: SessionController,
  api: RatingApi,
): void {
  const doc = root.ownerDocument;
  root.textContent = "";

  root.appendChild(
    el(doc, "div", "progress", `${state.progress.cursor} / ${state.progress.total}`),
  );

  if (state.complete) {
    const done = el(doc, "div", "complete-screen");
    done.appendChild(el(doc, "h2", undefined, "Session complete"));
    done.appendChild(
      el(
        doc,
        "p",
        undefined,
        `All faces rated (${state.progress.total}/${state.progress.total}). Thank you.`,
      ),
    );
    root.appendChild(done);
    return;
  }

  const bundle = state.bundle;
  if (!bundle) {
    root.appendChild(el(doc, "p", "loading", "Loading next face..."));
    return;
  }

  if (bundle.insufficient_references) {
    root.appendChild(
      el(
        doc,
        "div",
        "warning-banner",
        "Fewer than four reference images are available for this face.",
      ),
    );
  }

  const faces = el(doc, "div", "faces");
  faces.appendChild(imageWithRetry(doc, api.imageUrl(bundle.primary), "primary-image"));
  const refs = el(doc, "div", "references");
  for (const ref of bundle.references) {
    refs.appendChild(imageWithRetry(doc, api.imageUrl(ref), "reference-thumb"));
  }
  faces.appendChild(refs);
  root.appendChild(faces);

  const rerender = () => renderFaceView(root, state, controller, api);

  const form = el(doc, "div", "cue-form");
  for (const cue of CUE_NAMES) {
    form.appendChild(cueRow(doc, cue, state, rerender));
  }
  root.appendChild(form);

  const statusLine = el(doc, "div", "status-line");
  if (state.status.kind === "cue-error") {
    statusLine.textContent = `${CUE_LABELS[state.status.cue as CueName] ?? state.status.cue}: ${state.status.reason}`;
    statusLine.classList.add("error");
  } else if (state.status.kind === "network-error") {
    statusLine.textContent = `Network problem: ${state.status.reason} — your ratings are kept. `;
    statusLine.classList.add("error");
    const retry = el(doc, "button", "retry-submit", "Retry");
    retry.onclick = () => void controller.retry();
    statusLine.appendChild(retry);
  } else if (state.status.kind === "session-error") {
    statusLine.textContent = state.status.reason;
    statusLine.classList.add("error");
  }
  root.appendChild(statusLine);

  const submit = el(doc, "button", "submit-button", "Submit ratings") as HTMLButtonElement;
  submit.disabled = !submitEnabled(state);
  submit.onclick = () => void controller.submit();
  root.appendChild(submit);
}

function cueRow(
  doc: Document,
  cue: CueName,
  state: RatingFormState,
  rerender: () => void,
): HTMLElement {
  const row = el(doc, "div", "cue-row");
  row.dataset.cue = cue;
  if (state.status.kind === "cue-error" && state.status.cue === cue) {
    row.classList.add("highlight");
  }
  row.appendChild(el(doc, "span", "cue-label", CUE_LABELS[cue]));

  const current = state.cues[cue];

  const stepper = el(doc, "div", "stepper");
  const minus = el(doc, "button", "step-minus", "−") as HTMLButtonElement;
  minus.disabled = current === undefined || current <= RATING_MIN;
  minus.onclick = () => {
    stepCue(state, cue, -1);
    rerender();
  };
  const display = el(doc, "span", "cue-value", current === undefined ? "–" : String(current));
  const plus = el(doc, "button", "step-plus", "+") as HTMLButtonElement;
  plus.disabled = current !== undefined && current >= RATING_MAX;
  plus.onclick = () => {
    // First tap selects 0; later taps increment.
    if (state.cues[cue] === undefined) {
      setCue(state, cue, RATING_MIN);
    } else {
      stepCue(state, cue, +1);
    }
    rerender();
  };
  stepper.append(minus, display, plus);
  row.appendChild(stepper);

  const scale = el(doc, "div", "scale-buttons");
  for (let v = RATING_MIN; v <= RATING_MAX; v++) {
    const btn = el(doc, "button", "scale-button", String(v)) as HTMLButtonElement;
    if (current === v) btn.classList.add("selected");
    btn.onclick = () => {
      setCue(state, cue, v);
      rerender();
    };
    scale.appendChild(btn);
  }
  row.appendChild(scale);
  return row;
}
