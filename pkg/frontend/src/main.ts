/** Browser bootstrap: config form, then the rating loop for one session. */

import { RatingApi } from "./api.js";
import { SessionController } from "./controller.js";
import { renderFaceView } from "./view.js";

function params(): URLSearchParams {
  return new URLSearchParams(window.location.search);
}

export function boot(root: HTMLElement): void {
  const doc = root.ownerDocument;
  const serverUrl =
    params().get("server") ?? window.localStorage.getItem("fatiguescope.server") ?? "";
  const api = new RatingApi(serverUrl || window.location.origin);

  const form = doc.createElement("form");
  form.className = "start-form";
  form.innerHTML = `
    <label>Rater id <input name="rater" required placeholder="your id"></label>
    <label>Seed <input name="seed" type="number" value="0" required></label>
    <button type="submit">Start / resume session</button>
  `;
  root.appendChild(form);

  form.onsubmit = (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const raterId = String(data.get("rater") ?? "").trim();
    const seed = Number(data.get("seed") ?? 0);
    if (!raterId) return;
    window.localStorage.setItem("fatiguescope.server", serverUrl);
    const controller = new SessionController(api, window.localStorage, (state) =>
      renderFaceView(root, state, controller, api),
    );
    controller.start(raterId, seed).catch((err) => {
      root.textContent = "";
      const msg = doc.createElement("div");
      msg.className = "status-line error";
      msg.textContent = err instanceof Error ? err.message : String(err);
      root.appendChild(msg);
    });
  };
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) boot(root);
}
