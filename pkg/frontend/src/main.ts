/** Browser entry point: wires the view model to a minimal DOM.
 *
 * Expects the engine's HTTP API on the same origin (or ?api=<base-url>)
 * and an existing session id in ?session=<id>; with neither, it creates
 * a fresh human session.
 */

import { ApiClient } from "./api.js";
import { ConstraintError, SessionViewModel } from "./model.js";
import { historyRows, trajectoryCaption, trajectoryPath } from "./render.js";

const BOX = { width: 220, height: 160 };

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  text?: string,
  cls?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (text !== undefined) node.textContent = text;
  if (cls !== undefined) node.className = cls;
  return node;
}

function renderGallery(root: HTMLElement, vm: SessionViewModel, onChange: () => void): void {
  const selection = vm.view.selection;
  root.replaceChildren();
  if (!selection) return;
  selection.query.candidates.forEach((traj, i) => {
    const card = el("div", undefined, "card");
    const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    svg.setAttribute("viewBox", `0 0 ${BOX.width} ${BOX.height}`);
    const path = document.createElementNS("http://www.w3.org/2000/svg", "path");
    path.setAttribute("d", trajectoryPath(traj, BOX));
    path.setAttribute("fill", "none");
    path.setAttribute("stroke", selection.isDropped(i) ? "#c33" : "#333");
    svg.appendChild(path);
    card.appendChild(svg);
    card.appendChild(el("p", trajectoryCaption(traj, i)));
    card.classList.toggle("dropped", selection.isDropped(i));
    card.addEventListener("click", () => {
      try {
        selection.toggle(i);
      } catch (err) {
        if (!(err instanceof ConstraintError)) throw err;
      }
      onChange();
    });
    root.appendChild(card);
  });
}

function renderStatus(root: HTMLElement, vm: SessionViewModel): void {
  const v = vm.view;
  root.replaceChildren();
  root.appendChild(el("p", `episode ${v.episode} — ${v.phase}` +
    (v.selection ? ` (${v.selection.remainingDrops} drops left)` : "")));
  if (v.error) root.appendChild(el("p", v.error, "error"));
  for (const row of historyRows(v.history)) {
    root.appendChild(el("p",
      `ep ${row.episode}: drop ${row.dropFraction}, mean target cost ${row.meanTargetCost}`));
  }
}

async function main(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const client = new ApiClient(params.get("api") ?? "");
  const sessionId = params.get("session") ??
    (await client.createSession({ oracle: "human" }));
  const vm = new SessionViewModel(client, sessionId);

  const status = document.getElementById("status") as HTMLElement;
  const gallery = document.getElementById("gallery") as HTMLElement;
  const submit = document.getElementById("submit") as HTMLButtonElement;

  const redraw = () => {
    renderStatus(status, vm);
    renderGallery(gallery, vm, redraw);
    submit.disabled = vm.view.phase !== "selecting";
  };

  submit.addEventListener("click", async () => {
    try {
      await vm.submit();
    } catch (err) {
      if (err instanceof ConstraintError) {
        status.appendChild(el("p", err.message, "error"));
        return;
      }
      throw err;
    }
    redraw();
  });

  for (;;) {
    await vm.refresh();
    redraw();
    if (vm.view.phase === "stopped" || vm.view.phase === "failed") return;
    if (vm.view.phase === "selecting") {
      // wait for the user; submit handler advances the session
      await new Promise((r) => setTimeout(r, 1000));
    } else {
      await new Promise((r) => setTimeout(r, 500));
    }
  }
}

main().catch((err) => {
  document.body.appendChild(el("pre", String(err), "error"));
});
