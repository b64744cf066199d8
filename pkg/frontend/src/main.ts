import { ApiClient } from "./api.js";
import { Panel } from "./panel.js";
import { LICENSE_LABELS } from "./types.js";

function serverBaseUrl(): string {
  const param = new URLSearchParams(window.location.search).get("server");
  return param ?? window.location.origin;
}

export function panelSkeleton(): string {
  const options = LICENSE_LABELS.map(
    (label) => `<option value="${label}">${label.replace(/-/g, " ")}</option>`,
  ).join("");
  return `
    <div class="toolbar">
      <button class="refresh-button" title="hunt with the active collage">&#x21bb; refresh</button>
      <input class="keyword-box" type="text" placeholder="add keywords to the hunt">
      <select class="license-select">${options}</select>
      <button class="keyword-hunt-button">keyword hunt</button>
      <button class="export-button">export</button>
    </div>
    <div class="notice-area"></div>
    <div class="doc-tabs"></div>
    <div class="workspace">
      <div class="canvas-area"></div>
      <div class="edit-tools">
        <button data-action="cut">cut</button>
        <button data-action="paste">paste</button>
        <button data-action="mirror-h">mirror &#x2194;</button>
        <button data-action="mirror-v">mirror &#x2195;</button>
        <button data-action="rotate">rotate 90&deg;</button>
        <button data-action="grow">scale &times;1.25</button>
        <button data-action="shrink">scale &times;0.8</button>
        <label>opacity
          <input class="opacity-slider" type="range" min="0" max="100" value="100">
        </label>
        <button data-action="background">use as background</button>
        <button data-action="style-selected">style from active</button>
        <select class="style-select">
          <option value="ember">ember</option>
          <option value="glacier">glacier</option>
          <option value="noir">noir</option>
        </select>
        <button data-action="style-existing">apply style</button>
        <button data-action="undo-style">undo style</button>
      </div>
    </div>
    <div class="results-area"></div>
    <div class="credits-area"></div>
  `;
}

export function boot(root: HTMLElement, panel: Panel): void {
  root.innerHTML = panelSkeleton();
  panel.mount(root);

  const action = (name: string): Element | null =>
    root.querySelector(`[data-action="${name}"]`);

  root.querySelector(".keyword-hunt-button")?.addEventListener("click", () => {
    void panel.huntKeywords();
  });
  root.querySelector(".export-button")?.addEventListener("click", () => {
    void panel.exportCollage().then((url) => {
      if (url) panel.state.notice = `exported: ${url}`;
      panel.render();
    });
  });
  action("cut")?.addEventListener("click", () => void panel.cutSelection());
  action("paste")?.addEventListener("click", () => void panel.pasteStaged());
  action("mirror-h")?.addEventListener("click", () => void panel.mirrorStaged(true));
  action("mirror-v")?.addEventListener("click", () => void panel.mirrorStaged(false));
  action("rotate")?.addEventListener("click", () => void panel.rotateStaged(90));
  action("grow")?.addEventListener("click", () => void panel.scaleStaged(1.25));
  action("shrink")?.addEventListener("click", () => void panel.scaleStaged(0.8));
  action("background")?.addEventListener("click", () => void panel.setBackgroundFromActive());
  action("style-selected")?.addEventListener("click", () => void panel.applySelectedStyle());
  action("style-existing")?.addEventListener("click", () => {
    const select = root.querySelector<HTMLSelectElement>(".style-select");
    if (select) void panel.applyExistingStyle(select.value);
  });
  action("undo-style")?.addEventListener("click", () => void panel.undoStyle());

  const slider = root.querySelector<HTMLInputElement>(".opacity-slider");
  slider?.addEventListener("change", () => {
    void panel.setStagedOpacity(Number(slider.value) / 100);
  });

  attachSelectionHandlers(root, panel);
}

/** Drag a rectangle over the canvas image to select a cut region. */
function attachSelectionHandlers(root: HTMLElement, panel: Panel): void {
  const area = root.querySelector(".canvas-area");
  if (!area) return;
  let start: { x: number; y: number } | null = null;

  area.addEventListener("mousedown", (event) => {
    const e = event as MouseEvent;
    const image = (e.target as Element).closest(".canvas-image");
    if (!image) return;
    start = { x: e.offsetX, y: e.offsetY };
  });
  area.addEventListener("mouseup", (event) => {
    if (!start) return;
    const e = event as MouseEvent;
    const x = Math.min(start.x, e.offsetX);
    const y = Math.min(start.y, e.offsetY);
    const w = Math.abs(e.offsetX - start.x);
    const h = Math.abs(e.offsetY - start.y);
    start = null;
    if (w > 0 && h > 0) panel.setSelection({ x, y, w, h });
  });
}

if (typeof document !== "undefined" && document.getElementById("panel-root")) {
  const panel = new Panel(new ApiClient(serverBaseUrl()));
  const root = document.getElementById("panel-root") as HTMLElement;
  boot(root, panel);
  void panel.newDocument(512, 384, "collage");
}
