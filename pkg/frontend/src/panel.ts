/**
 * Panel controller: the human's seat in the search-edit loop.
 *
 * The panel is a thin client. It never derives pixels itself: every raster it
 * shows came base64-encoded from a server response, every edit action maps to
 * a session endpoint call, and all operation traffic is POST. One hunt,
 * download, style or session mutation may be in flight at a time; clicks
 * arriving while `pending` is set are dropped.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  renderCanvas,
  renderCreditLines,
  renderDocumentTabs,
  renderNotice,
  renderResultsGrid,
} from "./render.js";
import {
  DocumentTab,
  PanelState,
  RectSelection,
  identityPlacement,
  initialPanelState,
} from "./types.js";

export class Panel {
  state: PanelState = initialPanelState();
  /** Index of the document that edit operations target (the active collage). */
  collageDocument = -1;

  constructor(
    private api: ApiClient,
    private root: Element | null = null,
  ) {}

  private get activeDoc(): DocumentTab | null {
    return this.state.documents[this.state.activeDocument] ?? null;
  }

  private get collageDoc(): DocumentTab | null {
    return this.state.documents[this.collageDocument] ?? null;
  }

  /** Run one remote interaction; drop the call if another is unresolved. */
  private async exclusive<T>(work: () => Promise<T>): Promise<T | null> {
    if (this.state.pending) return null;
    this.state.pending = true;
    this.state.notice = null;
    this.render();
    try {
      return await work();
    } catch (err) {
      this.state.notice = err instanceof ApiError ? err.message : String(err);
      return null;
    } finally {
      this.state.pending = false;
      this.render();
    }
  }

  private async refreshCanvas(docIndex: number): Promise<void> {
    const doc = this.state.documents[docIndex];
    const flat = await this.api.sessionFlatten(doc.sessionId);
    doc.pngB64 = flat.png_b64;
    doc.width = flat.width;
    doc.height = flat.height;
  }

  // -- documents -------------------------------------------------------------

  async newDocument(width: number, height: number, title = "collage"): Promise<number | null> {
    return this.exclusive(async () => {
      const sessionId = `panel-${Date.now()}-${this.state.documents.length + 1}`;
      await this.api.sessionCreate(sessionId, width, height);
      const doc: DocumentTab = { sessionId, title, width, height, pngB64: null };
      this.state.documents.push(doc);
      const index = this.state.documents.length - 1;
      this.state.activeDocument = index;
      if (this.collageDocument < 0) this.collageDocument = index;
      await this.refreshCanvas(index);
      return index;
    });
  }

  switchDocument(index: number): void {
    if (index >= 0 && index < this.state.documents.length) {
      this.state.activeDocument = index;
      this.state.selection = null;
      this.render();
    }
  }

  useAsCollage(index: number): void {
    if (index >= 0 && index < this.state.documents.length) {
      this.collageDocument = index;
      this.render();
    }
  }

  // -- hunts -------------------------------------------------------------------

  /** The blue refresh button: hunt with the flattened active collage. */
  async refresh(): Promise<void> {
    await this.exclusive(async () => {
      const doc = this.collageDoc;
      if (!doc) throw new ApiError(0, "no active collage to hunt with");
      const flat = await this.api.sessionFlatten(doc.sessionId);
      doc.pngB64 = flat.png_b64;
      const keywords = this.keywordList();
      const response = await this.api.huntImage(
        flat.png_b64,
        keywords,
        this.state.licenseFilter,
      );
      this.state.results = response.links.map((link, rank) => ({ link, rank }));
      this.state.selectedResult = null;
    });
  }

  async huntKeywords(): Promise<void> {
    await this.exclusive(async () => {
      const response = await this.api.huntKeywords(
        this.keywordList(),
        this.state.licenseFilter,
      );
      this.state.results = response.links.map((link, rank) => ({ link, rank }));
      this.state.selectedResult = null;
    });
  }

  private keywordList(): string[] {
    return this.state.keywords.split(/\s+/).filter((w) => w.length > 0);
  }

  // -- picking results -----------------------------------------------------------

  /** Download a result and open it as a new document tab. */
  async pickResult(index: number): Promise<void> {
    if (index < 0 || index >= this.state.results.length) return; // no request issued
    await this.exclusive(async () => {
      const result = this.state.results[index];
      const download = await this.api.download(result.link, this.state.licenseFilter);
      this.state.creditLines.push(download.credit_line);
      this.state.selectedResult = index;

      const sessionId = `panel-${Date.now()}-${this.state.documents.length + 1}`;
      const created = await this.api.sessionCreateFromAsset(sessionId, download.asset_id);
      const doc: DocumentTab = {
        sessionId,
        title: `download ${this.state.documents.length}`,
        width: created.width,
        height: created.height,
        pngB64: null,
      };
      this.state.documents.push(doc);
      this.state.activeDocument = this.state.documents.length - 1;
      await this.refreshCanvas(this.state.activeDocument);
    });
  }

  // -- cut-transform-paste -----------------------------------------------------

  setSelection(selection: RectSelection | null): void {
    this.state.selection = selection;
    this.render();
  }

  /** Cut the selected region of the active document into the collage session. */
  async cutSelection(): Promise<void> {
    const selection = this.state.selection;
    const source = this.activeDoc;
    const collage = this.collageDoc;
    if (!selection || !source || !collage || !source.pngB64) return;
    await this.exclusive(async () => {
      const cut = await this.api.sessionCut(
        collage.sessionId,
        { pngB64: source.pngB64 as string },
        selection,
      );
      this.state.stagedPatchId = cut.patch_id;
      this.state.stagedPlacement = identityPlacement();
      this.state.stagedLayerId = null;
    });
  }

  /** Paste the staged patch as the collage's new topmost layer. */
  async pasteStaged(opacity = 1.0): Promise<void> {
    const collage = this.collageDoc;
    const patchId = this.state.stagedPatchId;
    if (!collage || !patchId) return;
    await this.exclusive(async () => {
      const pasted = await this.api.sessionPaste(
        collage.sessionId,
        patchId,
        this.state.stagedPlacement,
        opacity,
      );
      this.state.stagedLayerId = pasted.layer_id;
      await this.refreshCanvas(this.collageDocument);
    });
  }

  /** Re-place an already pasted staged layer after a transform change. */
  private async repaste(): Promise<void> {
    const collage = this.collageDoc;
    const patchId = this.state.stagedPatchId;
    const layerId = this.state.stagedLayerId;
    if (!collage || !patchId) {
      this.render();
      return;
    }
    await this.exclusive(async () => {
      if (layerId) {
        await this.api.sessionRemoveLayer(collage.sessionId, layerId);
      }
      const pasted = await this.api.sessionPaste(
        collage.sessionId,
        patchId,
        this.state.stagedPlacement,
        1.0,
      );
      this.state.stagedLayerId = pasted.layer_id;
      await this.refreshCanvas(this.collageDocument);
    });
  }

  async mirrorStaged(horizontal = true): Promise<void> {
    if (this.state.pending) return; // keep staged state and server in step
    const placement = this.state.stagedPlacement;
    if (horizontal) placement.mirror_h = !placement.mirror_h;
    else placement.mirror_v = !placement.mirror_v;
    await this.repaste();
  }

  async rotateStaged(degrees: number): Promise<void> {
    if (this.state.pending) return;
    this.state.stagedPlacement.rotate =
      (this.state.stagedPlacement.rotate + degrees) % 360;
    await this.repaste();
  }

  async scaleStaged(factor: number): Promise<void> {
    if (this.state.pending) return;
    this.state.stagedPlacement.scale_x *= factor;
    this.state.stagedPlacement.scale_y *= factor;
    await this.repaste();
  }

  async moveStaged(dx: number, dy: number): Promise<void> {
    if (this.state.pending) return;
    this.state.stagedPlacement.dx += dx;
    this.state.stagedPlacement.dy += dy;
    await this.repaste();
  }

  /** Opacity slider: applies to the staged (topmost pasted) layer. */
  async setStagedOpacity(opacity: number): Promise<void> {
    const collage = this.collageDoc;
    const layerId = this.state.stagedLayerId;
    if (!collage || !layerId) return;
    await this.exclusive(async () => {
      await this.api.sessionSetOpacity(collage.sessionId, layerId, opacity);
      await this.refreshCanvas(this.collageDocument);
    });
  }

  /** Replace the collage background with the active document's pixels. */
  async setBackgroundFromActive(): Promise<void> {
    const source = this.activeDoc;
    const collage = this.collageDoc;
    if (!source || !collage || !source.pngB64) return;
    await this.exclusive(async () => {
      await this.api.sessionSetBackground(collage.sessionId, {
        pngB64: source.pngB64 as string,
      });
      await this.refreshCanvas(this.collageDocument);
    });
  }

  // -- style -----------------------------------------------------------------------

  /** Transfer the active document's style onto the collage. */
  async applySelectedStyle(strength = 1.0): Promise<void> {
    const styleSource = this.activeDoc;
    const collage = this.collageDoc;
    if (!styleSource || !collage || !styleSource.pngB64) return;
    await this.exclusive(async () => {
      const flat = await this.api.sessionFlatten(collage.sessionId);
      const styled = await this.api.styleSelected(
        flat.png_b64,
        styleSource.pngB64 as string,
        strength,
      );
      this.state.preStylePngB64 = flat.png_b64;
      await this.api.sessionReplace(collage.sessionId, styled.result_png_b64);
      await this.refreshCanvas(this.collageDocument);
    });
  }

  async applyExistingStyle(styleId: string, strength = 1.0): Promise<void> {
    const collage = this.collageDoc;
    if (!collage) return;
    await this.exclusive(async () => {
      const flat = await this.api.sessionFlatten(collage.sessionId);
      const styled = await this.api.styleExisting(flat.png_b64, styleId, strength);
      this.state.preStylePngB64 = flat.png_b64;
      await this.api.sessionReplace(collage.sessionId, styled.result_png_b64);
      await this.refreshCanvas(this.collageDocument);
    });
  }

  /** Restore the server-derived snapshot taken before the last style step. */
  async undoStyle(): Promise<void> {
    const collage = this.collageDoc;
    const snapshot = this.state.preStylePngB64;
    if (!collage || !snapshot) return;
    await this.exclusive(async () => {
      await this.api.sessionReplace(collage.sessionId, snapshot);
      this.state.preStylePngB64 = null;
      await this.refreshCanvas(this.collageDocument);
    });
  }

  async exportCollage(): Promise<string | null> {
    const collage = this.collageDoc;
    if (!collage) return null;
    const exported = await this.exclusive(() =>
      this.api.sessionExport(collage.sessionId),
    );
    return exported ? exported.url : null;
  }

  // -- rendering --------------------------------------------------------------------

  render(): void {
    if (!this.root) return;
    const region = (selector: string): Element | null =>
      this.root && this.root.querySelector(selector);

    const notice = region(".notice-area");
    if (notice) notice.innerHTML = renderNotice(this.state.notice);

    const tabs = region(".doc-tabs");
    if (tabs) tabs.innerHTML = renderDocumentTabs(this.state.documents, this.state.activeDocument);

    const canvas = region(".canvas-area");
    if (canvas) canvas.innerHTML = renderCanvas(this.state);

    const results = region(".results-area");
    if (results) {
      results.innerHTML = renderResultsGrid(this.state.results, this.state.selectedResult);
    }

    const credits = region(".credits-area");
    if (credits) credits.innerHTML = renderCreditLines(this.state.creditLines);

    const refresh = region(".refresh-button");
    if (refresh) {
      if (this.state.pending) refresh.setAttribute("disabled", "disabled");
      else refresh.removeAttribute("disabled");
    }
  }

  /** Attach delegated event handlers to a mounted panel skeleton. */
  mount(root: Element): void {
    this.root = root;
    root.addEventListener("click", (event) => {
      const target = event.target as Element | null;
      if (!target) return;
      if (target.closest(".refresh-button")) {
        void this.refresh();
        return;
      }
      const cell = target.closest(".result-cell");
      if (cell) {
        void this.pickResult(Number(cell.getAttribute("data-index")));
        return;
      }
      const tab = target.closest(".doc-tab");
      if (tab) {
        this.switchDocument(Number(tab.getAttribute("data-doc")));
      }
    });
    const keywords = root.querySelector<HTMLInputElement>(".keyword-box");
    if (keywords) {
      keywords.addEventListener("input", () => {
        this.state.keywords = keywords.value;
      });
    }
    const license = root.querySelector<HTMLSelectElement>(".license-select");
    if (license) {
      license.addEventListener("change", () => {
        this.state.licenseFilter = license.value;
      });
    }
    this.render();
  }
}
