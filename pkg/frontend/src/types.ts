export interface HuntResultView {
  link: string;
  rank: number;
}

export interface DocumentTab {
  sessionId: string;
  title: string;
  width: number;
  height: number;
  /** Latest server-side flatten; the panel never derives pixels itself. */
  pngB64: string | null;
}

export interface RectSelection {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface StagedPlacement {
  dx: number;
  dy: number;
  rotate: number;
  scale_x: number;
  scale_y: number;
  mirror_h: boolean;
  mirror_v: boolean;
}

export interface PanelState {
  documents: DocumentTab[];
  activeDocument: number;
  results: HuntResultView[];
  selectedResult: number | null;
  /** True iff exactly one hunt/download/style/session request is unresolved. */
  pending: boolean;
  creditLines: string[];
  notice: string | null;
  keywords: string;
  licenseFilter: string;
  selection: RectSelection | null;
  stagedPatchId: string | null;
  stagedPlacement: StagedPlacement;
  stagedLayerId: string | null;
  /** Server-derived snapshot taken before the last style application. */
  preStylePngB64: string | null;
}

export const LICENSE_LABELS = [
  "not-filtered-by-license",
  "reuse-with-modification",
  "reuse",
  "noncommercial-reuse-with-modification",
  "noncommercial-reuse",
] as const;

export function identityPlacement(): StagedPlacement {
  return { dx: 0, dy: 0, rotate: 0, scale_x: 1, scale_y: 1, mirror_h: false, mirror_v: false };
}

export function initialPanelState(): PanelState {
  return {
    documents: [],
    activeDocument: -1,
    results: [],
    selectedResult: null,
    pending: false,
    creditLines: [],
    notice: null,
    keywords: "",
    licenseFilter: LICENSE_LABELS[0],
    selection: null,
    stagedPatchId: null,
    stagedPlacement: identityPlacement(),
    stagedLayerId: null,
    preStylePngB64: null,
  };
}
