/**
 * Typed client for the server's wire schemas. Every operation travels as an
 * HTTP POST with a JSON body; a 200 status is the only success signal, and
 * any other status carries {"error": message}.
 */

import { StagedPlacement } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

export interface HuntResponse {
  links: string[];
}

export interface DownloadResponse {
  asset_id: string;
  credit_line: string;
}

export interface StyleResponse {
  status: "ok";
  result_png_b64: string;
}

export interface FlattenResponse {
  png_b64: string;
  width: number;
  height: number;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async post<T>(route: string, body: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + route, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, `server unreachable: ${String(err)}`);
    }
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      payload = null;
    }
    if (response.status !== 200) {
      const message =
        payload && typeof payload === "object" && "error" in payload
          ? String((payload as { error: unknown }).error)
          : `server returned status ${response.status}`;
      throw new ApiError(response.status, message);
    }
    return payload as T;
  }

  huntImage(
    imagePngB64: string,
    keywords: string[],
    licenseFilter: string,
    maxResults?: number,
  ): Promise<HuntResponse> {
    const body: Record<string, unknown> = {
      image_png_b64: imagePngB64,
      keywords,
      license_filter: licenseFilter,
    };
    if (maxResults) body.max_results = maxResults;
    return this.post("/hunt/image", body);
  }

  huntKeywords(
    keywords: string[],
    licenseFilter: string,
    maxResults?: number,
  ): Promise<HuntResponse> {
    const body: Record<string, unknown> = { keywords, license_filter: licenseFilter };
    if (maxResults) body.max_results = maxResults;
    return this.post("/hunt/keywords", body);
  }

  download(link: string, licenseFilter: string): Promise<DownloadResponse> {
    return this.post("/download", { link, license_filter: licenseFilter });
  }

  styleSelected(contentPngB64: string, stylePngB64: string, strength = 1.0): Promise<StyleResponse> {
    return this.post("/style/selected", {
      content_png_b64: contentPngB64,
      style_png_b64: stylePngB64,
      strength,
    });
  }

  styleExisting(contentPngB64: string, styleId: string, strength = 1.0): Promise<StyleResponse> {
    return this.post("/style/existing", {
      content_png_b64: contentPngB64,
      style_id: styleId,
      strength,
    });
  }

  // -- session operations; one endpoint call per edit action -----------------

  sessionCreate(sessionId: string, width: number, height: number): Promise<{ session_id: string }> {
    return this.post(`/session/${sessionId}/create`, { width, height });
  }

  /** Create a session sized to a stored asset with that asset as background. */
  sessionCreateFromAsset(
    sessionId: string,
    assetId: string,
  ): Promise<{ session_id: string; width: number; height: number }> {
    return this.post(`/session/${sessionId}/create`, { source_asset_id: assetId });
  }

  sessionCut(
    sessionId: string,
    source: { assetId?: string; pngB64?: string },
    rect: { x: number; y: number; w: number; h: number },
  ): Promise<{ patch_id: string }> {
    const body: Record<string, unknown> = { region: { rect: [rect.x, rect.y, rect.w, rect.h] } };
    if (source.assetId) body.source_asset_id = source.assetId;
    if (source.pngB64) body.source_png_b64 = source.pngB64;
    return this.post(`/session/${sessionId}/cut`, body);
  }

  sessionPaste(
    sessionId: string,
    patchId: string,
    placement: StagedPlacement,
    opacity: number,
  ): Promise<{ layer_id: string }> {
    return this.post(`/session/${sessionId}/paste`, {
      patch_id: patchId,
      placement,
      opacity,
    });
  }

  sessionSetOpacity(sessionId: string, layerId: string, opacity: number): Promise<{ ok: true }> {
    return this.post(`/session/${sessionId}/set_opacity`, { layer_id: layerId, opacity });
  }

  sessionRemoveLayer(sessionId: string, layerId: string): Promise<{ ok: true }> {
    return this.post(`/session/${sessionId}/remove_layer`, { layer_id: layerId });
  }

  sessionSetBackground(
    sessionId: string,
    source: { assetId?: string; pngB64?: string },
  ): Promise<{ layer_id: string }> {
    const body: Record<string, unknown> = {};
    if (source.assetId) body.source_asset_id = source.assetId;
    if (source.pngB64) body.source_png_b64 = source.pngB64;
    return this.post(`/session/${sessionId}/set_background`, body);
  }

  sessionReplace(sessionId: string, pngB64: string): Promise<{ layer_id: string }> {
    return this.post(`/session/${sessionId}/replace`, { source_png_b64: pngB64 });
  }

  sessionFlatten(sessionId: string): Promise<FlattenResponse> {
    return this.post(`/session/${sessionId}/flatten`, {});
  }

  sessionExport(sessionId: string): Promise<{ asset_id: string; url: string }> {
    return this.post(`/session/${sessionId}/export`, {});
  }
}
