/**
 * Typed client for the label service endpoints. The fetch implementation is
 * injectable so the session logic can be unit-tested against a fake server.
 */

export interface ClipInfo {
  id: string;
  status: "unlabeled" | "coarse" | "labeled" | "accepted" | "rejected";
  duration_s: number;
  sample_rate: number;
}

export interface CompareScores {
  f1: number;
  iou: number;
  dice: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }

  get isLocked(): boolean {
    return this.status === 409 && this.code === "locked";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function raiseForStatus(resp: Response): Promise<Response> {
  if (resp.ok) return resp;
  let code = "http_error";
  let message = `${resp.status}`;
  try {
    const body = (await resp.json()) as { detail?: { code?: string; message?: string } };
    code = body.detail?.code ?? code;
    message = body.detail?.message ?? message;
  } catch {
    // non-JSON error body; keep defaults
  }
  throw new ApiError(resp.status, code, message);
}

export class LabelApi {
  constructor(
    private readonly baseUrl: string,
    private readonly clientId: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async listClips(): Promise<ClipInfo[]> {
    const resp = await raiseForStatus(await this.fetchImpl(this.url("/clips")));
    const body = (await resp.json()) as { clips: ClipInfo[] };
    return body.clips;
  }

  async getImage(clipId: string): Promise<Uint8Array> {
    const resp = await raiseForStatus(await this.fetchImpl(this.url(`/clips/${clipId}/image.png`)));
    return new Uint8Array(await resp.arrayBuffer());
  }

  async getMask(clipId: string): Promise<Uint8Array> {
    const resp = await raiseForStatus(await this.fetchImpl(this.url(`/clips/${clipId}/mask.png`)));
    return new Uint8Array(await resp.arrayBuffer());
  }

  async putMask(clipId: string, png: Uint8Array): Promise<void> {
    await raiseForStatus(
      await this.fetchImpl(this.url(`/clips/${clipId}/mask.png`), {
        method: "PUT",
        body: png as BodyInit,
        headers: { "Content-Type": "image/png", "X-Client-Id": this.clientId },
      }),
    );
  }

  async denoisePreview(clipId: string): Promise<Uint8Array> {
    const resp = await raiseForStatus(
      await this.fetchImpl(this.url(`/clips/${clipId}/denoise`), { method: "POST" }),
    );
    return new Uint8Array(await resp.arrayBuffer());
  }

  async accept(clipId: string): Promise<void> {
    await raiseForStatus(
      await this.fetchImpl(this.url(`/clips/${clipId}/accept`), {
        method: "POST",
        headers: { "X-Client-Id": this.clientId },
      }),
    );
  }

  async reject(clipId: string): Promise<void> {
    await raiseForStatus(
      await this.fetchImpl(this.url(`/clips/${clipId}/reject`), {
        method: "POST",
        headers: { "X-Client-Id": this.clientId },
      }),
    );
  }

  async compare(clipId: string, predictedPng: Uint8Array): Promise<CompareScores> {
    const resp = await raiseForStatus(
      await this.fetchImpl(this.url(`/clips/${clipId}/compare`), {
        method: "POST",
        body: predictedPng as BodyInit,
        headers: { "Content-Type": "image/png" },
      }),
    );
    return (await resp.json()) as CompareScores;
  }
}
