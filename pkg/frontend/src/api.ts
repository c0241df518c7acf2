import {
  ApiError,
  ApiErrorBody,
  GenerateResponse,
  HealthResponse,
  HouseSpec,
  VocabResponse,
} from "./types.js";

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the JSON API; the fetch function is injectable
 * so tests can stub the network. */
export class ApiClient {
  private inflight: AbortController | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
      signal,
    });
    const doc = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, doc as ApiErrorBody);
    }
    return doc as T;
  }

  health(): Promise<HealthResponse> {
    return this.request("GET", "/api/health");
  }

  vocab(): Promise<VocabResponse> {
    return this.request("GET", "/api/vocab");
  }

  parse(text: string): Promise<HouseSpec> {
    return this.request("POST", "/api/parse", { text });
  }

  /** At most one generate request is in flight; a new call cancels the
   * previous one. */
  generate(text: string, seed?: number): Promise<GenerateResponse> {
    if (this.inflight !== null) {
      this.inflight.abort();
    }
    const controller = new AbortController();
    this.inflight = controller;
    const done = (r: GenerateResponse) => {
      if (this.inflight === controller) this.inflight = null;
      return r;
    };
    return this.request<GenerateResponse>(
      "POST",
      "/api/generate",
      seed === undefined ? { text } : { text, seed },
      controller.signal,
    ).then(done, (err) => {
      if (this.inflight === controller) this.inflight = null;
      throw err;
    });
  }
}
