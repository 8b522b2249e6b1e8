/** Typed client for the prediction server's JSON API. */

export interface Suggestion {
  word: string;
  probability: number;
}

export interface Substitution {
  from: string;
  to: string;
}

export interface SuggestResponse {
  substitutions: Substitution[];
  suggestions: Suggestion[];
}

export interface GenerateResponse {
  processedSeed: string;
  text: string;
}

export interface ClassicLine {
  title: string;
  line: string;
}

export interface ModelInfo {
  vocabSize: number;
  contextLength: number;
  hiddenSize: number;
  embeddingDim: number;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError("network", err instanceof Error ? err.message : String(err));
    }
    if (!resp.ok) {
      let code = "internal";
      let message = `HTTP ${resp.status}`;
      try {
        const body = (await resp.json()) as { code?: string; message?: string };
        if (body.code) code = body.code;
        if (body.message) message = body.message;
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(code, message);
    }
    return (await resp.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  health(): Promise<{ status: string }> {
    return this.request("/api/health");
  }

  model(): Promise<ModelInfo> {
    return this.request("/api/model");
  }

  classics(): Promise<ClassicLine[]> {
    return this.request("/api/classics");
  }

  suggest(text: string, k = 5): Promise<SuggestResponse> {
    return this.post("/api/suggest", { text, k });
  }

  generate(seedText: string, numWords: number, substitute: boolean): Promise<GenerateResponse> {
    return this.post("/api/generate", { seedText, numWords, substitute });
  }
}
