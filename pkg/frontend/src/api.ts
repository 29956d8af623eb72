/** Typed client for the review service.  Shapes mirror the server JSON
 * exactly; nothing is renamed or massaged on the way through. */

export type Span = [number, number];

export interface FragmentView {
  span: Span | null;
  dpl_span: Span;
  text: string;
  strategy: string | null;
  unsafe_reason: string | null;
}

export interface SuggestionView {
  fragment: number;
  matcher: string;
  rationale: string;
  source: string;
}

export interface ConversionNote {
  index: number | null;
  strategy: string | null;
  unsafe_reason: string | null;
  span: Span | null;
}

export interface CaseView {
  input: string;
  kind: "positive" | "negative";
  regex_outcome: string;
  dpl_outcome: string;
  passed: boolean;
  export_diffs: Record<string, [string | null, string | null]>;
  note: string | null;
}

/** Body of a validation report; `failures` carries every executed case,
 * passing ones included, when the server ran with full detail. */
export interface TestReport {
  passed: boolean;
  positives: { total: number; passed: number };
  negatives: { total: number; passed: number };
  failures: CaseView[];
  diagnostics: string[];
}

export interface SessionView {
  session: string;
  regex: string;
  classification: string;
  dpl: string;
  fragments: FragmentView[];
  notes: ConversionNote[];
  suggestions: SuggestionView[];
  applied: number[];
  report: TestReport | null;
  revision: number;
}

export type ValidateResponse = TestReport & { session: string; revision: number };

export interface OptimizeResponse {
  session: string;
  revision: number;
  suggestions: SuggestionView[];
  diagnostics: string[];
}

export type ApplyResponse = SessionView & { syntax: string[] };

/** Error envelope shared by every endpoint: {"error", "message", ...extras}. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly kind: string,
    message: string,
    readonly extra: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface Api {
  convert(regex: string): Promise<SessionView>;
  session(id: string): Promise<SessionView>;
  validate(id: string, nPos: number, nNeg: number): Promise<ValidateResponse>;
  optimize(id: string): Promise<OptimizeResponse>;
  apply(id: string, suggestion: number): Promise<ApplyResponse>;
}

export class HttpApi implements Api {
  constructor(private readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.base + path, init);
    let body: Record<string, unknown>;
    try {
      body = (await res.json()) as Record<string, unknown>;
    } catch {
      throw new ApiError(res.status, "bad-response", "server returned non-JSON");
    }
    if (!res.ok) {
      const { error, message, ...extra } = body as { error?: string; message?: string };
      throw new ApiError(res.status, error ?? "unknown", message ?? res.statusText, extra);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  convert(regex: string): Promise<SessionView> {
    return this.post("/api/convert", { regex });
  }

  session(id: string): Promise<SessionView> {
    return this.request(`/api/session/${encodeURIComponent(id)}`);
  }

  validate(id: string, nPos: number, nNeg: number): Promise<ValidateResponse> {
    return this.post("/api/validate", { session: id, n_pos: nPos, n_neg: nNeg });
  }

  optimize(id: string): Promise<OptimizeResponse> {
    return this.post("/api/optimize", { session: id });
  }

  apply(id: string, suggestion: number): Promise<ApplyResponse> {
    return this.post("/api/apply", { session: id, suggestion });
  }
}
