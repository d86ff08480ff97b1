/**
 * Typed client for the writekit HTTP service.
 *
 * Payload shapes mirror the server JSON exactly; nothing is re-ranked
 * or re-shaped here. Errors arrive as {"error": message} with a 4xx/5xx
 * status and are surfaced as ServiceError.
 */

export interface Gloss {
  lang: string;
  text: string;
}

export interface LexiconEntry {
  headword: string;
  freq: number;
  pos?: string;
  glosses: Gloss[];
}

export interface CompletePayload {
  prefix: string;
  completions: LexiconEntry[];
}

export interface NextSuggestion {
  token: string;
  score: number;
  context_len: number;
}

export interface NextPayload {
  context: string;
  suggestions: NextSuggestion[];
}

export interface Correction {
  token: string;
  score: number;
  dist: number;
}

export interface SpellFlag {
  token: string;
  start: number;
  end: number;
  suggestions: Correction[];
}

export interface SpellPayload {
  flags: SpellFlag[];
}

export interface LookupMatch {
  headword: string;
  dist: number;
  freq: number;
  pos?: string;
  glosses: Gloss[];
}

export interface LookupPayload {
  query: string;
  max_dist: number;
  matches: LookupMatch[];
}

export interface TranslatePayload {
  text: string;
  unknown_tokens: string[];
  backend: string;
  direction: string[];
  latency: number;
  from_cache: boolean;
}

export interface HealthPayload {
  status: string;
  models: Record<string, boolean>;
}

export type EventKind =
  | "completion_shown"
  | "completion_accepted"
  | "nextword_shown"
  | "nextword_accepted"
  | "spell_shown"
  | "spell_accepted"
  | "translate_requested";

export interface LogEvent {
  consent: boolean;
  kind: EventKind;
  session: string;
  payload?: { suggestion?: string; rank?: number };
}

export class ServiceError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
    this.name = "ServiceError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function errorFrom(res: Response): Promise<ServiceError> {
  let message = `HTTP ${res.status}`;
  try {
    const body = (await res.json()) as { error?: unknown };
    if (typeof body.error === "string") message = body.error;
  } catch {
    // non-JSON error body; keep the status message
  }
  return new ServiceError(message, res.status);
}

export class ServiceClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async get<T>(path: string, params: Record<string, string | number>): Promise<T> {
    const qs = new URLSearchParams();
    for (const [key, value] of Object.entries(params)) qs.set(key, String(value));
    const suffix = qs.size > 0 ? `?${qs.toString()}` : "";
    const res = await this.fetchFn(`${this.base}${path}${suffix}`);
    if (!res.ok) throw await errorFrom(res);
    return (await res.json()) as T;
  }

  private async post(path: string, body: unknown): Promise<Response> {
    return this.fetchFn(`${this.base}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const res = await this.post(path, body);
    if (!res.ok) throw await errorFrom(res);
    return (await res.json()) as T;
  }

  health(): Promise<HealthPayload> {
    return this.get("/health", {});
  }

  complete(prefix: string, k?: number): Promise<CompletePayload> {
    return this.get("/complete", k === undefined ? { prefix } : { prefix, k });
  }

  next(context: string, k?: number): Promise<NextPayload> {
    return this.get("/next", k === undefined ? { context } : { context, k });
  }

  lookup(q: string, maxDist?: number, k?: number): Promise<LookupPayload> {
    const params: Record<string, string | number> = { q };
    if (maxDist !== undefined) params.max_dist = maxDist;
    if (k !== undefined) params.k = k;
    return this.get("/lookup", params);
  }

  spell(text: string): Promise<SpellPayload> {
    return this.postJson("/spell", { text });
  }

  translate(text: string, direction?: string): Promise<TranslatePayload> {
    const body: Record<string, string> = { text };
    if (direction !== undefined) body.direction = direction;
    return this.postJson("/translate", body);
  }

  /**
   * Report a usage event. Resolves true when the server recorded it,
   * false when it was acknowledged and discarded (204: no consent, or
   * logging disabled server-side). A 204 carries no body, so it must
   * not be parsed.
   */
  async log(event: LogEvent): Promise<boolean> {
    const res = await this.post("/log", event);
    if (res.status === 204) return false;
    if (!res.ok) throw await errorFrom(res);
    const body = (await res.json()) as { logged?: boolean };
    return body.logged === true;
  }
}
