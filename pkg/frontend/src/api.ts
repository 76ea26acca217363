// Thin fetch client for the session service; every UI action goes through
// one of these calls.
import type {
  ApplyResponse,
  KbDocument,
  RulesetPayload,
  SceneFramePayload,
  SceneResponse,
  UtteranceResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const r = await fetch(url, init);
  if (!r.ok) {
    let detail = r.statusText;
    try {
      detail = (await r.json()).detail ?? detail;
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new ApiError(r.status, detail);
  }
  return r.json() as Promise<T>;
}

function post(body: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  };
}

export class SessionClient {
  constructor(public base: string, public sessionId: string) {}

  static async create(base = ""): Promise<SessionClient> {
    const { id } = await request<{ id: string }>(`${base}/session`, post({}));
    return new SessionClient(base, id);
  }

  private url(suffix: string): string {
    return `${this.base}/session/${this.sessionId}${suffix}`;
  }

  postScene(frame: SceneFramePayload): Promise<SceneResponse> {
    return request(this.url("/scene"), post(frame));
  }

  sendUtterance(text: string): Promise<UtteranceResponse> {
    return request(this.url("/utterance"), post({ text }));
  }

  getKb(): Promise<KbDocument> {
    return request(this.url("/kb"));
  }

  induce(attribute: string, value: string): Promise<RulesetPayload> {
    return request(this.url("/induce"), post({ attribute, value }));
  }

  getRules(): Promise<Record<string, RulesetPayload>> {
    return request(this.url("/rules"));
  }

  apply(attribute: string, value: string): Promise<ApplyResponse> {
    return request(this.url("/apply"), post({ attribute, value }));
  }

  save(path: string): Promise<{ ok: boolean; path: string }> {
    return request(this.url("/save"), post({ path }));
  }

  load(path: string): Promise<{ ok: boolean; revision: number }> {
    return request(this.url("/load"), post({ path }));
  }
}
