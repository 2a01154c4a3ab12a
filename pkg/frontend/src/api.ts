/** Typed client for the pulse-agent HTTP API. All server access in the UI
 * goes through this module; nothing else issues requests. */

export interface QueryResponse {
  session_id: string;
  text: string;
  extracted_values: (number | null)[];
  hr_series?: {
    window_start_s: number[];
    bpm: (number | null)[];
  };
}

export interface RecordingMeta {
  recording_id: string;
  user_id: string;
  modality: string;
  start_epoch_s: number;
  duration_s: number;
  sample_rate_hz: number;
  source_file: string;
}

export interface ApiError {
  code: string;
  message: string;
}

/** A 422 from the query endpoint: the agent needs more information. */
export class ClarificationError extends Error {
  constructor(public question: string) {
    super(question);
    this.name = "ClarificationError";
  }
}

export class RequestFailed extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
    this.name = "RequestFailed";
  }
}

async function errorBody(resp: Response): Promise<ApiError> {
  try {
    return (await resp.json()) as ApiError;
  } catch {
    return { code: "unknown", message: `HTTP ${resp.status}` };
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  async health(): Promise<boolean> {
    try {
      const resp = await this.fetchFn(`${this.baseUrl}/v1/healthz`);
      return resp.ok;
    } catch {
      return false;
    }
  }

  async createSession(): Promise<string> {
    const resp = await this.fetchFn(`${this.baseUrl}/v1/sessions`, { method: "POST" });
    if (!resp.ok) {
      const err = await errorBody(resp);
      throw new RequestFailed(resp.status, err.code, err.message);
    }
    const body = (await resp.json()) as { session_id: string };
    return body.session_id;
  }

  async query(sessionId: string, text: string): Promise<QueryResponse> {
    const resp = await this.fetchFn(`${this.baseUrl}/v1/sessions/${sessionId}/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
    if (resp.status === 422) {
      const err = await errorBody(resp);
      throw new ClarificationError(err.message);
    }
    if (!resp.ok) {
      const err = await errorBody(resp);
      throw new RequestFailed(resp.status, err.code, err.message);
    }
    return (await resp.json()) as QueryResponse;
  }

  async listRecordings(userId: string): Promise<RecordingMeta[]> {
    const resp = await this.fetchFn(`${this.baseUrl}/v1/users/${userId}/recordings`);
    if (!resp.ok) {
      const err = await errorBody(resp);
      throw new RequestFailed(resp.status, err.code, err.message);
    }
    return (await resp.json()) as RecordingMeta[];
  }
}
