/** DOM-free chat controller: owns the session lifecycle and turns each
 * user query into a list of rendered HTML blocks for the transcript. */

import { ApiClient, ClarificationError, RequestFailed } from "./api.js";
import { renderClarification, renderMessage } from "./render.js";
import { SessionStore } from "./session.js";
import { sparkline } from "./sparkline.js";

export class ChatController {
  constructor(
    private api: ApiClient,
    private store: SessionStore,
  ) {}

  /** Reuse the persisted session or open a fresh one. */
  async ensureSession(): Promise<string> {
    const existing = this.store.sessionId;
    if (existing) return existing;
    const sid = await this.api.createSession();
    this.store.sessionId = sid;
    return sid;
  }

  /** Restore the persisted transcript as rendered HTML blocks. */
  restoreTranscript(): string[] {
    return this.store.turns.map((t) =>
      t.role === "clarification"
        ? renderMessage("clarification", t.text)
        : renderMessage(t.role, t.text),
    );
  }

  /** Send one query; returns the HTML blocks to append to the transcript. */
  async send(text: string): Promise<string[]> {
    const blocks = [renderMessage("user", text)];
    this.store.appendTurn({ role: "user", text });
    const sid = await this.ensureSession();
    try {
      const resp = await this.api.query(sid, text);
      this.store.appendTurn({ role: "agent", text: resp.text });
      blocks.push(renderMessage("agent", resp.text));
      if (resp.hr_series && resp.hr_series.bpm.length > 0) {
        blocks.push(`<div class="chart">${sparkline(resp.hr_series.bpm)}</div>`);
      }
    } catch (err) {
      if (err instanceof ClarificationError) {
        this.store.appendTurn({ role: "clarification", text: `The agent needs more information: ${err.question}` });
        blocks.push(renderClarification(err.question));
      } else if (err instanceof RequestFailed && err.status === 404) {
        // expired server-side session: start over and retry once
        this.store.reset();
        this.store.appendTurn({ role: "user", text });
        const fresh = await this.ensureSession();
        const resp = await this.api.query(fresh, text);
        this.store.appendTurn({ role: "agent", text: resp.text });
        blocks.push(renderMessage("agent", resp.text));
      } else {
        const message = err instanceof Error ? err.message : String(err);
        this.store.appendTurn({ role: "error", text: message });
        blocks.push(renderMessage("error", message));
      }
    }
    return blocks;
  }
}
