/** Session persistence: the chat reconnects to its server-side session
 * across page reloads until the server expires it. Storage is injectable
 * so tests run without a browser. */

export interface KeyValueStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export interface Turn {
  role: "user" | "agent" | "clarification" | "error";
  text: string;
}

const SESSION_KEY = "pulse-agent.session_id";
const TURNS_KEY = "pulse-agent.turns";

export class SessionStore {
  constructor(private storage: KeyValueStorage) {}

  get sessionId(): string | null {
    return this.storage.getItem(SESSION_KEY);
  }

  set sessionId(value: string | null) {
    if (value === null) {
      this.storage.removeItem(SESSION_KEY);
    } else {
      this.storage.setItem(SESSION_KEY, value);
    }
  }

  get turns(): Turn[] {
    const raw = this.storage.getItem(TURNS_KEY);
    if (!raw) return [];
    try {
      return JSON.parse(raw) as Turn[];
    } catch {
      return [];
    }
  }

  appendTurn(turn: Turn): void {
    const turns = this.turns;
    turns.push(turn);
    this.storage.setItem(TURNS_KEY, JSON.stringify(turns));
  }

  /** Drop the stored session after the server reports it unknown/expired. */
  reset(): void {
    this.storage.removeItem(SESSION_KEY);
    this.storage.removeItem(TURNS_KEY);
  }
}

export class MemoryStorage implements KeyValueStorage {
  private map = new Map<string, string>();
  getItem(key: string): string | null {
    return this.map.has(key) ? this.map.get(key)! : null;
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
  removeItem(key: string): void {
    this.map.delete(key);
  }
}
