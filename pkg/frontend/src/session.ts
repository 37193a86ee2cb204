import type { SessionPayload } from "./types";

const KEY = "dms.session";

/** Bearer token plus role/expiry, kept in memory and (optionally) in
 * sessionStorage so a reload within the same tab stays signed in. Never
 * written to localStorage or cookies. */
export class ClientSession {
  private current: SessionPayload | null = null;

  constructor(private storage: Storage | null = defaultStorage()) {
    const raw = this.storage?.getItem(KEY);
    if (raw) {
      try {
        this.current = JSON.parse(raw) as SessionPayload;
      } catch {
        this.storage?.removeItem(KEY);
      }
    }
  }

  get session(): SessionPayload | null {
    return this.current;
  }

  get token(): string | null {
    return this.current?.token ?? null;
  }

  set(session: SessionPayload): void {
    this.current = session;
    this.storage?.setItem(KEY, JSON.stringify(session));
  }

  purge(): void {
    this.current = null;
    this.storage?.removeItem(KEY);
  }
}

function defaultStorage(): Storage | null {
  try {
    return typeof sessionStorage === "undefined" ? null : sessionStorage;
  } catch {
    return null;
  }
}
