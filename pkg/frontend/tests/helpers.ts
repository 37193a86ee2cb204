import { vi } from "vitest";

export interface RecordedCall {
  method: string;
  url: string;
  headers: Record<string, string>;
  body: unknown;
}

type Responder = (
  call: RecordedCall,
) => { status: number; body: unknown } | Promise<{ status: number; body: unknown }>;

/** Scriptable fetch double: route patterns to canned (or delayed) responses
 * and record every request for header/URL assertions. */
export class FakeFetch {
  calls: RecordedCall[] = [];
  private routes: { method: string; pattern: RegExp; responder: Responder }[] = [];

  on(method: string, pattern: RegExp, responder: Responder | { status: number; body: unknown }) {
    this.routes.push({
      method,
      pattern,
      responder: typeof responder === "function" ? responder : () => responder,
    });
    return this;
  }

  install(): this {
    vi.stubGlobal("fetch", this.handler);
    return this;
  }

  private handler = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    const method = init?.method ?? "GET";
    const call: RecordedCall = {
      method,
      url,
      headers: (init?.headers as Record<string, string>) ?? {},
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    };
    this.calls.push(call);
    for (const route of this.routes) {
      if (route.method === method && route.pattern.test(url)) {
        const { status, body } = await route.responder(call);
        return new Response(JSON.stringify(body), {
          status,
          headers: { "Content-Type": "application/json" },
        });
      }
    }
    throw new Error(`FakeFetch: no route for ${method} ${url}`);
  };

  requests(method: string, pattern: RegExp): RecordedCall[] {
    return this.calls.filter((c) => c.method === method && pattern.test(c.url));
  }
}

/** Let queued promise callbacks run (a few microtask/mácrotask rounds). */
export async function flush(times = 4): Promise<void> {
  for (let i = 0; i < times; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export function text(root: ParentNode, selector: string): string {
  const el = root.querySelector(selector);
  if (!el) throw new Error(`missing element ${selector}`);
  return el.textContent ?? "";
}

export function click(root: ParentNode, selector: string): void {
  const el = root.querySelector(selector) as HTMLElement | null;
  if (!el) throw new Error(`missing element ${selector}`);
  el.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

export function setInput(root: ParentNode, selector: string, value: string): void {
  const el = root.querySelector(selector) as HTMLInputElement | null;
  if (!el) throw new Error(`missing input ${selector}`);
  el.value = value;
}

export function submit(root: ParentNode, selector: string): void {
  const el = root.querySelector(selector) as HTMLFormElement | null;
  if (!el) throw new Error(`missing form ${selector}`);
  el.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}
