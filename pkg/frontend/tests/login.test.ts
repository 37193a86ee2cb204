// @vitest-environment jsdom
import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api";
import { LoginView } from "../src/views/login";
import { FakeFetch, flush, setInput, submit, text } from "./helpers";

const SESSION = {
  token: "tok-1", user_id: "u1", username: "amina", role: "tourist",
  issued_at: 0, expires_at: 86400,
};

afterEach(() => vi.unstubAllGlobals());

describe("LoginView", () => {
  it("invalid credentials show an inline error and keep the username", async () => {
    new FakeFetch()
      .on("POST", /\/api\/session$/, {
        status: 401,
        body: { error: "InvalidCredentials", detail: "invalid username or password" },
      })
      .install();
    const onLogin = vi.fn();
    const view = new LoginView(new ApiClient(""), onLogin);
    document.body.append(view.el);
    setInput(view.el, "input[name=username]", "amina");
    setInput(view.el, "input[name=password]", "wrong-password");
    submit(view.el, "form");
    await flush();
    expect(onLogin).not.toHaveBeenCalled();
    expect(text(view.el, ".error")).toBe("invalid username or password");
    expect((view.el.querySelector("input[name=username]") as HTMLInputElement).value)
      .toBe("amina");
    document.body.innerHTML = "";
  });

  it("successful login hands the session to the shell", async () => {
    new FakeFetch()
      .on("POST", /\/api\/session$/, { status: 200, body: SESSION })
      .install();
    const onLogin = vi.fn();
    const view = new LoginView(new ApiClient(""), onLogin);
    setInput(view.el, "input[name=username]", "amina");
    setInput(view.el, "input[name=password]", "longenough");
    submit(view.el, "form");
    await flush();
    expect(onLogin).toHaveBeenCalledWith(SESSION);
  });

  it("register-and-sign-in registers before logging in", async () => {
    const fake = new FakeFetch()
      .on("POST", /\/api\/users$/, { status: 201, body: { user_id: "u1" } })
      .on("POST", /\/api\/session$/, { status: 200, body: SESSION })
      .install();
    const onLogin = vi.fn();
    const view = new LoginView(new ApiClient(""), onLogin);
    setInput(view.el, "input[name=username]", "amina");
    setInput(view.el, "input[name=password]", "longenough");
    (view.el.querySelector('[data-action="register"]') as HTMLButtonElement).click();
    await flush();
    expect(fake.requests("POST", /users/).length).toBe(1);
    expect(onLogin).toHaveBeenCalled();
  });
});
