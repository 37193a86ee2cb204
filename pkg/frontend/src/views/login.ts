import { ApiClient, ApiError } from "../api";
import { clear, h } from "../dom";
import type { SessionPayload } from "../types";

/** Sign-in (and quick register) form. A failed login keeps the username in
 * place and shows the error inline; success hands the session to onLogin. */
export class LoginView {
  readonly el: HTMLElement;
  private errorBox: HTMLElement;
  private username: HTMLInputElement;
  private password: HTMLInputElement;

  constructor(
    private api: ApiClient,
    private onLogin: (session: SessionPayload) => void,
    notice: string | null = null,
  ) {
    this.errorBox = h("div", { class: "error", hidden: "" });
    this.username = h("input", { name: "username", autocomplete: "username" });
    this.password = h("input", { name: "password", type: "password" });

    const form = h("form", {},
      h("label", {}, "Username ", this.username),
      h("br", {}),
      h("label", {}, "Password ", this.password),
      h("br", {}),
      h("button", { type: "submit" }, "Sign in"),
      h("button", { type: "button", "data-action": "register" }, "Register & sign in"),
    );
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.submit(false);
    });
    form.querySelector('[data-action="register"]')!.addEventListener("click", () => {
      void this.submit(true);
    });

    this.el = h("div", { class: "card", "data-view": "login" },
      h("h2", {}, "Sign in"),
      ...(notice ? [h("div", { class: "notice" }, notice)] : []),
      this.errorBox,
      form,
    );
  }

  private async submit(registerFirst: boolean): Promise<void> {
    this.errorBox.hidden = true;
    const username = this.username.value;
    const password = this.password.value;
    try {
      if (registerFirst) await this.api.register(username, password);
      const session = await this.api.login(username, password);
      this.onLogin(session);
    } catch (err) {
      clear(this.errorBox);
      this.errorBox.hidden = false;
      this.errorBox.textContent =
        err instanceof ApiError ? err.detail : "Network failure — is the service reachable?";
      // username intentionally left untouched
    }
  }
}
