import { ApiClient, ApiError } from "../api";
import { clear, h } from "../dom";
import type { ThreadPayload } from "../types";

/** Destination-anchored discussion: threads between tourists and locals. */
export class CommunityView {
  readonly el: HTMLElement;
  threads: ThreadPayload[] = [];

  private threadsBox: HTMLElement;
  private errorBox: HTMLElement;

  constructor(private api: ApiClient, readonly destinationId: string) {
    this.errorBox = h("div", { class: "error", hidden: "" });
    this.threadsBox = h("div", { "data-role": "threads" });

    const titleInput = h("input", { name: "title", placeholder: "start a new thread" });
    const form = h("form", { class: "inline" }, titleInput,
      h("button", { type: "submit" }, "Post thread"));
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.createThread(titleInput.value).then(() => { titleInput.value = ""; });
    });

    this.el = h("div", { class: "card", "data-view": "community" },
      h("h2", {}, `Community — ${destinationId}`),
      this.errorBox,
      form,
      this.threadsBox,
    );
    void this.refresh();
  }

  async refresh(): Promise<void> {
    this.errorBox.hidden = true;
    try {
      this.threads = await this.api.listThreads(this.destinationId);
    } catch (err) {
      this.showError(err);
      return;
    }
    clear(this.threadsBox);
    for (const thread of this.threads) {
      const replyInput = h("input", { name: "body", placeholder: "reply…" });
      const replyForm = h("form", { class: "inline" }, replyInput,
        h("button", { type: "submit" }, "Reply"));
      replyForm.addEventListener("submit", (ev) => {
        ev.preventDefault();
        void this.reply(thread.id, replyInput.value);
      });
      this.threadsBox.append(h("div", { class: "card", "data-thread": thread.id },
        h("h3", {}, thread.title),
        h("ul", {}, ...thread.posts.map((p) =>
          h("li", { "data-post": p.id }, `${p.body} — ${p.author_id}`))),
        replyForm,
      ));
    }
  }

  async createThread(title: string): Promise<void> {
    try {
      await this.api.createThread(this.destinationId, title);
      await this.refresh();
    } catch (err) {
      this.showError(err);
    }
  }

  async reply(threadId: string, body: string): Promise<void> {
    try {
      await this.api.postReply(threadId, body);
      await this.refresh();
    } catch (err) {
      this.showError(err);
    }
  }

  private showError(err: unknown): void {
    this.errorBox.hidden = false;
    this.errorBox.textContent =
      err instanceof ApiError ? err.detail : "Community service unavailable.";
  }
}
