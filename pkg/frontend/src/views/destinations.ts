import { ApiClient, ApiError } from "../api";
import { clear, h } from "../dom";
import type { Destination } from "../types";

const CATEGORIES = ["", "Cultural", "Ecological", "Modern"];

/** Destination browser: text/category search over the catalog. */
export class DestinationsView {
  readonly el: HTMLElement;
  results: Destination[] = [];

  private listBox: HTMLElement;
  private errorBox: HTMLElement;
  private form: HTMLFormElement;

  constructor(private api: ApiClient, private onOpenCommunity?: (destId: string) => void) {
    this.errorBox = h("div", { class: "error", hidden: "" });
    this.listBox = h("div", { "data-role": "destination-list" });
    const select = h("select", { name: "category" });
    for (const c of CATEGORIES) select.append(h("option", { value: c }, c || "any category"));
    this.form = h("form", { class: "inline" },
      h("input", { name: "q", placeholder: "search tour sites" }),
      select,
      h("button", { type: "submit" }, "Search"),
    );
    this.form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.search();
    });
    this.el = h("div", { class: "card", "data-view": "destinations" },
      h("h2", {}, "Destinations"),
      this.errorBox,
      this.form,
      this.listBox,
    );
    void this.search();
  }

  async search(): Promise<void> {
    this.errorBox.hidden = true;
    const data = new FormData(this.form);
    const q = String(data.get("q") ?? "");
    const category = String(data.get("category") ?? "");
    try {
      this.results = await this.api.searchDestinations({
        q: q || undefined,
        category: category || undefined,
      });
    } catch (err) {
      this.errorBox.hidden = false;
      this.errorBox.textContent =
        err instanceof ApiError ? err.detail : "Could not load destinations.";
      return;
    }
    clear(this.listBox);
    if (!this.results.length) {
      this.listBox.append(h("p", {}, "Nothing matches."));
      return;
    }
    for (const dest of this.results) {
      const discuss = h("button", { type: "button", "data-action": "discuss" }, "Community");
      discuss.addEventListener("click", () => this.onOpenCommunity?.(dest.id));
      this.listBox.append(h("div", { class: "card", "data-destination": dest.id },
        h("h3", {}, dest.name),
        h("p", {}, `${dest.category} — ${dest.description}`),
        h("p", {}, `Open: ${dest.open_info || "unlisted"}`),
        discuss,
      ));
    }
  }
}
