import { ApiClient } from "./api";
import { clear, h } from "./dom";
import { ClientSession } from "./session";
import type { SessionPayload } from "./types";
import { CommunityView } from "./views/community";
import { DestinationsView } from "./views/destinations";
import { ReservationView } from "./views/hotels";
import { LoginView, } from "./views/login";
import { Bbox, MapView } from "./views/map";

export type SectionName = "destinations" | "map" | "hotels" | "community";

// Minna and surroundings; matches the fixture dataset.
const HOME_VIEWPORT: Bbox = [9.55, 6.49, 9.65, 6.59];

/** Application shell: login gate, then a menu over the four sections. An
 * expired session mid-use routes back to login and returns to the intended
 * section afterwards. */
export class App {
  readonly el: HTMLElement;
  section: SectionName = "destinations";
  private pendingSection: SectionName | null = null;
  private communityDest = "";
  private header: HTMLElement;
  private outlet: HTMLElement;

  constructor(
    private api: ApiClient,
    private session: ClientSession = new ClientSession(),
  ) {
    this.header = h("header", { hidden: "" });
    this.outlet = h("main", {});
    this.el = h("div", {}, this.header, this.outlet);
    this.api.onUnauthorized = () => this.onSessionExpired();

    if (this.session.token) {
      this.api.token = this.session.token;
      this.showShell();
      this.show(this.section);
    } else {
      this.showLogin(null);
    }
  }

  // -- login / logout ---------------------------------------------------------

  private showLogin(notice: string | null): void {
    this.header.hidden = true;
    clear(this.outlet);
    const view = new LoginView(this.api, (s) => this.onLogin(s), notice);
    this.outlet.append(view.el);
  }

  private onLogin(session: SessionPayload): void {
    this.session.set(session);
    this.showShell();
    const target = this.pendingSection ?? "destinations";
    this.pendingSection = null;
    this.show(target);
  }

  private onSessionExpired(): void {
    this.pendingSection = this.section;
    this.session.purge();
    this.api.token = null;
    this.showLogin("Your session expired — sign in to continue where you left off.");
  }

  private async logout(): Promise<void> {
    try {
      await this.api.logout();
    } catch {
      // token is purged regardless
    }
    this.api.token = null;
    this.session.purge();
    this.pendingSection = null;
    this.showLogin(null);
  }

  // -- menu ----------------------------------------------------------------------

  private showShell(): void {
    clear(this.header);
    this.header.hidden = false;
    this.header.append(h("h1", {}, "Destination Explorer"));
    const sections: [SectionName, string][] = [
      ["destinations", "Destinations"],
      ["map", "Map"],
      ["hotels", "Hotels"],
      ["community", "Community"],
    ];
    for (const [name, label] of sections) {
      const btn = h("button", { "data-section": name }, label);
      btn.addEventListener("click", () => this.show(name));
      this.header.append(btn);
    }
    const user = this.session.session;
    const logoutBtn = h("button", { "data-action": "logout" },
      `Sign out${user ? ` (${user.username})` : ""}`);
    logoutBtn.addEventListener("click", () => void this.logout());
    this.header.append(logoutBtn);
  }

  show(section: SectionName): void {
    this.section = section;
    for (const btn of this.header.querySelectorAll("button[data-section]")) {
      btn.classList.toggle("active", btn.getAttribute("data-section") === section);
    }
    clear(this.outlet);
    switch (section) {
      case "destinations":
        this.outlet.append(
          new DestinationsView(this.api, (dest) => {
            this.communityDest = dest;
            this.show("community");
          }).el,
        );
        break;
      case "map":
        this.outlet.append(new MapView(this.api, HOME_VIEWPORT).el);
        break;
      case "hotels":
        this.outlet.append(new ReservationView(this.api).el);
        break;
      case "community":
        if (!this.communityDest) {
          this.outlet.append(h("div", { class: "card" },
            h("p", {}, "Pick a destination first — community threads are per tour site.")));
        } else {
          this.outlet.append(new CommunityView(this.api, this.communityDest).el);
        }
        break;
    }
  }
}
