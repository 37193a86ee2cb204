import { ApiClient, ApiError } from "../api";
import { clear, h } from "../dom";
import type { AvailabilityRow, Booking } from "../types";

/** Hotel reservation flow: availability search, TTL-limited hold with a
 * countdown, then confirm or cancel. Availability counts and nightly rates
 * are shown exactly as the API reported them. */
export class ReservationView {
  readonly el: HTMLElement;
  offers: AvailabilityRow[] = [];
  booking: Booking | null = null;

  private form: HTMLFormElement;
  private offersBox: HTMLElement;
  private bookingBox: HTMLElement;
  private noticeBox: HTMLElement;
  private countdownTimer: ReturnType<typeof setInterval> | null = null;

  constructor(private api: ApiClient, private clock: () => number = () => Date.now() / 1000) {
    this.noticeBox = h("div", { class: "notice", hidden: "", "data-role": "hotel-notice" });
    this.offersBox = h("div", { "data-role": "offers" });
    this.bookingBox = h("div", { "data-role": "booking" });

    this.form = h("form", { class: "inline" },
      h("label", {}, "Check-in ", h("input", { name: "check_in", type: "date" })),
      h("label", {}, "Check-out ", h("input", { name: "check_out", type: "date" })),
      h("label", {}, "Rooms ", h("input", { name: "rooms", type: "number", value: "1", min: "1" })),
      h("button", { type: "submit" }, "Search"),
    );
    this.form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.search();
    });

    this.el = h("div", { class: "card", "data-view": "hotels" },
      h("h2", {}, "Hotel reservation"),
      this.noticeBox,
      this.form,
      this.offersBox,
      this.bookingBox,
    );
  }

  private params() {
    const data = new FormData(this.form);
    return {
      check_in: String(data.get("check_in") ?? ""),
      check_out: String(data.get("check_out") ?? ""),
      rooms: Number(data.get("rooms") ?? 1),
    };
  }

  async search(): Promise<void> {
    this.hideNotice();
    try {
      this.offers = await this.api.availability(this.params());
    } catch (err) {
      this.showNotice(err instanceof ApiError ? err.detail : "Availability search failed.");
      return;
    }
    clear(this.offersBox);
    if (!this.offers.length) {
      this.offersBox.append(h("p", {}, "No rooms available for that stay."));
      return;
    }
    const table = h("table", {},
      h("tr", {},
        h("th", {}, "Hotel"), h("th", {}, "Room type"),
        h("th", {}, "Available"), h("th", {}, "Rate (minor units/night)"), h("th", {}, "")),
    );
    this.offers.forEach((offer, i) => {
      const holdBtn = h("button", { type: "button", "data-hold": String(i) }, "Hold");
      holdBtn.addEventListener("click", () => void this.hold(offer));
      table.append(h("tr", { "data-offer": `${offer.hotel_id}/${offer.room_type}` },
        h("td", {}, offer.hotel_id),
        h("td", {}, offer.room_type),
        h("td", { "data-role": "offer-available" }, String(offer.available)),
        h("td", { "data-role": "offer-rate" }, String(offer.nightly_rate_minor)),
        h("td", {}, holdBtn),
      ));
    });
    this.offersBox.append(table);
  }

  async hold(offer: AvailabilityRow): Promise<void> {
    this.hideNotice();
    const stay = this.params();
    try {
      this.booking = await this.api.holdBooking({
        hotel_id: offer.hotel_id,
        room_type: offer.room_type,
        check_in: stay.check_in,
        check_out: stay.check_out,
        rooms: stay.rooms,
      });
    } catch (err) {
      if (err instanceof ApiError && err.error === "NoAvailability") {
        await this.search();
        this.showNotice("Those rooms were just taken — here is the latest availability.");
      } else {
        this.showNotice(err instanceof ApiError ? err.detail : "Hold failed.");
      }
      return;
    }
    this.renderBooking();
  }

  async confirm(): Promise<void> {
    if (!this.booking) return;
    this.hideNotice();
    try {
      this.booking = await this.api.confirmBooking(this.booking.id);
    } catch (err) {
      if (err instanceof ApiError && err.error === "HoldExpired") {
        this.showNotice("The hold expired before it was confirmed.");
        this.booking = await this.api.getBooking(this.booking.id);
      } else {
        this.showNotice(err instanceof ApiError ? err.detail : "Confirm failed.");
        if (err instanceof ApiError) {
          this.booking = await this.api.getBooking(this.booking.id);
        }
      }
    }
    this.renderBooking();
  }

  async cancel(): Promise<void> {
    if (!this.booking) return;
    this.hideNotice();
    try {
      this.booking = await this.api.cancelBooking(this.booking.id);
    } catch (err) {
      this.showNotice(err instanceof ApiError ? err.detail : "Cancel failed.");
    }
    this.renderBooking();
  }

  renderBooking(): void {
    clear(this.bookingBox);
    this.stopCountdown();
    const booking = this.booking;
    if (!booking) return;

    const pieces: (Node | string)[] = [
      h("h3", {}, `Booking ${booking.id}`),
      h("p", {},
        h("span", { "data-role": "booking-hotel" }, `${booking.hotel_id} / ${booking.room_type}`),
        ", ",
        h("span", { "data-role": "booking-stay" }, `${booking.check_in} to ${booking.check_out}`),
        ", rooms: ",
        h("span", { "data-role": "booking-rooms" }, String(booking.rooms)),
      ),
      h("p", {}, "Status: ", h("strong", { "data-role": "booking-state" }, booking.state)),
    ];

    if (booking.state === "held" && booking.hold_expires_at !== null) {
      const countdown = h("span", { "data-role": "hold-countdown" }, "");
      pieces.push(h("p", {}, "Hold expires in ", countdown, " s"));
      const update = () => {
        const left = Math.max(0, Math.ceil(booking.hold_expires_at! - this.clock()));
        countdown.textContent = String(left);
        if (left === 0) this.stopCountdown();
      };
      update();
      this.countdownTimer = setInterval(update, 1000);

      const confirmBtn = h("button", { type: "button", "data-action": "confirm" }, "Confirm");
      confirmBtn.addEventListener("click", () => void this.confirm());
      const cancelBtn = h("button", { type: "button", "data-action": "cancel" }, "Cancel");
      cancelBtn.addEventListener("click", () => void this.cancel());
      pieces.push(h("p", {}, confirmBtn, " ", cancelBtn));
    } else if (booking.state === "confirmed") {
      const cancelBtn = h("button", { type: "button", "data-action": "cancel" }, "Cancel booking");
      cancelBtn.addEventListener("click", () => void this.cancel());
      pieces.push(h("p", {}, cancelBtn));
    }

    this.bookingBox.append(h("div", { class: "card", "data-role": "booking-card" }, ...pieces));
  }

  private stopCountdown(): void {
    if (this.countdownTimer !== null) {
      clearInterval(this.countdownTimer);
      this.countdownTimer = null;
    }
  }

  private showNotice(text: string): void {
    this.noticeBox.hidden = false;
    this.noticeBox.textContent = text;
  }

  private hideNotice(): void {
    this.noticeBox.hidden = true;
  }
}
