import { ApiClient, ApiError } from "../api";
import { clear, h } from "../dom";
import type { MapPayload, RoutePayload } from "../types";

export type Bbox = [number, number, number, number]; // s, w, n, e

const CANVAS_W = 640;
const CANVAS_H = 480;

/** Interactive road map: pannable viewport, click-to-pick origin/destination,
 * optimal route overlay. Distance/time figures are rendered verbatim from the
 * API payload. In-flight responses carry a sequence number; anything stale
 * for the current viewport/selection is discarded. */
export class MapView {
  readonly el: HTMLElement;
  viewport: Bbox;
  mapPayload: MapPayload | null = null;
  route: RoutePayload | null = null;
  origin: { lat: number; lon: number } | null = null;
  destination: { lat: number; lon: number } | null = null;
  metric: "distance" | "time" = "distance";

  private mapSeq = 0;
  private routeSeq = 0;
  private canvas: HTMLCanvasElement;
  private status: HTMLElement;
  private routeBox: HTMLElement;
  private noticeBox: HTMLElement;

  constructor(private api: ApiClient, initialViewport: Bbox) {
    this.viewport = initialViewport;
    this.canvas = h("canvas", {
      width: String(CANVAS_W),
      height: String(CANVAS_H),
      "data-role": "map-canvas",
    });
    this.canvas.addEventListener("click", (ev) => this.onClick(ev));
    this.status = h("p", { "data-role": "map-status" }, "Click the map to set an origin.");
    this.routeBox = h("div", { "data-role": "route-info" });
    this.noticeBox = h("div", { class: "notice", hidden: "", "data-role": "map-notice" });

    const metricToggle = h("form", { class: "inline", "data-role": "metric-toggle" });
    for (const value of ["distance", "time"] as const) {
      const radio = h("input", { type: "radio", name: "metric", value });
      if (value === this.metric) radio.setAttribute("checked", "");
      radio.addEventListener("change", () => {
        this.metric = value;
        void this.fetchRoute();
      });
      metricToggle.append(h("label", {}, radio, ` by ${value}`));
    }

    const panButtons = h("div", { class: "inline" });
    const steps: [string, number, number][] = [
      ["north", 1, 0], ["south", -1, 0], ["east", 0, 1], ["west", 0, -1],
    ];
    for (const [label, dLat, dLon] of steps) {
      const btn = h("button", { type: "button", "data-pan": label }, `pan ${label}`);
      btn.addEventListener("click", () => this.pan(dLat, dLon));
      panButtons.append(btn);
    }
    const resetBtn = h("button", { type: "button", "data-action": "clear-selection" }, "clear");
    resetBtn.addEventListener("click", () => {
      this.origin = this.destination = this.route = null;
      this.status.textContent = "Click the map to set an origin.";
      clear(this.routeBox);
      this.draw();
    });
    panButtons.append(resetBtn);

    this.el = h("div", { class: "card", "data-view": "map" },
      h("h2", {}, "Road map"),
      this.noticeBox,
      panButtons,
      this.canvas,
      metricToggle,
      this.status,
      this.routeBox,
    );
    void this.fetchMap();
  }

  // -- viewport --------------------------------------------------------------

  pan(dLat: number, dLon: number): void {
    const [s, w, n, e] = this.viewport;
    const latStep = (n - s) * 0.25 * dLat;
    const lonStep = (e - w) * 0.25 * dLon;
    this.viewport = [s + latStep, w + lonStep, n + latStep, e + lonStep];
    void this.fetchMap();
  }

  async fetchMap(): Promise<void> {
    const seq = ++this.mapSeq;
    try {
      const payload = await this.api.mapData(this.viewport);
      if (seq !== this.mapSeq) return; // superseded by a newer pan
      this.mapPayload = payload;
      this.draw();
    } catch (err) {
      if (seq !== this.mapSeq) return;
      this.showNotice(err instanceof ApiError ? err.detail : "Map data unavailable.");
    }
  }

  // -- selection and routing ----------------------------------------------------

  private onClick(ev: MouseEvent): void {
    const rect = this.canvas.getBoundingClientRect();
    const x = ev.clientX - rect.left;
    const y = ev.clientY - rect.top;
    this.selectPoint(this.unproject(x, y));
  }

  /** First pick sets the origin, second the destination (then a route is
   * requested); a third starts over. */
  selectPoint(p: { lat: number; lon: number }): void {
    this.hideNotice();
    if (!this.origin || this.destination) {
      this.origin = p;
      this.destination = null;
      this.route = null;
      clear(this.routeBox);
      this.status.textContent = "Origin set — click again for the destination.";
    } else {
      this.destination = p;
      this.status.textContent = "Routing…";
      void this.fetchRoute();
    }
    this.draw();
  }

  async fetchRoute(): Promise<void> {
    if (!this.origin || !this.destination) return;
    const seq = ++this.routeSeq;
    try {
      const route = await this.api.route(this.origin, this.destination, this.metric);
      if (seq !== this.routeSeq) return; // selection or metric changed meanwhile
      this.route = route;
      this.renderRouteInfo(route);
      this.status.textContent = `Route ${route.from_node} to ${route.to_node}.`;
      this.draw();
    } catch (err) {
      if (seq !== this.routeSeq) return;
      this.route = null;
      clear(this.routeBox);
      if (err instanceof ApiError && err.error === "Unreachable") {
        this.showNotice("No road connects those points in this direction.");
        this.status.textContent = "Unreachable — pick a different destination.";
      } else {
        this.showNotice(err instanceof ApiError ? err.detail : "Routing failed.");
      }
      this.draw();
    }
  }

  private renderRouteInfo(route: RoutePayload): void {
    clear(this.routeBox);
    this.routeBox.append(
      h("p", {},
        "Total: ",
        h("span", { "data-role": "route-distance" }, String(route.total_length_m)),
        " m, est. ",
        h("span", { "data-role": "route-time" }, String(route.est_time_s)),
        " s (", route.metric, ")",
      ),
      h("p", { "data-role": "route-nodes" }, route.nodes.join(" → ")),
    );
  }

  // -- projection ---------------------------------------------------------------

  project(lat: number, lon: number): { x: number; y: number } {
    const [s, w, n, e] = this.viewport;
    return {
      x: ((lon - w) / (e - w)) * CANVAS_W,
      y: ((n - lat) / (n - s)) * CANVAS_H,
    };
  }

  unproject(x: number, y: number): { lat: number; lon: number } {
    const [s, w, n, e] = this.viewport;
    return {
      lat: n - (y / CANVAS_H) * (n - s),
      lon: w + (x / CANVAS_W) * (e - w),
    };
  }

  // -- drawing --------------------------------------------------------------------

  draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return; // headless env without a 2D backend
    ctx.clearRect(0, 0, CANVAS_W, CANVAS_H);
    const payload = this.mapPayload;
    if (!payload) return;
    const nodeAt = new Map(payload.nodes.map((node) => [node.id, node]));

    ctx.strokeStyle = "#8a8a8a";
    ctx.lineWidth = 1;
    for (const edge of payload.edges) {
      const a = nodeAt.get(edge.from);
      const b = nodeAt.get(edge.to);
      if (!a || !b) continue;
      const pa = this.project(a.lat, a.lon);
      const pb = this.project(b.lat, b.lon);
      ctx.beginPath();
      ctx.moveTo(pa.x, pa.y);
      ctx.lineTo(pb.x, pb.y);
      ctx.stroke();
    }

    ctx.fillStyle = "#444";
    for (const node of payload.nodes) {
      const p = this.project(node.lat, node.lon);
      ctx.fillRect(p.x - 2, p.y - 2, 4, 4);
    }

    ctx.fillStyle = "#1d4d3b";
    for (const poi of payload.pois) {
      const p = this.project(poi.lat, poi.lon);
      ctx.beginPath();
      ctx.arc(p.x, p.y, 5, 0, Math.PI * 2);
      ctx.fill();
      ctx.fillText(poi.name, p.x + 7, p.y + 3);
    }

    if (this.route) {
      ctx.strokeStyle = "#c0392b";
      ctx.lineWidth = 3;
      ctx.beginPath();
      this.route.coordinates.forEach((c, i) => {
        const p = this.project(c.lat, c.lon);
        if (i === 0) ctx.moveTo(p.x, p.y);
        else ctx.lineTo(p.x, p.y);
      });
      ctx.stroke();
    }

    ctx.fillStyle = "#c0392b";
    for (const sel of [this.origin, this.destination]) {
      if (!sel) continue;
      const p = this.project(sel.lat, sel.lon);
      ctx.beginPath();
      ctx.arc(p.x, p.y, 6, 0, Math.PI * 2);
      ctx.fill();
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
