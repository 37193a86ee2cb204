import type {
  AvailabilityRow,
  Booking,
  Destination,
  ErrorPayload,
  MapPayload,
  RoutePayload,
  SessionPayload,
  ThreadPayload,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public error: string,
    public detail: string,
  ) {
    super(`${error}: ${detail}`);
  }
}

export interface HoldRequest {
  hotel_id: string;
  room_type: string;
  check_in: string;
  check_out: string;
  rooms: number;
}

/** Thin typed client; attaches the bearer token to every authenticated call
 * and reports expired/revoked sessions through onUnauthorized. */
export class ApiClient {
  token: string | null = null;
  onUnauthorized: (() => void) | null = null;

  constructor(private baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    if (body !== undefined) headers["Content-Type"] = "application/json";
    const res = await fetch(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await res.json();
    if (!res.ok) {
      const err = payload as ErrorPayload;
      if (res.status === 401 && this.token && this.onUnauthorized) this.onUnauthorized();
      throw new ApiError(res.status, err.error ?? "Error", err.detail ?? res.statusText);
    }
    return payload as T;
  }

  // accounts -----------------------------------------------------------------

  register(username: string, password: string): Promise<{ user_id: string }> {
    return this.request("POST", "/api/users", { username, password });
  }

  async login(username: string, password: string): Promise<SessionPayload> {
    const session = await this.request<SessionPayload>("POST", "/api/session", {
      username,
      password,
    });
    this.token = session.token;
    return session;
  }

  async logout(): Promise<void> {
    await this.request("DELETE", "/api/session");
    this.token = null;
  }

  // catalog ------------------------------------------------------------------

  searchDestinations(params: {
    q?: string;
    category?: string;
    near?: string;
    radius_m?: number;
  } = {}): Promise<Destination[]> {
    const qs = new URLSearchParams();
    if (params.q) qs.set("q", params.q);
    if (params.category) qs.set("category", params.category);
    if (params.near) qs.set("near", params.near);
    if (params.radius_m !== undefined) qs.set("radius_m", String(params.radius_m));
    const suffix = qs.size ? `?${qs}` : "";
    return this.request("GET", `/api/destinations${suffix}`);
  }

  getDestination(id: string): Promise<Destination> {
    return this.request("GET", `/api/destinations/${encodeURIComponent(id)}`);
  }

  // map and routing ------------------------------------------------------------

  mapData(bbox: [number, number, number, number]): Promise<MapPayload> {
    return this.request("GET", `/api/map?bbox=${bbox.join(",")}`);
  }

  route(
    from: { lat: number; lon: number },
    to: { lat: number; lon: number },
    metric: "distance" | "time",
  ): Promise<RoutePayload> {
    const qs = new URLSearchParams({
      from: `${from.lat},${from.lon}`,
      to: `${to.lat},${to.lon}`,
      metric,
    });
    return this.request("GET", `/api/route?${qs}`);
  }

  // reservations ----------------------------------------------------------------

  availability(params: {
    check_in: string;
    check_out: string;
    rooms: number;
    near?: string;
    radius_m?: number;
  }): Promise<AvailabilityRow[]> {
    const qs = new URLSearchParams({
      check_in: params.check_in,
      check_out: params.check_out,
      rooms: String(params.rooms),
    });
    if (params.near) qs.set("near", params.near);
    if (params.radius_m !== undefined) qs.set("radius_m", String(params.radius_m));
    return this.request("GET", `/api/hotels/availability?${qs}`);
  }

  holdBooking(body: HoldRequest): Promise<Booking> {
    return this.request("POST", "/api/bookings/hold", body);
  }

  confirmBooking(id: string): Promise<Booking> {
    return this.request("POST", `/api/bookings/${encodeURIComponent(id)}/confirm`);
  }

  cancelBooking(id: string): Promise<Booking> {
    return this.request("DELETE", `/api/bookings/${encodeURIComponent(id)}`);
  }

  getBooking(id: string): Promise<Booking> {
    return this.request("GET", `/api/bookings/${encodeURIComponent(id)}`);
  }

  // community ---------------------------------------------------------------------

  listThreads(destinationId: string): Promise<ThreadPayload[]> {
    return this.request("GET", `/api/destinations/${encodeURIComponent(destinationId)}/threads`);
  }

  createThread(destinationId: string, title: string): Promise<{ thread_id: string }> {
    return this.request("POST", `/api/destinations/${encodeURIComponent(destinationId)}/threads`, {
      title,
    });
  }

  postReply(threadId: string, body: string): Promise<{ post_id: string }> {
    return this.request("POST", `/api/threads/${encodeURIComponent(threadId)}/posts`, { body });
  }
}
