// Payload shapes as served by the API. Numeric fields are displayed verbatim:
// the client never recomputes a distance, price or availability figure.

export interface SessionPayload {
  token: string;
  user_id: string;
  username: string;
  role: string;
  issued_at: number;
  expires_at: number;
}

export interface Destination {
  id: string;
  name: string;
  category: string;
  lat: number;
  lon: number;
  description: string;
  media: string[];
  open_info: string;
  manager_id: string | null;
}

export interface RouteLeg {
  from: string;
  to: string;
  length_m: number;
  mode: string;
}

export interface RoutePayload {
  from_node: string;
  to_node: string;
  nodes: string[];
  coordinates: { id: string; lat: number; lon: number }[];
  legs: RouteLeg[];
  total_length_m: number;
  est_time_s: number;
  metric: "distance" | "time";
}

export interface MapNode {
  id: string;
  lat: number;
  lon: number;
}

export interface MapEdge {
  from: string;
  to: string;
  length_m: number;
  mode: string;
}

export interface MapPayload {
  bbox: [number, number, number, number]; // s, w, n, e
  nodes: MapNode[];
  edges: MapEdge[];
  pois: Destination[];
}

export interface AvailabilityRow {
  hotel_id: string;
  room_type: string;
  available: number;
  nightly_rate_minor: number;
}

export interface Booking {
  id: string;
  guest_id: string;
  hotel_id: string;
  room_type: string;
  check_in: string;
  check_out: string;
  rooms: number;
  state: "held" | "confirmed" | "cancelled" | "expired";
  hold_expires_at: number | null;
}

export interface PostPayload {
  id: string;
  thread_id: string;
  author_id: string;
  body: string;
  created_at: number;
}

export interface ThreadPayload {
  id: string;
  destination_id: string;
  title: string;
  author_id: string;
  created_at: number;
  posts: PostPayload[];
}

export interface ErrorPayload {
  error: string;
  detail: string;
}
