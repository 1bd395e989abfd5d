// Typed client for the lottery service JSON contract.

export interface EventView {
  event_id: string;
  name: string;
  announcement_date: string;
  num_winners: number;
  block_offset: number;
  target_height: number;
  note: string;
  channel_id: string;
  status: "REGISTERED" | "DRAWN";
  open_tx_id: string;
  subscribe_tx_ids: string[];
  draw_tx_id: string | null;
  member_list: string[];
  participant_count: number;
  winner_list: string[];
  random_seed: string | null;
  verifiable_random_key: string | null;
  can_subscribe: boolean;
  can_draw: boolean;
  can_check: boolean;
  can_verify: boolean;
}

export interface OpenEventRequest {
  name: string;
  announcement_date: string;
  num_winners: number;
  block_offset: number;
  note: string;
}

export interface OpenEventResult {
  event_id: string;
  organizer_token: string;
  target_height: number;
  open_tx_id: string;
}

export interface DrawResult {
  event_id: string;
  status: string;
  winner_list: string[];
  verifiable_random_key: string;
  random_seed: string;
  draw_tx_id: string;
}

export interface VerificationReport {
  event_id: string;
  all_ok: boolean;
  seed_ok: boolean;
  event_integrity_ok: boolean;
  winner_recomputation_ok: boolean;
  majority_ok: boolean;
  details: { check: string; message: string }[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let code = "error";
  let message = `HTTP ${response.status}`;
  try {
    const body = await response.json();
    code = body.error ?? code;
    message = body.message ?? message;
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(response.status, code, message);
}

export class BlockLotClient {
  constructor(private baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      await parseError(response);
    }
    return (await response.json()) as T;
  }

  listEvents(): Promise<EventView[]> {
    return this.request("/events");
  }

  getEvent(eventId: string): Promise<EventView> {
    return this.request(`/events/${eventId}`);
  }

  openEvent(body: OpenEventRequest): Promise<OpenEventResult> {
    return this.request("/events", { method: "POST", body: JSON.stringify(body) });
  }

  subscribe(eventId: string, identity: string): Promise<{ token: string }> {
    return this.request(`/events/${eventId}/subscribe`, {
      method: "POST",
      body: JSON.stringify({ identity }),
    });
  }

  draw(eventId: string, organizerToken: string): Promise<DrawResult> {
    return this.request(`/events/${eventId}/draw`, {
      method: "POST",
      body: JSON.stringify({ organizer_token: organizerToken }),
    });
  }

  check(eventId: string, identity: string, token: string): Promise<{ winner: boolean }> {
    const params = new URLSearchParams({ identity, token });
    return this.request(`/events/${eventId}/check?${params}`);
  }

  verify(eventId: string): Promise<VerificationReport> {
    return this.request(`/events/${eventId}/verify`);
  }
}

/** Convert a datetime-local input value (organizer's zone) to ISO UTC. */
export function localInputToUtc(value: string): string {
  const parsed = new Date(value);
  if (Number.isNaN(parsed.getTime())) {
    throw new Error(`not a date: ${value}`);
  }
  return parsed.toISOString().replace(/\.\d{3}Z$/, "Z");
}
