import type { EventView } from "../src/api.js";
import type { TableActions } from "../src/table.js";

export function makeEvent(overrides: Partial<EventView> = {}): EventView {
  return {
    event_id: "00112233445566778899aabbccddeeff",
    name: "spring promo",
    announcement_date: "2026-09-01T12:00:00Z",
    num_winners: 2,
    block_offset: 6,
    target_height: 839906,
    note: "",
    channel_id: "blocklot",
    status: "REGISTERED",
    open_tx_id: "tx-open",
    subscribe_tx_ids: [],
    draw_tx_id: null,
    member_list: [],
    participant_count: 0,
    winner_list: [],
    random_seed: null,
    verifiable_random_key: null,
    can_subscribe: true,
    can_draw: false,
    can_check: false,
    can_verify: false,
    ...overrides,
  };
}

export function noopActions(): TableActions {
  return {
    onSubscribe: () => {},
    onDraw: () => {},
    onCheck: () => {},
    onVerify: () => {},
    onInfo: () => {},
    onOpen: () => {},
  };
}

export function button(root: HTMLElement, action: string): HTMLButtonElement {
  const found = root.querySelector<HTMLButtonElement>(`button[data-action="${action}"]`);
  if (!found) throw new Error(`no button with action ${action}`);
  return found;
}
