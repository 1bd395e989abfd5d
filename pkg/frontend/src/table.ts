// Lottery table: one row per event, action buttons gated by the
// server-reported availability flags (the client never consults its
// own clock or chain view).

import type { EventView } from "./api.js";

export interface TableActions {
  onSubscribe: (event: EventView) => void;
  onDraw: (event: EventView) => void;
  onCheck: (event: EventView) => void;
  onVerify: (event: EventView) => void;
  onInfo: (event: EventView) => void;
  onOpen: () => void;
}

const COLUMNS = ["Event name", "Announcement date", "Participants", "Winners", "Status", "Actions"];

function actionButton(
  label: string,
  action: string,
  enabled: boolean,
  onClick: () => void,
): HTMLButtonElement {
  const button = document.createElement("button");
  button.textContent = label;
  button.dataset.action = action;
  button.disabled = !enabled;
  button.addEventListener("click", onClick);
  return button;
}

export function renderEventTable(
  container: HTMLElement,
  events: EventView[],
  actions: TableActions,
): void {
  container.textContent = "";

  const table = document.createElement("table");
  table.className = "lottery-table";

  const head = table.createTHead().insertRow();
  for (const column of COLUMNS) {
    const cell = document.createElement("th");
    cell.textContent = column;
    head.appendChild(cell);
  }

  const body = table.createTBody();
  for (const event of events) {
    const row = body.insertRow();
    row.dataset.eventId = event.event_id;
    row.insertCell().textContent = event.name;
    row.insertCell().textContent = event.announcement_date;
    row.insertCell().textContent = String(event.participant_count);
    row.insertCell().textContent = String(event.num_winners);
    const status = row.insertCell();
    status.textContent = event.status;
    status.className = event.status === "DRAWN" ? "status-drawn" : "status-registered";

    const cell = row.insertCell();
    cell.className = "actions";
    cell.appendChild(
      actionButton("subs.", "subscribe", event.can_subscribe, () => actions.onSubscribe(event)),
    );
    cell.appendChild(actionButton("draw", "draw", event.can_draw, () => actions.onDraw(event)));
    cell.appendChild(actionButton("check", "check", event.can_check, () => actions.onCheck(event)));
    cell.appendChild(
      actionButton("verify", "verify", event.can_verify, () => actions.onVerify(event)),
    );
    cell.appendChild(actionButton("info", "info", true, () => actions.onInfo(event)));
  }

  container.appendChild(table);

  const openButton = document.createElement("button");
  openButton.textContent = "+";
  openButton.className = "open-button";
  openButton.dataset.action = "open";
  openButton.title = "Open a new lottery event";
  openButton.addEventListener("click", () => actions.onOpen());
  container.appendChild(openButton);
}

export function renderErrorBanner(container: HTMLElement, message: string, onRetry: () => void): void {
  container.textContent = "";
  const banner = document.createElement("div");
  banner.className = "error-banner";
  const text = document.createElement("span");
  text.textContent = message;
  banner.appendChild(text);
  const retry = document.createElement("button");
  retry.textContent = "Retry";
  retry.dataset.action = "retry";
  retry.addEventListener("click", onRetry);
  banner.appendChild(retry);
  container.appendChild(banner);
}
