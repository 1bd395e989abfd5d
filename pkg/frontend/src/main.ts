// Application wiring: poll the event list, route row actions to
// dialogs, and re-read server state after every mutation (the UI is
// never optimistic).

import { ApiError, BlockLotClient } from "./api.js";
import type { EventView } from "./api.js";
import { renderErrorBanner, renderEventTable } from "./table.js";
import { renderOpenEventForm, renderSubscribeDialog, serverErrorMessage } from "./forms.js";
import { renderVerifyPanel } from "./verify.js";

const POLL_INTERVAL_MS = 2000;

function promptIn(root: HTMLElement, title: string, fields: string[]): Promise<string[] | null> {
  return new Promise((resolve) => {
    const overlay = document.createElement("div");
    overlay.className = "modal-overlay";
    const box = document.createElement("div");
    box.className = "modal";
    const heading = document.createElement("h2");
    heading.textContent = title;
    box.appendChild(heading);
    const form = document.createElement("form");
    const inputs: HTMLInputElement[] = [];
    for (const field of fields) {
      const label = document.createElement("label");
      label.textContent = field;
      const input = document.createElement("input");
      input.type = "text";
      label.appendChild(input);
      form.appendChild(label);
      inputs.push(input);
    }
    const ok = document.createElement("button");
    ok.type = "submit";
    ok.textContent = "OK";
    form.appendChild(ok);
    const cancel = document.createElement("button");
    cancel.type = "button";
    cancel.textContent = "Cancel";
    cancel.addEventListener("click", () => {
      overlay.remove();
      resolve(null);
    });
    form.appendChild(cancel);
    form.addEventListener("submit", (raised) => {
      raised.preventDefault();
      overlay.remove();
      resolve(inputs.map((input) => input.value));
    });
    box.appendChild(form);
    overlay.appendChild(box);
    root.appendChild(overlay);
  });
}

function showMessage(root: HTMLElement, title: string, message: string): void {
  const overlay = document.createElement("div");
  overlay.className = "modal-overlay";
  const box = document.createElement("div");
  box.className = "modal";
  const heading = document.createElement("h2");
  heading.textContent = title;
  box.appendChild(heading);
  const body = document.createElement("p");
  body.textContent = message;
  box.appendChild(body);
  const close = document.createElement("button");
  close.textContent = "Close";
  close.addEventListener("click", () => overlay.remove());
  box.appendChild(close);
  overlay.appendChild(box);
  root.appendChild(overlay);
}

function eventInfoText(event: EventView): string {
  const lines = [
    `id: ${event.event_id}`,
    `target block height: ${event.target_height} (offset ${event.block_offset})`,
    `status: ${event.status}`,
    `note: ${event.note || "(none)"}`,
    `random seed: ${event.random_seed ?? "not drawn yet"}`,
    `verifiable key: ${event.verifiable_random_key ?? "not drawn yet"}`,
  ];
  return lines.join("\n");
}

export function startApp(root: HTMLElement, client: BlockLotClient): { stop: () => void } {
  root.textContent = "";
  const tableHost = document.createElement("div");
  tableHost.id = "table-host";
  const panelHost = document.createElement("div");
  panelHost.id = "panel-host";
  root.appendChild(tableHost);
  root.appendChild(panelHost);

  let timer: ReturnType<typeof setInterval> | null = null;

  const refresh = async (): Promise<void> => {
    try {
      const events = await client.listEvents();
      renderEventTable(tableHost, events, actions);
    } catch (error) {
      renderErrorBanner(
        tableHost,
        `Cannot reach the lottery service: ${serverErrorMessage(error)}`,
        () => void refresh(),
      );
    }
  };

  const actions = {
    onOpen: () => {
      renderOpenEventForm(root, (body) => client.openEvent(body), () => void refresh());
    },
    onSubscribe: (event: EventView) => {
      renderSubscribeDialog(
        root,
        event.name,
        (identity) => client.subscribe(event.event_id, identity),
        () => void refresh(),
      );
    },
    onDraw: (event: EventView) => {
      void promptIn(root, `Draw winners for ${event.name}`, ["Organizer token"]).then(
        (values) => {
          if (!values) return;
          client
            .draw(event.event_id, values[0].trim())
            .then((result) => {
              showMessage(
                root,
                "Winners drawn",
                `seed ${result.random_seed}\n` + result.winner_list.join("\n"),
              );
            })
            .catch((error) => showMessage(root, "Draw failed", serverErrorMessage(error)))
            .finally(() => void refresh());
        },
      );
    },
    onCheck: (event: EventView) => {
      void promptIn(root, `Check a ticket for ${event.name}`, [
        "Identity",
        "Participant token",
      ]).then((values) => {
        if (!values) return;
        client
          .check(event.event_id, values[0].trim(), values[1].trim())
          .then((result) =>
            showMessage(
              root,
              "Ticket check",
              result.winner ? "WINNER" : "Not a winner.",
            ),
          )
          .catch((error) => showMessage(root, "Check failed", serverErrorMessage(error)));
      });
    },
    onVerify: (event: EventView) => {
      client
        .verify(event.event_id)
        .then((report) => renderVerifyPanel(panelHost, report))
        .catch((error) => {
          if (error instanceof ApiError && error.code === "NotDrawn") {
            renderVerifyPanel(panelHost, null);
          } else {
            showMessage(root, "Verification failed", serverErrorMessage(error));
          }
        });
    },
    onInfo: (event: EventView) => {
      showMessage(root, event.name, eventInfoText(event));
    },
  };

  void refresh();
  timer = setInterval(() => void refresh(), POLL_INTERVAL_MS);
  return {
    stop: () => {
      if (timer !== null) clearInterval(timer);
    },
  };
}

declare global {
  interface Window {
    __blocklotStarted?: boolean;
  }
}

// Browser entry point; tests import startApp directly instead.
if (typeof document !== "undefined" && document.getElementById("app") && !window.__blocklotStarted) {
  window.__blocklotStarted = true;
  startApp(document.getElementById("app") as HTMLElement, new BlockLotClient(""));
}
