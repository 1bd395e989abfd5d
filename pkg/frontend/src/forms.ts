// Open-event form, subscribe dialog, and the one-time token modal.
// Tokens exist only inside the modal DOM node; nothing is written to
// localStorage, sessionStorage, or cookies.

import { ApiError, localInputToUtc } from "./api.js";
import type { OpenEventRequest } from "./api.js";

function modalShell(title: string): { overlay: HTMLElement; box: HTMLElement } {
  const overlay = document.createElement("div");
  overlay.className = "modal-overlay";
  const box = document.createElement("div");
  box.className = "modal";
  const heading = document.createElement("h2");
  heading.textContent = title;
  box.appendChild(heading);
  overlay.appendChild(box);
  return { overlay, box };
}

function closeButton(overlay: HTMLElement, onClose?: () => void): HTMLButtonElement {
  const button = document.createElement("button");
  button.textContent = "Close";
  button.dataset.action = "close";
  button.addEventListener("click", () => {
    overlay.remove();
    onClose?.();
  });
  return button;
}

/** Show a secret exactly once; it disappears with the modal. */
export function showTokenModal(
  root: HTMLElement,
  title: string,
  token: string,
  onClose?: () => void,
): void {
  const { overlay, box } = modalShell(title);
  const warning = document.createElement("p");
  warning.textContent =
    "Store this token now. It is shown only once and cannot be recovered.";
  box.appendChild(warning);
  const secret = document.createElement("code");
  secret.className = "token";
  secret.textContent = token;
  box.appendChild(secret);
  const copy = document.createElement("button");
  copy.textContent = "Copy";
  copy.dataset.action = "copy";
  copy.addEventListener("click", () => {
    void navigator.clipboard?.writeText(token);
    copy.textContent = "Copied";
  });
  box.appendChild(copy);
  box.appendChild(closeButton(overlay, onClose));
  root.appendChild(overlay);
}

interface FieldSpec {
  name: string;
  label: string;
  type: "text" | "number" | "datetime-local";
  required?: boolean;
}

const OPEN_FIELDS: FieldSpec[] = [
  { name: "name", label: "Event name", type: "text", required: true },
  { name: "num_winners", label: "Number of winners", type: "number", required: true },
  { name: "announcement_date", label: "Announcement date", type: "datetime-local", required: true },
  { name: "block_offset", label: "Block offset", type: "number", required: true },
  { name: "note", label: "Note", type: "text" },
];

function fieldError(form: HTMLFormElement, field: string, message: string): void {
  const slot = form.querySelector<HTMLElement>(`[data-error-for="${field}"]`);
  if (slot) slot.textContent = message;
}

function clearErrors(form: HTMLFormElement): void {
  form.querySelectorAll<HTMLElement>("[data-error-for]").forEach((slot) => {
    slot.textContent = "";
  });
  const server = form.querySelector<HTMLElement>(".server-error");
  if (server) server.textContent = "";
}

/** Client-side validation mirroring the server's 400 rules. */
export function validateOpenForm(values: Record<string, string>): Record<string, string> {
  const errors: Record<string, string> = {};
  if (!values.name?.trim()) {
    errors.name = "event name is required";
  }
  const winners = Number(values.num_winners);
  if (!Number.isInteger(winners) || winners < 1) {
    errors.num_winners = "at least one winner is required";
  }
  const offset = Number(values.block_offset);
  if (!Number.isInteger(offset) || offset < 0) {
    errors.block_offset = "block offset must be a non-negative integer";
  }
  if (!values.announcement_date) {
    errors.announcement_date = "announcement date is required";
  } else {
    try {
      localInputToUtc(values.announcement_date);
    } catch {
      errors.announcement_date = "not a valid date";
    }
  }
  return errors;
}

export function serverErrorMessage(error: unknown): string {
  if (error instanceof ApiError) {
    if (error.status === 502) {
      return "The block beacon is unavailable; try again in a moment.";
    }
    if (error.code === "DuplicateMember") {
      return "Already subscribed: this identity is taken for this event.";
    }
    if (error.code === "PastDeadline") {
      return "The announcement date has passed; subscriptions are closed.";
    }
    if (error.code === "TooEarly") {
      return "Not yet: the announcement date or the target block has not been reached.";
    }
    return error.message;
  }
  return String(error);
}

export function renderOpenEventForm(
  root: HTMLElement,
  submit: (body: OpenEventRequest) => Promise<{ organizer_token: string }>,
  onDone?: () => void,
): void {
  const { overlay, box } = modalShell("Open a lottery event");
  const form = document.createElement("form");
  form.className = "open-form";
  form.noValidate = true;

  for (const spec of OPEN_FIELDS) {
    const label = document.createElement("label");
    label.textContent = spec.label;
    const input = document.createElement("input");
    input.name = spec.name;
    input.type = spec.type;
    if (spec.type === "number") input.min = "0";
    label.appendChild(input);
    const error = document.createElement("span");
    error.className = "field-error";
    error.dataset.errorFor = spec.name;
    label.appendChild(error);
    form.appendChild(label);
  }

  const serverError = document.createElement("p");
  serverError.className = "server-error";
  form.appendChild(serverError);

  const submitButton = document.createElement("button");
  submitButton.type = "submit";
  submitButton.textContent = "Open event";
  form.appendChild(submitButton);
  form.appendChild(closeButton(overlay, onDone));

  form.addEventListener("submit", (raised) => {
    raised.preventDefault();
    clearErrors(form);
    const values: Record<string, string> = {};
    for (const spec of OPEN_FIELDS) {
      values[spec.name] = (form.elements.namedItem(spec.name) as HTMLInputElement).value;
    }
    const errors = validateOpenForm(values);
    if (Object.keys(errors).length > 0) {
      for (const [field, message] of Object.entries(errors)) {
        fieldError(form, field, message);
      }
      return;
    }
    submitButton.disabled = true;
    submit({
      name: values.name.trim(),
      announcement_date: localInputToUtc(values.announcement_date),
      num_winners: Number(values.num_winners),
      block_offset: Number(values.block_offset),
      note: values.note ?? "",
    })
      .then((result) => {
        overlay.remove();
        showTokenModal(root, "Organizer token", result.organizer_token, onDone);
      })
      .catch((error) => {
        submitButton.disabled = false;
        serverError.textContent = serverErrorMessage(error);
      });
  });

  box.appendChild(form);
  root.appendChild(overlay);
}

export function renderSubscribeDialog(
  root: HTMLElement,
  eventName: string,
  submit: (identity: string) => Promise<{ token: string }>,
  onDone?: () => void,
): void {
  const { overlay, box } = modalShell(`Subscribe to ${eventName}`);
  const form = document.createElement("form");
  form.noValidate = true;

  const label = document.createElement("label");
  label.textContent = "Your name or e-mail address";
  const input = document.createElement("input");
  input.name = "identity";
  input.type = "text";
  label.appendChild(input);
  const error = document.createElement("span");
  error.className = "field-error";
  error.dataset.errorFor = "identity";
  label.appendChild(error);
  form.appendChild(label);

  const serverError = document.createElement("p");
  serverError.className = "server-error";
  form.appendChild(serverError);

  const submitButton = document.createElement("button");
  submitButton.type = "submit";
  submitButton.textContent = "Subscribe";
  form.appendChild(submitButton);
  form.appendChild(closeButton(overlay, onDone));

  form.addEventListener("submit", (raised) => {
    raised.preventDefault();
    clearErrors(form);
    const identity = input.value.trim();
    if (!identity) {
      fieldError(form, "identity", "an identity is required");
      return;
    }
    submitButton.disabled = true;
    submit(identity)
      .then((result) => {
        overlay.remove();
        showTokenModal(root, "Participant token", result.token, onDone);
      })
      .catch((err) => {
        submitButton.disabled = false;
        serverError.textContent = serverErrorMessage(err);
      });
  });

  box.appendChild(form);
  root.appendChild(overlay);
}
