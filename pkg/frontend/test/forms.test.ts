import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiError } from "../src/api.js";
import {
  renderOpenEventForm,
  renderSubscribeDialog,
  showTokenModal,
  validateOpenForm,
} from "../src/forms.js";

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "";
  root = document.createElement("div");
  document.body.appendChild(root);
});

function setInput(name: string, value: string): void {
  const input = root.querySelector<HTMLInputElement>(`input[name="${name}"]`);
  if (!input) throw new Error(`no input ${name}`);
  input.value = value;
}

function submitForm(): void {
  root.querySelector("form")!.dispatchEvent(new Event("submit", { cancelable: true }));
}

async function flush(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
}

describe("validateOpenForm", () => {
  it("rejects zero winners", () => {
    const errors = validateOpenForm({
      name: "x",
      num_winners: "0",
      block_offset: "0",
      announcement_date: "2026-09-01T12:00",
    });
    expect(errors.num_winners).toMatch(/at least one winner/);
  });

  it("accepts a complete form", () => {
    const errors = validateOpenForm({
      name: "x",
      num_winners: "2",
      block_offset: "6",
      announcement_date: "2026-09-01T12:00",
    });
    expect(errors).toEqual({});
  });
});

describe("renderOpenEventForm", () => {
  it("shows an inline error for zero winners and does not submit", () => {
    const submit = vi.fn();
    renderOpenEventForm(root, submit);
    setInput("name", "promo");
    setInput("num_winners", "0");
    setInput("block_offset", "0");
    setInput("announcement_date", "2026-09-01T12:00");
    submitForm();
    expect(submit).not.toHaveBeenCalled();
    expect(root.querySelector('[data-error-for="num_winners"]')!.textContent).toMatch(
      /at least one winner/,
    );
  });

  it("submits UTC and shows the organizer token once", async () => {
    const submit = vi.fn().mockResolvedValue({ organizer_token: "aa".repeat(16) });
    renderOpenEventForm(root, submit);
    setInput("name", "promo");
    setInput("num_winners", "2");
    setInput("block_offset", "6");
    setInput("announcement_date", "2026-09-01T12:00");
    submitForm();
    await flush();

    expect(submit).toHaveBeenCalledTimes(1);
    const body = submit.mock.calls[0][0];
    expect(body.num_winners).toBe(2);
    expect(body.announcement_date).toMatch(/Z$/); // transmitted as UTC

    const token = root.querySelector("code.token");
    expect(token?.textContent).toBe("aa".repeat(16));
    // nothing persisted anywhere
    expect(window.localStorage.length).toBe(0);
    expect(window.sessionStorage.length).toBe(0);
    expect(document.cookie).toBe("");

    (root.querySelector('button[data-action="close"]') as HTMLButtonElement).click();
    expect(root.querySelector("code.token")).toBeNull();
  });

  it("maps a 502 to the beacon-unavailable message", async () => {
    const submit = vi
      .fn()
      .mockRejectedValue(new ApiError(502, "BeaconUnavailable", "giving up"));
    renderOpenEventForm(root, submit);
    setInput("name", "promo");
    setInput("num_winners", "1");
    setInput("block_offset", "0");
    setInput("announcement_date", "2026-09-01T12:00");
    submitForm();
    await flush();
    expect(root.querySelector(".server-error")!.textContent).toMatch(
      /beacon is unavailable/,
    );
  });
});

describe("renderSubscribeDialog", () => {
  it("shows the participant token once on success", async () => {
    const submit = vi.fn().mockResolvedValue({ token: "bb".repeat(16) });
    renderSubscribeDialog(root, "promo", submit);
    setInput("identity", "alice@example.com");
    submitForm();
    await flush();
    expect(submit).toHaveBeenCalledWith("alice@example.com");
    expect(root.querySelector("code.token")!.textContent).toBe("bb".repeat(16));
  });

  it("shows the conflict message for a duplicate", async () => {
    const submit = vi
      .fn()
      .mockRejectedValue(new ApiError(409, "DuplicateMember", "digest exists"));
    renderSubscribeDialog(root, "promo", submit);
    setInput("identity", "alice@example.com");
    submitForm();
    await flush();
    expect(root.querySelector(".server-error")!.textContent).toMatch(/Already subscribed/);
  });

  it("shows the deadline message after the date", async () => {
    const submit = vi
      .fn()
      .mockRejectedValue(new ApiError(410, "PastDeadline", "too late"));
    renderSubscribeDialog(root, "promo", submit);
    setInput("identity", "alice@example.com");
    submitForm();
    await flush();
    expect(root.querySelector(".server-error")!.textContent).toMatch(/date has passed/);
  });
});

describe("showTokenModal", () => {
  it("copies the token via the clipboard control", async () => {
    const writeText = vi.fn().mockResolvedValue(undefined);
    Object.defineProperty(navigator, "clipboard", {
      value: { writeText },
      configurable: true,
    });
    showTokenModal(root, "Token", "cc".repeat(16));
    (root.querySelector('button[data-action="copy"]') as HTMLButtonElement).click();
    expect(writeText).toHaveBeenCalledWith("cc".repeat(16));
  });
});
