// Contract tests against a real api-service process: the table, the
// open form round trip, and the verify panel for one clean and one
// tampered event.

import { spawn, type ChildProcess } from "node:child_process";
import net from "node:net";
import path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { BlockLotClient } from "../src/api.js";
import { renderEventTable } from "../src/table.js";
import { renderVerifyPanel } from "../src/verify.js";
import { noopActions } from "./helpers.js";

const REPO_ROOT = path.resolve(__dirname, "..", "..");

let service: ChildProcess;
let baseUrl: string;
let client: BlockLotClient;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = net.createServer();
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address() as net.AddressInfo;
      probe.close(() => resolve(address.port));
    });
    probe.on("error", reject);
  });
}

async function waitForService(url: string): Promise<void> {
  const deadline = Date.now() + 20_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${url}/events`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await sleep(150);
  }
  throw new Error("service did not become ready");
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

function isoSecondsFromNow(ms: number): string {
  return new Date(Date.now() + ms).toISOString().replace(/\.\d{3}Z$/, "Z");
}

beforeAll(async () => {
  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  service = spawn(
    "python3",
    ["-m", "blocklot.cli", "serve", "--listen", `127.0.0.1:${port}`,
     "--beacon-mode", "FIXTURE",
     "--beacon-fixture", path.join(REPO_ROOT, "fixtures", "bitcoin_headers.csv"),
     "--confirmation-depth", "0"],
    {
      cwd: REPO_ROOT,
      env: { ...process.env, BLOCKLOT_ENABLE_FAULT_HOOKS: "1" },
      stdio: "ignore",
    },
  );
  await waitForService(baseUrl);
  client = new BlockLotClient(baseUrl);
});

afterAll(() => {
  service?.kill();
});

describe("against a running api-service", () => {
  it("round-trips an open form submission into the table", async () => {
    const opened = await client.openEvent({
      name: "ui-contract",
      announcement_date: isoSecondsFromNow(3_000),
      num_winners: 1,
      block_offset: 0,
      note: "from the browser",
    });
    expect(opened.organizer_token).toMatch(/^[0-9a-f]{32}$/);
    expect(opened.target_height).toBe(839900);

    const events = await client.listEvents();
    const mine = events.find((event) => event.event_id === opened.event_id);
    expect(mine).toBeDefined();
    expect(mine!.name).toBe("ui-contract");

    const host = document.createElement("div");
    document.body.appendChild(host);
    renderEventTable(host, events, noopActions());
    const headers = [...host.querySelectorAll("th")].map((th) => th.textContent);
    expect(headers.slice(0, 4)).toEqual([
      "Event name",
      "Announcement date",
      "Participants",
      "Winners",
    ]);
    const row = host.querySelector<HTMLElement>(`tr[data-event-id="${opened.event_id}"]`)!;
    const cells = [...row.querySelectorAll("td")].map((td) => td.textContent);
    expect(cells[0]).toBe("ui-contract");
    expect(cells[2]).toBe("0");
    expect(cells[3]).toBe("1");
  });

  it("renders the verify panel for a clean and a tampered event", async () => {
    const opened = await client.openEvent({
      name: "ui-verify",
      announcement_date: isoSecondsFromNow(2_000),
      num_winners: 1,
      block_offset: 0,
      note: "",
    });
    for (const identity of ["ann@example.com", "ben@example.com", "cam@example.com"]) {
      await client.subscribe(opened.event_id, identity);
    }
    await sleep(2_200); // let the announcement date pass
    const drawn = await client.draw(opened.event_id, opened.organizer_token);
    expect(drawn.status).toBe("DRAWN");
    expect(drawn.winner_list).toHaveLength(1);

    const host = document.createElement("div");
    document.body.appendChild(host);

    const clean = await client.verify(opened.event_id);
    renderVerifyPanel(host, clean);
    expect(host.querySelector(".badge")!.textContent).toBe("VERIFIED");
    expect(host.querySelectorAll(".check-pass")).toHaveLength(4);
    expect(host.querySelectorAll(".check-fail")).toHaveLength(0);

    // hack one replica: the service's local copy now disagrees with
    // both its own commitment key and the majority of peers
    await fetch(`${baseUrl}/_faults/corrupt`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ peer_id: "peer0" }),
    });
    const tampered = await client.verify(opened.event_id);
    renderVerifyPanel(host, tampered);
    expect(host.querySelector(".badge")!.textContent).toBe("VERIFICATION FAILED");
    const failed = [...host.querySelectorAll(".check-fail")].map((li) => li.textContent);
    expect(failed).toContain("Event information integrity: FAIL");
    expect(failed).toContain("Majority peer agreement: FAIL");
    const passed = [...host.querySelectorAll(".check-pass")].map((li) => li.textContent);
    expect(passed).toContain("Random seed integrity: pass");
    expect(passed).toContain("Winner list recomputation: pass");

    await fetch(`${baseUrl}/_faults/restore`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ peer_id: "peer0" }),
    });
    const healed = await client.verify(opened.event_id);
    renderVerifyPanel(host, healed);
    expect(host.querySelector(".badge")!.textContent).toBe("VERIFIED");
  });

  it("exposes winner checking through the client", async () => {
    const opened = await client.openEvent({
      name: "ui-check",
      announcement_date: isoSecondsFromNow(1_500),
      num_winners: 1,
      block_offset: 0,
      note: "",
    });
    const tokens = new Map<string, string>();
    for (const identity of ["a@x", "b@x", "c@x"]) {
      const subscribed = await client.subscribe(opened.event_id, identity);
      tokens.set(identity, subscribed.token);
    }
    await sleep(1_700);
    await client.draw(opened.event_id, opened.organizer_token);
    let winners = 0;
    for (const [identity, token] of tokens) {
      const result = await client.check(opened.event_id, identity, token);
      if (result.winner) winners += 1;
    }
    expect(winners).toBe(1);
  });
});
