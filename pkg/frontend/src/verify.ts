// Verification panel: the four checks rendered pass/fail with an
// overall badge that is their conjunction.

import type { VerificationReport } from "./api.js";

const CHECKS: { key: keyof VerificationReport; label: string }[] = [
  { key: "seed_ok", label: "Random seed integrity" },
  { key: "event_integrity_ok", label: "Event information integrity" },
  { key: "winner_recomputation_ok", label: "Winner list recomputation" },
  { key: "majority_ok", label: "Majority peer agreement" },
];

export function renderVerifyPanel(
  container: HTMLElement,
  report: VerificationReport | null,
): void {
  container.textContent = "";
  const panel = document.createElement("div");
  panel.className = "verify-panel";

  if (report === null) {
    panel.classList.add("disabled");
    const note = document.createElement("p");
    note.textContent = "Verification becomes available after the draw.";
    panel.appendChild(note);
    container.appendChild(panel);
    return;
  }

  const badge = document.createElement("div");
  const allOk = CHECKS.every(({ key }) => report[key] === true);
  badge.className = allOk ? "badge badge-pass" : "badge badge-fail";
  badge.textContent = allOk ? "VERIFIED" : "VERIFICATION FAILED";
  panel.appendChild(badge);

  const list = document.createElement("ul");
  list.className = "check-list";
  for (const { key, label } of CHECKS) {
    const item = document.createElement("li");
    const passed = report[key] === true;
    item.dataset.check = key;
    item.className = passed ? "check-pass" : "check-fail";
    item.textContent = `${label}: ${passed ? "pass" : "FAIL"}`;
    list.appendChild(item);
  }
  panel.appendChild(list);

  if (report.details.length > 0) {
    const details = document.createElement("ul");
    details.className = "check-details";
    for (const detail of report.details) {
      const item = document.createElement("li");
      item.textContent = `${detail.check}: ${detail.message}`;
      details.appendChild(item);
    }
    panel.appendChild(details);
  }

  container.appendChild(panel);
}
