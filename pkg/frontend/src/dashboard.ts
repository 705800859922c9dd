import type { StatsEntry } from "./types.js";

/** Render the emotion-frequency chart: one bar per label, as returned. */
export function renderDashboard(root: HTMLElement, entries: StatsEntry[]): void {
  const doc = root.ownerDocument;
  root.replaceChildren();
  if (entries.length === 0) {
    const empty = doc.createElement("p");
    empty.className = "dashboard-empty";
    empty.textContent = "no data yet";
    root.appendChild(empty);
    return;
  }
  for (const entry of entries) {
    const row = doc.createElement("div");
    row.className = "dashboard-row";
    row.dataset.label = entry.label;
    const label = doc.createElement("span");
    label.className = "dashboard-label";
    label.textContent = entry.label;
    const bar = doc.createElement("div");
    bar.className = "dashboard-bar";
    const percent = Math.round(entry.proportion * 100);
    bar.style.width = `${percent}%`;
    bar.textContent = `${percent}%`;
    row.append(label, bar);
    root.appendChild(row);
  }
}
