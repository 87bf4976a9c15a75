/** SVG renderers for the dashboard. Pure string functions: data in,
 * markup out, no DOM, so they run unchanged under node tests. */

import { escapeHtml, fmtDays } from "./format.js";
import type { Survival } from "./types.js";

const W = 640;
const H = 260;
const PAD = { left: 44, right: 16, top: 12, bottom: 30 };

function placeholder(label: string): string {
  return `<div class="placeholder">no data<span>${escapeHtml(label)}</span></div>`;
}

function points(
  grid: number[],
  curve: number[],
  px: (d: number) => number,
  py: (v: number) => number,
): string {
  return grid
    .map((d, i) => `${px(d).toFixed(1)},${py(curve[i]).toFixed(1)}`)
    .join(" ");
}

/** Survival fractions on a log-time axis: one polyline per curve, the 5%
 * cutoff as a dashed vertical marker when the data supports one. */
export function survivalChart(s: Survival): string {
  if (s.count === 0 || s.grid_days.length === 0) {
    return placeholder("survival");
  }
  const innerW = W - PAD.left - PAD.right;
  const innerH = H - PAD.top - PAD.bottom;
  const lo = Math.log10(s.grid_days[0]);
  const hi = Math.log10(s.grid_days[s.grid_days.length - 1]);
  const span = hi - lo || 1;
  const px = (d: number) => PAD.left + ((Math.log10(d) - lo) / span) * innerW;
  const py = (v: number) => PAD.top + (1 - v) * innerH;

  const yLines = [0, 0.25, 0.5, 0.75, 1]
    .map((v) => {
      const y = py(v).toFixed(1);
      return (
        `<line class="grid" x1="${PAD.left}" y1="${y}" x2="${W - PAD.right}" y2="${y}"/>` +
        `<text class="tick" x="${PAD.left - 6}" y="${y}" text-anchor="end" dominant-baseline="middle">${(v * 100).toFixed(0)}%</text>`
      );
    })
    .join("");

  const tickCount = 4;
  const xTicks = Array.from({ length: tickCount + 1 }, (_, i) => {
    const d = Math.pow(10, lo + (span * i) / tickCount);
    const x = px(d).toFixed(1);
    return (
      `<line class="grid" x1="${x}" y1="${PAD.top}" x2="${x}" y2="${H - PAD.bottom}"/>` +
      `<text class="tick" x="${x}" y="${H - PAD.bottom + 16}" text-anchor="middle">${fmtDays(d)}</text>`
    );
  }).join("");

  let cutoff = "";
  if (s.cutoff_95_days !== null) {
    const x = px(s.cutoff_95_days).toFixed(1);
    cutoff =
      `<line class="cutoff" x1="${x}" y1="${PAD.top}" x2="${x}" y2="${H - PAD.bottom}" stroke-dasharray="4 3"/>` +
      `<text class="tick cutoff-label" x="${x}" y="${PAD.top + 10}" text-anchor="start"> 95% dead at ${fmtDays(s.cutoff_95_days)}</text>`;
  }

  return (
    `<svg viewBox="0 0 ${W} ${H}" role="img" aria-label="survival curves">` +
    yLines +
    xTicks +
    `<polyline class="curve gap" fill="none" points="${points(s.grid_days, s.gap_curve, px, py)}"/>` +
    `<polyline class="curve duration" fill="none" points="${points(s.grid_days, s.duration_curve, px, py)}"/>` +
    cutoff +
    `</svg>` +
    `<div class="legend"><span class="key gap"></span>response gaps` +
    `<span class="key duration"></span>engagement duration` +
    ` · ${s.count} engagement${s.count === 1 ? "" : "s"}</div>`
  );
}

/** Vertical bar chart for bucketed counts, in the bucket order given. */
export function histogram(buckets: Record<string, number>, label: string): string {
  const entries = Object.entries(buckets);
  const max = Math.max(0, ...entries.map(([, n]) => n));
  if (entries.length === 0 || max === 0) {
    return placeholder(label);
  }
  const innerW = W - PAD.left - PAD.right;
  const innerH = H - PAD.top - PAD.bottom;
  const slot = innerW / entries.length;
  const barW = Math.min(64, slot * 0.6);
  const bars = entries
    .map(([name, count], i) => {
      const h = (count / max) * (innerH - 16);
      const x = PAD.left + slot * i + (slot - barW) / 2;
      const y = PAD.top + (innerH - h);
      const mid = (x + barW / 2).toFixed(1);
      return (
        `<rect class="bar" x="${x.toFixed(1)}" y="${y.toFixed(1)}" width="${barW.toFixed(1)}" height="${h.toFixed(1)}"/>` +
        `<text class="count" x="${mid}" y="${(y - 4).toFixed(1)}" text-anchor="middle">${count}</text>` +
        `<text class="tick" x="${mid}" y="${H - PAD.bottom + 16}" text-anchor="middle">${escapeHtml(name)}</text>`
      );
    })
    .join("");
  return `<svg viewBox="0 0 ${W} ${H}" role="img" aria-label="${escapeHtml(label)}">${bars}</svg>`;
}
