export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** Format a rate for a headline card. Undefined metrics (empty
 * denominators) arrive as null and must read as absence, not as 0%. */
export function pct(value: number | null | undefined, digits = 1): string {
  if (value === null || value === undefined) {
    return "no data";
  }
  return `${(value * 100).toFixed(digits)}%`;
}

function trimTrailingZero(text: string): string {
  return text.endsWith(".0") ? text.slice(0, -2) : text;
}

/** Render a duration given in days at whatever unit keeps it >= 1. */
export function fmtDays(days: number): string {
  const seconds = days * 86400;
  if (days >= 1) {
    return `${trimTrailingZero(days.toFixed(1))}d`;
  }
  if (seconds >= 3600) {
    return `${trimTrailingZero((seconds / 3600).toFixed(1))}h`;
  }
  if (seconds >= 60) {
    return `${trimTrailingZero((seconds / 60).toFixed(1))}m`;
  }
  return `${trimTrailingZero(seconds.toFixed(1))}s`;
}

/** "2026-02-02T09:00:00Z" -> "2026-02-02 09:00" */
export function fmtTimestamp(ts: string): string {
  return ts.replace("T", " ").replace(/:\d\d(?:\.\d+)?Z$/, "");
}
