/** HTML renderers for every screen. Pure string functions over API data;
 * the app shell owns fetching, events and re-rendering. All interpolated
 * content passes through escapeHtml. */

import { histogram, survivalChart } from "./charts.js";
import { escapeHtml, fmtTimestamp, pct } from "./format.js";
import type {
  DisclosureView,
  EngagementDetail,
  EngagementPage,
  EngagementSummary,
  Mode,
  Report,
  Survival,
  SuggestionView,
} from "./types.js";

const STATUS_LABEL: Record<string, string> = {
  seeded: "Seeded",
  matured: "Matured",
  successful: "Successful",
  dead: "Dead",
};

export function statusChip(status: string): string {
  const label = STATUS_LABEL[status] ?? status;
  return `<span class="chip ${escapeHtml(status)}">${escapeHtml(label)}</span>`;
}

export type SortDir = "asc" | "desc";

export function sortByLastActivity(
  rows: EngagementSummary[],
  dir: SortDir,
): EngagementSummary[] {
  const sign = dir === "asc" ? 1 : -1;
  return [...rows].sort((a, b) => {
    if (a.last_activity !== b.last_activity) {
      return a.last_activity < b.last_activity ? -sign : sign;
    }
    return (a.id - b.id) * sign;
  });
}

export interface ListState {
  mode: Mode | "";
  sort: SortDir;
}

function modeFilterBar(state: ListState): string {
  const link = (value: Mode | "", label: string) => {
    const cls = state.mode === value ? "filter active" : "filter";
    const qs = value ? `?mode=${value}` : "";
    return `<a class="${cls}" href="#/engagements${qs}">${label}</a>`;
  };
  return `<nav class="filters">${link("", "All")}${link("I", "Mode I")}${link("II", "Mode II")}</nav>`;
}

export function renderEngagementList(page: EngagementPage, state: ListState): string {
  const rows = sortByLastActivity(page.engagements, state.sort);
  const arrow = state.sort === "desc" ? "▾" : "▴";
  const body = rows
    .map(
      (e) => `<tr>
  <td><a href="#/engagements/${e.id}">#${e.id}</a></td>
  <td>${escapeHtml(e.scammer_address)}</td>
  <td>${escapeHtml(e.persona_id)}</td>
  <td>${e.mode}</td>
  <td class="num">${e.turn_count}</td>
  <td>${fmtTimestamp(e.last_activity)}</td>
  <td>${statusChip(e.display_status)}</td>
</tr>`,
    )
    .join("\n");
  const empty = `<tr><td colspan="7" class="empty">no engagements</td></tr>`;
  return `<section class="list">
<h2>Engagements <small>${page.total} total</small></h2>
${modeFilterBar(state)}
<table>
<thead><tr>
  <th>id</th><th>scammer</th><th>persona</th><th>mode</th><th class="num">turns</th>
  <th><a href="#" data-sort-toggle>last activity ${arrow}</a></th>
  <th>status</th>
</tr></thead>
<tbody>${rows.length ? body : empty}</tbody>
</table>
</section>`;
}

function disclosureBadges(items: DisclosureView[]): string {
  if (items.length === 0) {
    return "";
  }
  const badges = items
    .map(
      (d) =>
        `<span class="badge ${escapeHtml(d.kind)}">${escapeHtml(d.kind.toUpperCase())}</span> <code>${escapeHtml(d.value)}</code>`,
    )
    .join(" ");
  return `<div class="disclosures">${badges}</div>`;
}

function suggestionNote(s: SuggestionView | undefined): string {
  if (!s || s.edit_distance === null) {
    return "";
  }
  const note = s.accepted_verbatim
    ? "sent verbatim"
    : `edited, distance ${s.edit_distance}`;
  return `<div class="note">${note}</div>`;
}

function pendingSuggestion(detail: EngagementDetail): SuggestionView | undefined {
  return detail.suggestions.find((s) => s.review?.state === "pending");
}

/** The review box renders only while a suggestion is waiting; a decision
 * becomes visible exclusively through re-rendering after the server's
 * acknowledgement, never by mutating the box in place. */
export function renderReviewBox(suggestion: SuggestionView): string {
  const body = escapeHtml(suggestion.suggested_body);
  return `<section class="review" data-suggestion-id="${suggestion.id}">
<h3>Suggested reply</h3>
<textarea id="suggestion-box" data-original="${body}" rows="8">${body}</textarea>
<div class="review-controls">
  <span class="distance">edit distance <strong id="edit-distance">0</strong></span>
  <button data-action="approve">Approve</button>
  <button data-action="edit">Send edited</button>
  <button data-action="discard">Discard</button>
</div>
</section>`;
}

export function renderThread(detail: EngagementDetail): string {
  const byMessage = new Map<number, DisclosureView[]>();
  for (const d of detail.disclosures) {
    const bucket = byMessage.get(d.message_id) ?? [];
    bucket.push(d);
    byMessage.set(d.message_id, bucket);
  }
  const suggestionById = new Map(detail.suggestions.map((s) => [s.id, s]));
  const bubbles = detail.messages
    .map((m) => {
      const attachments = m.special_content.length
        ? ` · attachments: ${m.special_content.map(escapeHtml).join(", ")}`
        : "";
      const note =
        m.direction === "defender" && m.suggestion_id !== null
          ? suggestionNote(suggestionById.get(m.suggestion_id))
          : "";
      return `<article class="bubble ${m.direction}">
<div class="meta">#${m.position} ${m.direction} · ${fmtTimestamp(m.timestamp)}${attachments}</div>
<div class="subject">${escapeHtml(m.subject)}</div>
<div class="body">${escapeHtml(m.body)}</div>
${disclosureBadges(byMessage.get(m.id) ?? [])}${note}
</article>`;
    })
    .join("\n");
  const pending = pendingSuggestion(detail);
  return `<section class="thread">
<h2><a href="#/engagements">←</a> Engagement #${detail.id} ${statusChip(detail.display_status)}</h2>
<div class="parties">${escapeHtml(detail.persona_id)} (mode ${detail.mode}) vs ${escapeHtml(detail.scammer_address)}</div>
<div class="bubbles">${bubbles || '<p class="empty">no messages yet</p>'}</div>
${pending ? renderReviewBox(pending) : ""}
</section>`;
}

function card(title: string, value: string, sub: string): string {
  return `<div class="card"><div class="card-title">${title}</div><div class="card-value">${value}</div><div class="card-sub">${sub}</div></div>`;
}

/** Headline numbers come straight from the report; the console renders
 * them and never recomputes. Null rates render as "no data". */
export function renderDashboard(report: Report, survival: Survival): string {
  const c = report.counts;
  const cards = [
    card("Disclosure rate", pct(report.idr_all), `${c.successful} of ${c.seeded} seeded`),
    card(
      "Human acceptance",
      pct(report.har.rate),
      `${report.har.unedited} of ${report.har.reviewed} verbatim`,
    ),
    card(
      "Takeoff",
      pct(report.takeoff.ratio),
      `${report.takeoff.matured} of ${report.takeoff.seeded} replied`,
    ),
  ].join("");
  return `<section class="dashboard">
<div class="cards">${cards}</div>
<div class="chart"><h3>Engagement survival</h3>${survivalChart(survival)}</div>
<div class="chart"><h3>Defender response latency</h3>${histogram(
    report.response_invocation.latency_histogram,
    "response latency",
  )}</div>
<div class="asof">corpus as of ${fmtTimestamp(report.as_of)}</div>
</section>`;
}

export function renderBanner(code: string, message: string): string {
  return `<div class="banner" role="alert"><strong>${escapeHtml(code)}</strong> ${escapeHtml(
    message,
  )} <button data-dismiss aria-label="dismiss">×</button></div>`;
}
