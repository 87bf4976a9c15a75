import type {
  DisclosureView,
  EngagementDetail,
  EngagementSummary,
  MessageView,
  Report,
  SuggestionView,
  Survival,
} from "../src/types.js";

export function summary(over: Partial<EngagementSummary> = {}): EngagementSummary {
  return {
    id: 1,
    scammer_address: "rex@lure.example",
    persona_id: "margaret",
    mode: "II",
    status: "seeded",
    dead: false,
    display_status: "seeded",
    turn_count: 1,
    seeded_at: "2026-02-02T09:00:00Z",
    last_activity: "2026-02-02T09:00:00Z",
    ...over,
  };
}

export function message(over: Partial<MessageView> = {}): MessageView {
  return {
    id: 1,
    direction: "defender",
    timestamp: "2026-02-02T09:00:00Z",
    subject: "Hello",
    body: "Good morning!",
    position: 1,
    suggestion_id: null,
    special_content: [],
    ...over,
  };
}

export function suggestion(over: Partial<SuggestionView> = {}): SuggestionView {
  return {
    id: 1,
    engagement_id: 1,
    created_at: "2026-02-02T09:00:00Z",
    suggested_body: "Thank you for your message, could you tell me more?",
    final_body: null,
    edit_distance: null,
    accepted_verbatim: null,
    review: { review_id: 1, state: "pending", reviewer: null, decided_at: null },
    ...over,
  };
}

export function disclosure(over: Partial<DisclosureView> = {}): DisclosureView {
  return {
    id: 1,
    message_id: 2,
    kind: "iban",
    value: "DE89370400440532013000",
    turn_index: 2,
    elapsed_seconds: 3600,
    ...over,
  };
}

export function detail(over: Partial<EngagementDetail> = {}): EngagementDetail {
  return {
    ...summary(),
    messages: [message()],
    suggestions: [],
    disclosures: [],
    ...over,
  };
}

export function survivalFixture(over: Partial<Survival> = {}): Survival {
  const grid = [0.001, 0.01, 0.1, 0.5, 1, 3, 10, 40];
  return {
    count: 20,
    grid_days: grid,
    gap_curve: [1, 1, 0.9, 0.8, 0.6, 0.3, 0.05, 0],
    duration_curve: [1, 1, 1, 0.95, 0.9, 0.5, 0.2, 0],
    cutoff_95_days: 10,
    ...over,
  };
}

export const EMPTY_SURVIVAL: Survival = {
  count: 0,
  grid_days: [],
  gap_curve: [],
  duration_curve: [],
  cutoff_95_days: null,
};

const EMPTY_HISTOGRAM = {
  "<=1m": 0,
  "1-5m": 0,
  "5-30m": 0,
  "30-120m": 0,
  "2-24h": 0,
  ">24h": 0,
};

export function emptyReport(): Report {
  return {
    schema: "baitline-report/1",
    as_of: "2026-02-02T09:00:00Z",
    filters: { mode: null, since: null },
    counts: { seeded: 0, matured: 0, successful: 0, dead: 0, messages: 0 },
    idr_all: null,
    idr_matured: null,
    ids: { count: 0, turns: null, time_days: null, speed_histogram: {} },
    har: { rate: null, reviewed: 0, unedited: 0, avg_edit_distance: null },
    takeoff: { ratio: null, seeded: 0, matured: 0 },
    response_invocation: {
      count: 0,
      latency_minutes: null,
      latency_histogram: { ...EMPTY_HISTOGRAM },
      pair_count: 0,
      pairwise_correlation: null,
    },
    survival: EMPTY_SURVIVAL,
  };
}

export function liveReport(): Report {
  const rep = emptyReport();
  rep.counts = { seeded: 2638, matured: 1285, successful: 466, dead: 900, messages: 9000 };
  rep.idr_all = 0.176649;
  rep.idr_matured = 0.362646;
  rep.har = { rate: 0.690217, reviewed: 2760, unedited: 1905, avg_edit_distance: 11.2 };
  rep.takeoff = { ratio: 0.487111, seeded: 2638, matured: 1285 };
  rep.response_invocation = {
    count: 5000,
    latency_minutes: { mean: 120, median: 40, min: 0.5, max: 4000, count: 5000 },
    latency_histogram: {
      "<=1m": 120,
      "1-5m": 900,
      "5-30m": 1700,
      "30-120m": 1300,
      "2-24h": 800,
      ">24h": 180,
    },
    pair_count: 3000,
    pairwise_correlation: 0.21,
  };
  rep.survival = survivalFixture();
  return rep;
}
