/** Shapes of the JSON the service returns. Only fields the console reads
 * are typed; report sections it ignores sit behind the index signature. */

export type Mode = "I" | "II";
export type DirectionName = "attacker" | "defender";
export type DisplayStatus = "seeded" | "matured" | "successful" | "dead";

export interface EngagementSummary {
  id: number;
  scammer_address: string;
  persona_id: string;
  mode: Mode;
  status: "seeded" | "matured" | "successful";
  dead: boolean;
  display_status: DisplayStatus;
  turn_count: number;
  seeded_at: string;
  last_activity: string;
}

export interface EngagementPage {
  engagements: EngagementSummary[];
  page: number;
  page_size: number;
  total: number;
}

export interface MessageView {
  id: number;
  direction: DirectionName;
  timestamp: string;
  subject: string;
  body: string;
  position: number;
  suggestion_id: number | null;
  special_content: string[];
}

export interface ReviewInfo {
  review_id: number;
  state: string;
  reviewer: string | null;
  decided_at: string | null;
}

export interface SuggestionView {
  id: number;
  engagement_id: number;
  created_at: string;
  suggested_body: string;
  final_body: string | null;
  edit_distance: number | null;
  accepted_verbatim: boolean | null;
  review: ReviewInfo | null;
}

export interface DisclosureView {
  id: number;
  message_id: number;
  kind: string;
  value: string;
  turn_index: number;
  elapsed_seconds: number;
}

export interface EngagementDetail extends EngagementSummary {
  messages: MessageView[];
  suggestions: SuggestionView[];
  disclosures: DisclosureView[];
}

export interface SeedRequest {
  scammer_address: string;
  persona_id: string;
  mode?: Mode;
  seed_body?: string;
  seed_subject?: string;
}

export interface SeedResult extends EngagementSummary {
  pending_review: ReviewInfo | null;
}

export interface QueueItem {
  review_id: number;
  suggestion_id: number;
  engagement_id: number;
  scammer_address: string;
  mode: Mode;
  created_at: string;
  suggested_body: string;
  last_attacker_body: string | null;
}

export interface DecisionResult {
  review_id: number;
  suggestion_id: number;
  engagement_id: number;
  state: string;
  reviewer: string | null;
  decided_at: string | null;
  edit_distance: number | null;
  final_body: string | null;
}

export interface PollResult {
  ingested: number;
  quarantined: number;
  disclosures: number;
  suggestions: number;
  outbox_sent: number;
  failures: { engagement_id: number; message: string }[];
}

export interface Stats {
  mean: number;
  median: number;
  min: number;
  max: number;
  count: number;
}

export interface Survival {
  count: number;
  grid_days: number[];
  gap_curve: number[];
  duration_curve: number[];
  cutoff_95_days: number | null;
}

export interface Report {
  schema: string;
  as_of: string;
  filters: { mode: string | null; since: string | null };
  counts: {
    seeded: number;
    matured: number;
    successful: number;
    dead: number;
    messages: number;
    [k: string]: unknown;
  };
  idr_all: number | null;
  idr_matured: number | null;
  ids: {
    count: number;
    turns: Stats | null;
    time_days: Stats | null;
    speed_histogram: Record<string, number>;
  };
  har: {
    rate: number | null;
    reviewed: number;
    unedited: number;
    avg_edit_distance: number | null;
    [k: string]: unknown;
  };
  takeoff: {
    ratio: number | null;
    seeded: number;
    matured: number;
    [k: string]: unknown;
  };
  response_invocation: {
    count: number;
    latency_minutes: Stats | null;
    latency_histogram: Record<string, number>;
    [k: string]: unknown;
  };
  survival: Survival;
  [k: string]: unknown;
}
