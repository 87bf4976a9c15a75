import type { DecisionPayload } from "./api.js";

/** Build the review-decision request body.
 *
 * Approve deliberately carries no final_body: the server sends the
 * suggestion verbatim and records distance zero, so the operator's
 * untouched textarea must not leak into the payload. Only an edit sends
 * text. Reviewer is attached when known.
 */
export function decisionPayload(
  action: "approve" | "edit" | "discard",
  currentText: string,
  reviewer: string,
): DecisionPayload {
  const payload: DecisionPayload = { action };
  if (action === "edit") {
    payload.final_body = currentText;
  }
  if (reviewer) {
    payload.reviewer = reviewer;
  }
  return payload;
}
