/** Single-page shell: hash routing, a few-second poll loop, and the
 * review decision flow. Rendering is delegated to the pure view module;
 * this file owns the DOM. */

import { ApiClient, ApiError } from "./api.js";
import { decisionPayload } from "./decision.js";
import { levenshtein } from "./levenshtein.js";
import {
  renderBanner,
  renderDashboard,
  renderEngagementList,
  renderThread,
  type ListState,
  type SortDir,
} from "./views.js";
import type { Mode } from "./types.js";

export type Route =
  | { name: "dashboard" }
  | { name: "list"; mode: Mode | ""; sort: SortDir }
  | { name: "thread"; id: number };

export function parseRoute(hash: string): Route {
  const raw = hash.replace(/^#/, "");
  const [path, query = ""] = raw.split("?", 2);
  const params = new URLSearchParams(query);
  const thread = /^\/engagements\/(\d+)$/.exec(path);
  if (thread) {
    return { name: "thread", id: Number(thread[1]) };
  }
  if (path === "/engagements") {
    const mode = params.get("mode");
    return {
      name: "list",
      mode: mode === "I" || mode === "II" ? mode : "",
      sort: params.get("sort") === "asc" ? "asc" : "desc",
    };
  }
  return { name: "dashboard" };
}

export function routeToHash(route: Route): string {
  switch (route.name) {
    case "dashboard":
      return "#/";
    case "thread":
      return `#/engagements/${route.id}`;
    case "list": {
      const params = new URLSearchParams();
      if (route.mode) params.set("mode", route.mode);
      if (route.sort !== "desc") params.set("sort", route.sort);
      const qs = params.toString();
      return `#/engagements${qs ? `?${qs}` : ""}`;
    }
  }
}

const POLL_MS = 4000;

export class App {
  private client = new ApiClient("");
  private busy = false;

  constructor(
    private root: HTMLElement,
    private bannerSlot: HTMLElement,
  ) {}

  start(): void {
    window.addEventListener("hashchange", () => {
      void this.refresh(false);
    });
    this.root.addEventListener("click", (event) => {
      this.onClick(event);
    });
    this.root.addEventListener("input", (event) => {
      this.onInput(event);
    });
    this.bannerSlot.addEventListener("click", (event) => {
      const target = event.target as HTMLElement;
      if (target.closest("[data-dismiss]")) {
        this.bannerSlot.innerHTML = "";
      }
    });
    window.setInterval(() => {
      void this.refresh(true);
    }, POLL_MS);
    void this.refresh(false);
  }

  private reviewer(): string {
    const field = document.getElementById("reviewer") as HTMLInputElement | null;
    return field?.value.trim() ?? "";
  }

  private suggestionBox(): HTMLTextAreaElement | null {
    return this.root.querySelector<HTMLTextAreaElement>("#suggestion-box");
  }

  /** Background refreshes must never clobber an operator mid-edit or a
   * decision in flight; a dirty textarea pins the current render. */
  private renderBlocked(): boolean {
    if (this.busy) {
      return true;
    }
    const box = this.suggestionBox();
    if (!box) {
      return false;
    }
    return box.value !== (box.dataset.original ?? "") || document.activeElement === box;
  }

  async refresh(background: boolean): Promise<void> {
    if (background && this.renderBlocked()) {
      return;
    }
    const route = parseRoute(window.location.hash);
    try {
      if (route.name === "dashboard") {
        const [report, survival] = await Promise.all([
          this.client.report(),
          this.client.survival(),
        ]);
        this.root.innerHTML = renderDashboard(report, survival);
      } else if (route.name === "list") {
        const page = await this.client.listEngagements({
          mode: route.mode || undefined,
          page_size: 200,
        });
        const state: ListState = { mode: route.mode, sort: route.sort };
        this.root.innerHTML = renderEngagementList(page, state);
      } else {
        if (background && this.renderBlocked()) {
          return;
        }
        const detail = await this.client.engagement(route.id);
        this.root.innerHTML = renderThread(detail);
      }
    } catch (exc) {
      if (!background) {
        this.showError(exc);
      }
    }
  }

  private showError(exc: unknown): void {
    if (exc instanceof ApiError) {
      this.bannerSlot.innerHTML = renderBanner(exc.code, exc.message);
    } else {
      this.bannerSlot.innerHTML = renderBanner("error", String(exc));
    }
  }

  private onClick(event: Event): void {
    const target = event.target as HTMLElement;
    const sortToggle = target.closest("[data-sort-toggle]");
    if (sortToggle) {
      event.preventDefault();
      const route = parseRoute(window.location.hash);
      if (route.name === "list") {
        route.sort = route.sort === "desc" ? "asc" : "desc";
        window.location.hash = routeToHash(route);
      }
      return;
    }
    const button = target.closest<HTMLButtonElement>("button[data-action]");
    if (button) {
      const action = button.dataset.action as "approve" | "edit" | "discard";
      void this.decide(action);
    }
  }

  private onInput(event: Event): void {
    const target = event.target as HTMLElement;
    if (target.id !== "suggestion-box") {
      return;
    }
    const box = target as HTMLTextAreaElement;
    const counter = this.root.querySelector("#edit-distance");
    if (counter) {
      counter.textContent = String(
        levenshtein(box.dataset.original ?? "", box.value),
      );
    }
  }

  /** Decisions are pessimistic: buttons lock, the request round-trips,
   * and only a 2xx re-render shows the new state. Errors surface the
   * server's {code, message} banner and unlock the box. */
  private async decide(action: "approve" | "edit" | "discard"): Promise<void> {
    if (this.busy) {
      return;
    }
    const section = this.root.querySelector<HTMLElement>("[data-suggestion-id]");
    const box = this.suggestionBox();
    if (!section || !box) {
      return;
    }
    const suggestionId = Number(section.dataset.suggestionId);
    const payload = decisionPayload(action, box.value, this.reviewer());
    const buttons = section.querySelectorAll<HTMLButtonElement>("button[data-action]");
    this.busy = true;
    buttons.forEach((b) => {
      b.disabled = true;
    });
    try {
      await this.client.decide(suggestionId, payload);
      this.bannerSlot.innerHTML = "";
      this.busy = false;
      await this.refresh(false);
    } catch (exc) {
      this.showError(exc);
      buttons.forEach((b) => {
        b.disabled = false;
      });
    } finally {
      this.busy = false;
    }
  }
}
