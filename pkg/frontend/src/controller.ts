/**
 * Control-to-request orchestration.
 *
 * Edits are debounced; each settled control state issues exactly one
 * recommend request, and at most one request per control group is honored
 * at a time: a response whose input echo no longer matches the current
 * controls is stale and dropped, so late-arriving answers can never
 * clobber the view of a newer scenario.
 */

import type { ApiClient } from "./api.js";
import type { RecommendDocument } from "./types.js";
import {
  DEFAULT_SCENARIO,
  FieldErrors,
  ScenarioState,
  echoMatches,
  validateScenario,
} from "./scenario.js";

export interface ExplorerView {
  state: ScenarioState;
  errors: FieldErrors;
  document: RecommendDocument | null;
  pending: boolean;
  requestError: string | null;
}

type Listener = (view: ExplorerView) => void;
type Scheduler = (fn: () => void, delayMs: number) => unknown;
type Canceller = (handle: unknown) => void;

export class ExplorerController {
  private state: ScenarioState;
  private document: RecommendDocument | null = null;
  private errors: FieldErrors = {};
  private pending = false;
  private requestError: string | null = null;
  private timer: unknown = null;
  private listeners: Listener[] = [];

  constructor(
    private readonly client: ApiClient,
    private readonly debounceMs = 250,
    initial: ScenarioState = DEFAULT_SCENARIO,
    private readonly schedule: Scheduler = (fn, ms) => setTimeout(fn, ms),
    private readonly cancel: Canceller = (h) => clearTimeout(h as number),
  ) {
    this.state = { ...initial };
  }

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  view(): ExplorerView {
    return {
      state: { ...this.state },
      errors: { ...this.errors },
      document: this.document,
      pending: this.pending,
      requestError: this.requestError,
    };
  }

  currentState(): ScenarioState {
    return { ...this.state };
  }

  private emit(): void {
    const snapshot = this.view();
    for (const listener of this.listeners) listener(snapshot);
  }

  /** Apply a control edit; a valid state schedules a debounced request. */
  update(patch: Partial<ScenarioState>): void {
    this.state = { ...this.state, ...patch };
    this.errors = validateScenario(this.state);
    if (this.timer !== null) {
      this.cancel(this.timer);
      this.timer = null;
    }
    if (Object.keys(this.errors).length > 0) {
      // invalid controls block submission; show messages immediately
      this.emit();
      return;
    }
    this.timer = this.schedule(() => {
      this.timer = null;
      void this.submit();
    }, this.debounceMs);
    this.emit();
  }

  /** Load a whole scenario (URL restore, frontier click) and fetch now. */
  load(state: ScenarioState): Promise<void> {
    this.state = { ...state };
    this.errors = validateScenario(this.state);
    if (this.timer !== null) {
      this.cancel(this.timer);
      this.timer = null;
    }
    if (Object.keys(this.errors).length > 0) {
      this.emit();
      return Promise.resolve();
    }
    return this.submit();
  }

  async submit(): Promise<void> {
    const requested = { ...this.state };
    this.pending = true;
    this.requestError = null;
    this.emit();
    try {
      const doc = await this.client.recommend(requested);
      if (!echoMatches(this.state, doc)) {
        return; // stale: controls moved on while this was in flight
      }
      this.document = doc;
      this.pending = false;
      this.emit();
    } catch (err) {
      if (JSON.stringify(requested) !== JSON.stringify(this.state)) {
        return; // failure of a stale request is not this state's problem
      }
      this.pending = false;
      this.requestError = err instanceof Error ? err.message : String(err);
      this.emit();
    }
  }
}
