import { SuggestApi } from "./api.js";
import { debounce, Debounced } from "./debounce.js";
import { buildOptionList, OptionList } from "./options.js";
import { LatestWins } from "./staleness.js";
import { FormSchema, SuggestResponse } from "./types.js";

export interface FieldView {
  value: string;
  suggestion: SuggestResponse | null;
  pending: boolean;
  failed: boolean;
}

export interface FormViewStateOptions {
  debounceMs?: number;
  onUpdate?: () => void;
}

/**
 * Client-side form state: field values, the latest suggestion per
 * categorical field, and the refresh loop that keeps them in sync while
 * discarding stale responses.
 */
export class FormViewState {
  readonly fields = new Map<string, FieldView>();
  private readonly generations = new LatestWins();
  private readonly inflight = new Map<string, AbortController>();
  private readonly onUpdate: () => void;
  readonly scheduleRefresh: Debounced<[]>;

  constructor(
    readonly schema: FormSchema,
    private readonly api: SuggestApi,
    options: FormViewStateOptions = {}
  ) {
    for (const field of schema.fields) {
      this.fields.set(field.name, {
        value: "",
        suggestion: null,
        pending: false,
        failed: false,
      });
    }
    this.onUpdate = options.onUpdate ?? (() => {});
    this.scheduleRefresh = debounce(() => {
      void this.refreshSuggestions();
    }, options.debounceMs ?? 150);
  }

  filledValues(): Record<string, string> {
    const filled: Record<string, string> = {};
    for (const [name, view] of this.fields) {
      if (view.value.trim() !== "") {
        filled[name] = view.value;
      }
    }
    return filled;
  }

  setFieldValue(name: string, value: string): void {
    const view = this.fields.get(name);
    if (!view) {
      throw new Error(`unknown field ${name}`);
    }
    view.value = value;
    if (value.trim() !== "") {
      // a filled field no longer needs its own suggestions
      view.suggestion = null;
      this.generations.invalidate(name);
    }
    this.onUpdate();
    this.scheduleRefresh();
  }

  /** Fields that currently want a suggestion request. */
  private suggestionTargets(): string[] {
    return this.schema.fields
      .filter((f) => f.kind === "categorical")
      .filter((f) => (this.fields.get(f.name)?.value ?? "").trim() === "")
      .map((f) => f.name);
  }

  async refreshSuggestions(): Promise<void> {
    const filled = this.filledValues();
    const requests = this.suggestionTargets().map(async (target) => {
      const view = this.fields.get(target)!;
      const token = this.generations.begin(target);
      // at most one live request per field: supersede the previous one
      this.inflight.get(target)?.abort();
      const controller = new AbortController();
      this.inflight.set(target, controller);
      view.pending = true;
      this.onUpdate();
      try {
        const response = await this.api.suggest(filled, target, controller.signal);
        if (!this.generations.isCurrent(target, token)) {
          return; // a newer request for this field is in flight or done
        }
        view.suggestion = response;
        view.failed = false;
      } catch {
        if (!this.generations.isCurrent(target, token)) {
          return;
        }
        // keep whatever was displayed before; surface a retry affordance
        view.failed = true;
      } finally {
        if (this.generations.isCurrent(target, token)) {
          view.pending = false;
          this.onUpdate();
        }
      }
    });
    await Promise.all(requests);
  }

  optionsFor(name: string): OptionList {
    const field = this.schema.fields.find((f) => f.name === name);
    if (!field || field.kind !== "categorical") {
      throw new Error(`${name} is not a categorical field`);
    }
    const view = this.fields.get(name)!;
    return buildOptionList(field.candidates ?? [], view.suggestion);
  }
}
