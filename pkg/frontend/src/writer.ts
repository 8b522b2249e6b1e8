/** State machine behind the writing pad.
 *
 * Spacebar (or idle typing, wired up in dom.ts) asks the server for the next
 * word given the whole draft; Enter accepts the shown suggestion and
 * immediately asks again, so holding Enter walks the model's own greedy
 * continuation. Responses apply last-write-wins: only the newest in-flight
 * request may touch the state.
 */

import { ApiClient, ApiError, Substitution, Suggestion } from "./api.js";

export interface WriterState {
  draftText: string;
  currentSuggestion: Suggestion | null;
  substitutionLog: Substitution[];
  pendingRequest: boolean;
  error: string | null;
}

export class WriterController {
  private state: WriterState = {
    draftText: "",
    currentSuggestion: null,
    substitutionLog: [],
    pendingRequest: false,
    error: null,
  };
  private requestSeq = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: WriterState) => void = () => {},
  ) {}

  getState(): Readonly<WriterState> {
    return this.state;
  }

  private update(patch: Partial<WriterState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  setDraft(text: string): void {
    this.update({ draftText: text, error: null });
  }

  /** Ask for a suggestion for the current draft. Stale responses are dropped. */
  async requestSuggestion(): Promise<void> {
    if (!this.state.draftText.trim()) {
      this.update({ currentSuggestion: null });
      return;
    }
    const seq = ++this.requestSeq;
    this.update({ pendingRequest: true, error: null });
    try {
      const resp = await this.api.suggest(this.state.draftText);
      if (seq !== this.requestSeq) return; // a newer keystroke won
      this.update({
        pendingRequest: false,
        currentSuggestion: resp.suggestions[0] ?? null,
        substitutionLog: [...this.state.substitutionLog, ...resp.substitutions],
      });
    } catch (err) {
      if (seq !== this.requestSeq) return;
      // never block typing on a failed fetch; the draft stays as typed
      this.update({
        pendingRequest: false,
        currentSuggestion: null,
        error: err instanceof ApiError ? err.message : String(err),
      });
    }
  }

  /** Spacebar: the written words changed, refresh the suggestion. */
  onSpacePressed(): Promise<void> {
    return this.requestSuggestion();
  }

  /** Enter or clicking the button: insert the suggestion, then re-suggest. */
  async onAccept(): Promise<void> {
    const suggestion = this.state.currentSuggestion;
    if (!suggestion) return;
    const base = this.state.draftText.replace(/\s+$/, "");
    const draft = (base ? base + " " : "") + suggestion.word + " ";
    this.update({ draftText: draft, currentSuggestion: null });
    await this.requestSuggestion();
  }
}
