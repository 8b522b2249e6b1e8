/** State machine behind the classics generator form. */

import { ApiClient, ApiError, ClassicLine, GenerateResponse } from "./api.js";

export interface ClassicsState {
  lines: ClassicLine[];
  selectedIndex: number;
  numWords: number;
  substitute: boolean;
  output: GenerateResponse | null;
  pendingRequest: boolean;
  error: string | null;
}

export class ClassicsController {
  private state: ClassicsState = {
    lines: [],
    selectedIndex: 0,
    numWords: 150,
    substitute: false,
    output: null,
    pendingRequest: false,
    error: null,
  };

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: ClassicsState) => void = () => {},
  ) {}

  getState(): Readonly<ClassicsState> {
    return this.state;
  }

  private update(patch: Partial<ClassicsState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  async load(): Promise<void> {
    try {
      const lines = await this.api.classics();
      this.update({ lines, selectedIndex: 0, error: null });
    } catch (err) {
      this.update({ error: err instanceof ApiError ? err.message : String(err) });
    }
  }

  selectedLine(): ClassicLine | null {
    return this.state.lines[this.state.selectedIndex] ?? null;
  }

  setSelectedIndex(index: number): void {
    if (index < 0 || index >= this.state.lines.length) return;
    this.update({ selectedIndex: index, output: null, error: null });
  }

  /** Word counts below 1 are rejected and leave the state unchanged. */
  setNumWords(value: number): boolean {
    if (!Number.isFinite(value) || !Number.isInteger(value) || value < 1) {
      this.update({ error: "word count must be a positive integer" });
      return false;
    }
    this.update({ numWords: value, output: null, error: null });
    return true;
  }

  setSubstitute(on: boolean): void {
    this.update({ substitute: on, output: null, error: null });
  }

  async generate(): Promise<void> {
    const line = this.selectedLine();
    if (!line) {
      this.update({ error: "no opening line selected" });
      return;
    }
    this.update({ pendingRequest: true, error: null });
    try {
      const output = await this.api.generate(line.line, this.state.numWords, this.state.substitute);
      this.update({ pendingRequest: false, output });
    } catch (err) {
      this.update({
        pendingRequest: false,
        error: err instanceof ApiError ? err.message : String(err),
      });
    }
  }
}
