/** Thin DOM bindings: events in, rendered state out. */

import { ApiClient } from "./api.js";
import { ClassicsController, ClassicsState } from "./classics.js";
import { WriterController, WriterState } from "./writer.js";

const IDLE_SUGGEST_MS = 300;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function mountWriter(api: ApiClient): WriterController {
  const draft = el<HTMLTextAreaElement>("draft");
  const button = el<HTMLButtonElement>("suggestion");
  const log = el<HTMLElement>("substitutions");
  const notice = el<HTMLElement>("writer-error");

  const render = (state: WriterState) => {
    if (draft.value !== state.draftText) draft.value = state.draftText;
    const ready = state.currentSuggestion && !state.pendingRequest;
    button.textContent = ready ? state.currentSuggestion!.word : "…";
    button.disabled = !ready;
    button.title = ready
      ? `p=${state.currentSuggestion!.probability.toFixed(3)} (Enter to accept)`
      : "";
    log.textContent = state.substitutionLog
      .slice(-5)
      .map((s) => `${s.from} → ${s.to}`)
      .join(", ");
    notice.textContent = state.error ?? "";
  };

  const writer = new WriterController(api, render);
  let idleTimer: ReturnType<typeof setTimeout> | undefined;

  draft.addEventListener("input", () => {
    writer.setDraft(draft.value);
    // fallback for input methods without discrete space events
    clearTimeout(idleTimer);
    idleTimer = setTimeout(() => void writer.requestSuggestion(), IDLE_SUGGEST_MS);
  });
  draft.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") {
      ev.preventDefault();
      void writer.onAccept();
    }
  });
  draft.addEventListener("keyup", (ev) => {
    if (ev.key === " ") {
      clearTimeout(idleTimer);
      void writer.onSpacePressed();
    }
  });
  button.addEventListener("click", () => void writer.onAccept());
  return writer;
}

export function mountClassics(api: ApiClient): ClassicsController {
  const select = el<HTMLSelectElement>("classic-line");
  const original = el<HTMLElement>("classic-original");
  const numWords = el<HTMLInputElement>("num-words");
  const substitute = el<HTMLInputElement>("substitute");
  const generate = el<HTMLButtonElement>("generate");
  const seedOut = el<HTMLElement>("processed-seed");
  const storyOut = el<HTMLElement>("story");
  const notice = el<HTMLElement>("classics-error");

  const render = (state: ClassicsState) => {
    if (select.options.length !== state.lines.length) {
      select.replaceChildren(
        ...state.lines.map((line, i) => new Option(line.title, String(i))),
      );
    }
    select.selectedIndex = state.selectedIndex;
    const line = state.lines[state.selectedIndex];
    original.textContent = line ? line.line : "";
    generate.disabled = state.pendingRequest;
    seedOut.textContent = state.output ? state.output.processedSeed : "";
    storyOut.textContent = state.output ? state.output.text : "";
    notice.textContent = state.error ?? "";
  };

  const classics = new ClassicsController(api, render);
  select.addEventListener("change", () => classics.setSelectedIndex(select.selectedIndex));
  numWords.addEventListener("change", () => {
    if (!classics.setNumWords(Number(numWords.value))) {
      numWords.value = String(classics.getState().numWords);
    }
  });
  substitute.addEventListener("change", () => classics.setSubstitute(substitute.checked));
  generate.addEventListener("click", () => void classics.generate());
  void classics.load();
  return classics;
}
