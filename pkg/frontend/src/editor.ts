/**
 * Headless editor controller.
 *
 * Owns the document, caret, suggestion dropdown, spell flags, and
 * translation pane, and talks to the service through a ServiceClient.
 * The DOM layer subscribes and renders; nothing here touches the DOM.
 *
 * Two rules the whole design hangs on:
 * - only explicit user acceptance mutates the document; network
 *   responses never do
 * - every feature keeps a request generation counter, and a response
 *   from a superseded request is discarded unseen
 */

import {
  Correction,
  EventKind,
  Gloss,
  ServiceClient,
  SpellFlag,
} from "./api.js";

export interface DropdownItem {
  token: string;
  gloss?: string;
}

export interface Dropdown {
  kind: "completion" | "nextword";
  items: DropdownItem[];
  selected: number;
}

export interface EditorOptions {
  /** debounce before /complete while inside a word */
  completionDebounceMs?: number;
  /** idle time before an automatic spell pass */
  spellIdleMs?: number;
  /** suggestion count requested from the service */
  k?: number;
  session?: string;
  /** (source, target) language codes; target picks gloss language */
  direction?: [string, string];
}

const BOUNDARY = /[^\p{L}\p{N}']/u;
const TRAILING_WORD = /[\p{L}\p{N}']+$/u;

export class Editor {
  doc = "";
  caret = 0;
  dropdown: Dropdown | null = null;
  flags: SpellFlag[] = [];
  translation = "";
  translating = false;
  consent = false;
  toast = "";
  readonly direction: [string, string];

  private readonly completionDebounceMs: number;
  private readonly spellIdleMs: number;
  private readonly k: number;
  private readonly session: string;

  private suggestGen = 0;
  private spellGen = 0;
  private translateGen = 0;
  private completionTimer: ReturnType<typeof setTimeout> | null = null;
  private spellTimer: ReturnType<typeof setTimeout> | null = null;
  private listeners: Array<() => void> = [];

  constructor(private readonly api: ServiceClient, opts: EditorOptions = {}) {
    this.completionDebounceMs = opts.completionDebounceMs ?? 150;
    this.spellIdleMs = opts.spellIdleMs ?? 400;
    this.k = opts.k ?? 5;
    this.session = opts.session ?? `web-${Math.random().toString(36).slice(2, 10)}`;
    this.direction = opts.direction ?? ["", ""];
  }

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  dispose(): void {
    if (this.completionTimer !== null) clearTimeout(this.completionTimer);
    if (this.spellTimer !== null) clearTimeout(this.spellTimer);
  }

  // ---- typing ----------------------------------------------------------------

  /** Insert a key (or pasted string) at the caret. */
  keystroke(key: string): void {
    if (key.length === 0) return;
    this.applyEdit(this.caret, this.caret, key);
    this.afterInput(key.slice(-1));
  }

  type(text: string): void {
    for (const ch of text) this.keystroke(ch);
  }

  /**
   * Wholesale document replacement from a bound input element. The
   * change is reduced to a single splice so flags survive edits that
   * do not touch them.
   */
  setDocument(text: string, caret: number): void {
    if (text === this.doc) {
      this.caret = Math.min(caret, text.length);
      this.emit();
      return;
    }
    let prefix = 0;
    const limit = Math.min(this.doc.length, text.length);
    while (prefix < limit && this.doc[prefix] === text[prefix]) prefix++;
    let suffix = 0;
    while (
      suffix < limit - prefix &&
      this.doc[this.doc.length - 1 - suffix] === text[text.length - 1 - suffix]
    ) {
      suffix++;
    }
    const insert = text.slice(prefix, text.length - suffix);
    this.applyEdit(prefix, this.doc.length - suffix, insert);
    this.caret = Math.min(caret, this.doc.length);
    this.afterInput(insert.slice(-1));
  }

  private afterInput(lastChar: string): void {
    this.toast = "";
    if (this.completionTimer !== null) clearTimeout(this.completionTimer);
    this.completionTimer = null;
    if (lastChar !== "" && BOUNDARY.test(lastChar)) {
      this.dropdown = null;
      void this.requestNextWord();
    } else if (this.partialWord() !== null) {
      this.completionTimer = setTimeout(() => {
        this.completionTimer = null;
        void this.requestCompletion();
      }, this.completionDebounceMs);
    } else {
      this.dropdown = null;
    }
    this.resetSpellIdle();
    this.emit();
  }

  private resetSpellIdle(): void {
    if (this.spellTimer !== null) clearTimeout(this.spellTimer);
    this.spellTimer = setTimeout(() => {
      this.spellTimer = null;
      void this.spellPass();
    }, this.spellIdleMs);
  }

  private partialWord(): string | null {
    const match = TRAILING_WORD.exec(this.doc.slice(0, this.caret));
    return match ? match[0] : null;
  }

  /**
   * Splice [start, end) -> insert, remapping the caret and every flag.
   * Flags overlapping the edited range no longer describe the text
   * they were computed from and are dropped; the next spell pass
   * re-derives them.
   */
  private applyEdit(start: number, end: number, insert: string): void {
    const delta = insert.length - (end - start);
    this.doc = this.doc.slice(0, start) + insert + this.doc.slice(end);
    if (this.caret >= end) this.caret += delta;
    else if (this.caret > start) this.caret = start + insert.length;
    const kept: SpellFlag[] = [];
    for (const flag of this.flags) {
      if (flag.end <= start) kept.push(flag);
      else if (flag.start >= end) {
        kept.push({ ...flag, start: flag.start + delta, end: flag.end + delta });
      }
    }
    this.flags = kept;
  }

  // ---- suggestions -----------------------------------------------------------

  private glossFor(glosses: Gloss[]): string | undefined {
    const target = this.direction[1];
    const hit = glosses.find((g) => g.lang === target) ?? glosses[0];
    return hit?.text;
  }

  private async requestCompletion(): Promise<void> {
    const word = this.partialWord();
    if (word === null) return;
    const gen = ++this.suggestGen;
    try {
      const res = await this.api.complete(word, this.k);
      if (gen !== this.suggestGen) return;
      const items = res.completions.map((entry) => ({
        token: entry.headword,
        gloss: this.glossFor(entry.glosses),
      }));
      this.dropdown = items.length > 0 ? { kind: "completion", items, selected: 0 } : null;
    } catch {
      if (gen !== this.suggestGen) return;
      this.dropdown = null;
      this.toast = "suggestions unavailable";
    }
    this.emit();
  }

  private async requestNextWord(): Promise<void> {
    const context = this.doc.slice(0, this.caret).trim();
    const gen = ++this.suggestGen;
    try {
      const res = await this.api.next(context, this.k);
      // next-word tokens carry no glosses on the wire; attach one when
      // the token is an exact lexicon headword, best effort
      const lookups = await Promise.all(
        res.suggestions.map((s) =>
          this.api.lookup(s.token, 0, 1).then(
            (hit) => hit.matches[0],
            () => undefined,
          ),
        ),
      );
      if (gen !== this.suggestGen) return;
      const items = res.suggestions.map((s, i) => {
        const match = lookups[i];
        return {
          token: s.token,
          gloss: match !== undefined ? this.glossFor(match.glosses) : undefined,
        };
      });
      this.dropdown = items.length > 0 ? { kind: "nextword", items, selected: 0 } : null;
    } catch {
      if (gen !== this.suggestGen) return;
      this.dropdown = null;
      this.toast = "suggestions unavailable";
    }
    this.emit();
  }

  moveSelection(delta: number): void {
    if (this.dropdown === null || this.dropdown.items.length === 0) return;
    const n = this.dropdown.items.length;
    this.dropdown.selected = (this.dropdown.selected + delta + n) % n;
    this.emit();
  }

  closeDropdown(): void {
    this.suggestGen++;
    if (this.completionTimer !== null) clearTimeout(this.completionTimer);
    this.completionTimer = null;
    this.dropdown = null;
    this.emit();
  }

  acceptSuggestion(index: number): void {
    const dropdown = this.dropdown;
    const item = dropdown?.items[index];
    if (dropdown === null || item === undefined) return;
    if (dropdown.kind === "completion") {
      const word = this.partialWord();
      if (word === null) return;
      this.applyEdit(this.caret - word.length, this.caret, item.token);
      this.logEvent("completion_accepted", { suggestion: item.token, rank: index + 1 });
    } else {
      this.applyEdit(this.caret, this.caret, item.token + " ");
      this.logEvent("nextword_accepted", { suggestion: item.token, rank: index + 1 });
    }
    this.suggestGen++;
    this.dropdown = null;
    this.resetSpellIdle();
    this.emit();
  }

  // ---- spell -----------------------------------------------------------------

  async spellPass(): Promise<void> {
    const gen = ++this.spellGen;
    const snapshot = this.doc;
    if (snapshot.trim() === "") {
      this.flags = [];
      this.emit();
      return;
    }
    try {
      const res = await this.api.spell(snapshot);
      // discard if superseded or if the document moved under the request
      if (gen !== this.spellGen || this.doc !== snapshot) return;
      this.flags = res.flags;
    } catch {
      if (gen !== this.spellGen) return;
      this.toast = "spell check unavailable";
    }
    this.emit();
  }

  acceptCorrection(flagIndex: number, rank = 0): void {
    const flag = this.flags[flagIndex];
    const correction: Correction | undefined = flag?.suggestions[rank];
    if (flag === undefined || correction === undefined) return;
    if (this.doc.slice(flag.start, flag.end) !== flag.token) return;
    this.applyEdit(flag.start, flag.end, correction.token);
    this.logEvent("spell_accepted", { suggestion: correction.token, rank: rank + 1 });
    this.resetSpellIdle();
    this.emit();
  }

  // ---- translation -----------------------------------------------------------

  async requestTranslation(): Promise<void> {
    if (this.doc.trim() === "") return;
    const gen = ++this.translateGen;
    this.translating = true;
    this.emit();
    this.logEvent("translate_requested");
    try {
      const res = await this.api.translate(this.doc);
      if (gen !== this.translateGen) return;
      this.translation = res.text;
    } catch (err) {
      if (gen !== this.translateGen) return;
      this.translation = err instanceof Error ? err.message : String(err);
    }
    this.translating = false;
    this.emit();
  }

  // ---- consent and telemetry ---------------------------------------------------

  setConsent(on: boolean): void {
    this.consent = on;
    this.emit();
  }

  private logEvent(kind: EventKind, payload?: { suggestion: string; rank: number }): void {
    if (!this.consent) return;
    const event =
      payload === undefined
        ? { consent: true as const, kind, session: this.session }
        : { consent: true as const, kind, session: this.session, payload };
    void this.api.log(event).catch(() => {
      // telemetry must never interfere with writing
    });
  }
}
