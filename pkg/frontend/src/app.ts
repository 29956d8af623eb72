/** Single-page review flow: convert a regex, inspect fragment provenance,
 * toggle matcher suggestions, run differential tests.
 *
 * The server owns all pattern state.  Every handler here sends the request,
 * waits for the response, and re-renders from that response alone; nothing
 * is predicted client-side.
 */

import {
  Api,
  ApiError,
  CaseView,
  SessionView,
  Span,
  SuggestionView,
  TestReport,
} from "./api.js";

interface Piece {
  text: string;
  frag: number | null;
}

/** Split text into pieces labeled with the fragment owning each span.
 * Unlabeled gaps come back with frag = null. */
export function segment(text: string, spans: (Span | null)[]): Piece[] {
  const marks = spans
    .map((s, i) => ({ s, i }))
    .filter((m): m is { s: Span; i: number } => m.s !== null)
    .sort((a, b) => a.s[0] - b.s[0]);
  const pieces: Piece[] = [];
  let at = 0;
  for (const { s, i } of marks) {
    const [lo, hi] = s;
    if (lo > at) pieces.push({ text: text.slice(at, lo), frag: null });
    if (hi > Math.max(lo, at)) {
      pieces.push({ text: text.slice(Math.max(lo, at), hi), frag: i });
      at = hi;
    }
  }
  if (at < text.length) pieces.push({ text: text.slice(at), frag: null });
  return pieces;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

interface State {
  view: SessionView | null;
  report: TestReport | null;
  overlayOpen: boolean;
  error: string | null;
  busy: boolean;
}

export interface AppOptions {
  /** differential test sizes sent to /api/validate */
  nPos?: number;
  nNeg?: number;
}

export class App {
  private state: State = { view: null, report: null, overlayOpen: false, error: null, busy: false };
  private readonly nPos: number;
  private readonly nNeg: number;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: Api,
    options: AppOptions = {},
  ) {
    this.nPos = options.nPos ?? 50;
    this.nNeg = options.nNeg ?? 50;
    this.wireHover();
    this.render();
  }

  // ----- actions (each awaits the server, then re-renders) -----------------

  async convertRegex(regex: string): Promise<void> {
    await this.guard(async () => {
      const view = await this.api.convert(regex);
      this.state.view = view;
      this.state.report = view.report;
      this.rememberSession(view.session);
      // a fresh session has nothing applied, so computing suggestions
      // immediately cannot discard review state
      await this.fetchSuggestions(view.session);
    });
  }

  async loadSession(id: string): Promise<void> {
    await this.guard(async () => {
      const view = await this.api.session(id);
      this.state.view = view;
      this.state.report = view.report;
      this.rememberSession(view.session);
    });
  }

  async refreshSuggestions(): Promise<void> {
    const view = this.state.view;
    if (!view) return;
    await this.guard(() => this.fetchSuggestions(view.session));
  }

  async toggleSuggestion(index: number): Promise<void> {
    const view = this.state.view;
    if (!view) return;
    await this.guard(async () => {
      const applied = await this.api.apply(view.session, index);
      this.state.view = applied;
      this.state.report = applied.report;
    });
  }

  async runTests(): Promise<void> {
    const view = this.state.view;
    if (!view) return;
    await this.guard(async () => {
      const { session: _s, revision, ...report } = await this.api.validate(
        view.session,
        this.nPos,
        this.nNeg,
      );
      this.state.report = report;
      view.revision = revision;
    });
  }

  private async fetchSuggestions(id: string): Promise<void> {
    await this.api.optimize(id);
    // the optimize response carries only the suggestion list; re-fetch the
    // whole session so the rendered state is exactly the server's
    const view = await this.api.session(id);
    this.state.view = view;
    this.state.report = view.report;
  }

  private async guard(work: () => Promise<void>): Promise<void> {
    this.state.busy = true;
    this.state.error = null;
    this.render();
    try {
      await work();
    } catch (err) {
      if (err instanceof ApiError) {
        const reason = typeof err.extra["reason"] === "string" ? `: ${err.extra["reason"]}` : "";
        this.state.error = `${err.kind} (${err.status}) ${err.message}${reason}`;
      } else {
        this.state.error = String(err);
      }
    } finally {
      this.state.busy = false;
      this.render();
    }
  }

  private rememberSession(id: string): void {
    const params = new URLSearchParams(window.location.search);
    params.set("session", id);
    window.history.replaceState(null, "", `?${params.toString()}`);
  }

  // ----- rendering ----------------------------------------------------------

  private render(): void {
    const { view } = this.state;
    this.root.textContent = "";

    this.root.appendChild(this.renderForm());
    if (this.state.error) {
      const banner = el("div", "banner error", this.state.error);
      banner.setAttribute("role", "alert");
      this.root.appendChild(banner);
    }
    if (!view) return;

    const badge = el("span", `badge ${view.classification}`, view.classification);
    const head = el("div", "session-head");
    head.appendChild(badge);
    head.appendChild(el("span", "session-id", `session ${view.session} · rev ${view.revision}`));
    this.root.appendChild(head);

    this.root.appendChild(this.renderRegexLine(view));
    this.root.appendChild(this.renderFragments(view));
    this.root.appendChild(this.renderDplLine(view));
    this.root.appendChild(this.renderToolbar());
    if (this.state.overlayOpen && this.state.report) {
      this.root.appendChild(this.renderOverlay(this.state.report));
    }
  }

  private renderForm(): HTMLElement {
    const form = el("form", "regex-form");
    const input = el("input", "regex-input");
    input.setAttribute("aria-label", "Regular expression");
    input.placeholder = "regex to convert";
    if (this.state.view) input.value = this.state.view.regex;
    const button = el("button", "convert-btn", "Convert");
    button.type = "submit";
    button.disabled = this.state.busy;
    form.append(input, button);
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      if (input.value.trim()) void this.convertRegex(input.value);
    });
    return form;
  }

  private renderRegexLine(view: SessionView): HTMLElement {
    const line = el("div", "regex-line");
    line.setAttribute("aria-label", "Source regex");
    for (const piece of segment(view.regex, view.fragments.map((f) => f.span))) {
      const seg = el("span", piece.frag === null ? "rx-seg" : "rx-seg owned", piece.text);
      if (piece.frag !== null) seg.dataset["frag"] = String(piece.frag);
      line.appendChild(seg);
    }
    return line;
  }

  private renderFragments(view: SessionView): HTMLElement {
    const row = el("div", "fragments");
    const byFragment = new Map<number, { index: number; s: SuggestionView }[]>();
    view.suggestions.forEach((s, index) => {
      const bucket = byFragment.get(s.fragment) ?? [];
      bucket.push({ index, s });
      byFragment.set(s.fragment, bucket);
    });

    view.fragments.forEach((frag, i) => {
      const col = el("div", "frag-col");
      const chips = el("div", "sugg-chips");
      for (const { index, s } of byFragment.get(i) ?? []) {
        const selected = view.applied.includes(index);
        const chip = el("button", selected ? "chip sugg selected" : "chip sugg", s.matcher);
        chip.type = "button";
        chip.dataset["sugg"] = String(index);
        chip.dataset["frag"] = String(i);
        chip.title = `${s.rationale} (${s.source})`;
        chip.setAttribute("aria-pressed", String(selected));
        chip.disabled = this.state.busy;
        chip.addEventListener("click", () => void this.toggleSuggestion(index));
        chips.appendChild(chip);
      }
      col.appendChild(chips);

      const unsafe = frag.unsafe_reason !== null;
      const chip = el("button", unsafe ? "chip frag unsafe" : "chip frag", frag.text);
      chip.type = "button";
      chip.dataset["frag"] = String(i);
      // tooltip: the reason a fragment is only best-effort, else its strategy
      if (unsafe) chip.title = frag.unsafe_reason as string;
      else if (frag.strategy) chip.title = frag.strategy;
      col.appendChild(chip);
      row.appendChild(col);
    });
    return row;
  }

  private renderDplLine(view: SessionView): HTMLElement {
    const line = el("div", "dpl-line");
    line.setAttribute("aria-label", "Final pattern");
    // editing here is for copying out tweaks; the authoritative pattern
    // stays on the server and every response overwrites this line
    line.setAttribute("contenteditable", "true");
    for (const piece of segment(view.dpl, view.fragments.map((f) => f.dpl_span))) {
      const seg = el("span", piece.frag === null ? "dpl-seg" : "dpl-seg owned", piece.text);
      if (piece.frag !== null) seg.dataset["frag"] = String(piece.frag);
      line.appendChild(seg);
    }
    return line;
  }

  private renderToolbar(): HTMLElement {
    const bar = el("div", "toolbar");
    const run = el("button", "run-tests", this.state.report ? "Rerun" : "Run tests");
    run.type = "button";
    run.disabled = this.state.busy;
    run.addEventListener("click", () => void this.runTests());
    bar.appendChild(run);

    const report = this.state.report;
    if (report) {
      const passed = report.positives.passed + report.negatives.passed;
      const total = report.positives.total + report.negatives.total;
      const chip = el(
        "span",
        report.passed ? "test-chip pass" : "test-chip fail",
        `${report.passed ? "PASS" : "FAIL"} ${passed}/${total}`,
      );
      bar.appendChild(chip);

      const details = el("button", "details-btn", "Details");
      details.type = "button";
      details.addEventListener("click", () => {
        this.state.overlayOpen = true;
        this.render();
      });
      bar.appendChild(details);
    }
    return bar;
  }

  private renderOverlay(report: TestReport): HTMLElement {
    const sheet = el("div", "sheet");
    sheet.setAttribute("role", "dialog");
    sheet.setAttribute("aria-label", "Test results");

    const close = el("button", "close-btn", "Close");
    close.type = "button";
    close.addEventListener("click", () => {
      this.state.overlayOpen = false;
      this.render();
    });
    sheet.appendChild(close);

    for (const diag of report.diagnostics) {
      sheet.appendChild(el("div", "diagnostic", diag));
    }

    const table = el("table", "cases");
    const head = el("tr");
    for (const title of ["", "kind", "input", "regex", "pattern"]) {
      head.appendChild(el("th", "", title));
    }
    table.appendChild(head);
    for (const c of report.failures) {
      table.appendChild(this.renderCase(c));
    }
    sheet.appendChild(table);
    return sheet;
  }

  private renderCase(c: CaseView): HTMLElement {
    const row = el("tr", c.passed ? "case" : "case fail-row");
    row.appendChild(el("td", "verdict", c.passed ? "ok" : "fail"));
    row.appendChild(el("td", "kind", c.kind));
    const input = el("td", "input");
    // JSON form keeps whitespace and control characters visible
    input.appendChild(el("code", "", JSON.stringify(c.input)));
    row.appendChild(input);
    row.appendChild(el("td", "outcome", c.regex_outcome));
    const dpl = el("td", "outcome", c.dpl_outcome);
    if (c.note) dpl.title = c.note;
    for (const [name, [want, got]] of Object.entries(c.export_diffs)) {
      dpl.appendChild(el("div", "diff", `${name}: ${want ?? "-"} vs ${got ?? "-"}`));
    }
    row.appendChild(dpl);
    return row;
  }

  /** Hovering or focusing anything labeled with a fragment index highlights
   * every element owned by that fragment: its chip, its slice of the source
   * regex, and its slice of the pattern. */
  private wireHover(): void {
    const mark = (ev: Event, on: boolean) => {
      const target = (ev.target as HTMLElement | null)?.closest?.("[data-frag]");
      if (!(target instanceof HTMLElement)) return;
      const frag = target.dataset["frag"];
      if (frag === undefined) return;
      for (const node of this.root.querySelectorAll(`[data-frag="${frag}"]`)) {
        node.classList.toggle("hl", on);
      }
    };
    this.root.addEventListener("mouseover", (ev) => mark(ev, true));
    this.root.addEventListener("mouseout", (ev) => mark(ev, false));
    this.root.addEventListener("focusin", (ev) => mark(ev, true));
    this.root.addEventListener("focusout", (ev) => mark(ev, false));
  }
}
