/**
 * DOM binding: writing area with an underline backdrop, suggestion
 * dropdown, corrections strip, translate button and pane, consent
 * toggle, and a dictionary sidebar.
 */

import { ServiceClient } from "./api.js";
import { Editor } from "./editor.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function escapeHtml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function mount(root: HTMLElement, editor: Editor, client: ServiceClient): void {
  const main = el("div", "wk-main");
  const backdrop = el("div", "wk-backdrop");
  const textarea = el("textarea", "wk-input");
  textarea.spellcheck = false;
  const editorWrap = el("div", "wk-editor");
  editorWrap.append(backdrop, textarea);

  const dropdown = el("ul", "wk-dropdown");
  const corrections = el("div", "wk-corrections");
  const toast = el("div", "wk-toast");

  const controls = el("div", "wk-controls");
  const translateBtn = el("button", "wk-translate", "Translate");
  const consentLabel = el("label", "wk-consent");
  const consentBox = el("input");
  consentBox.type = "checkbox";
  consentLabel.append(consentBox, document.createTextNode(" share usage events"));
  controls.append(translateBtn, consentLabel);
  const pane = el("div", "wk-translation");

  main.append(editorWrap, dropdown, corrections, toast, controls, pane);

  const sidebar = el("div", "wk-sidebar");
  const lookupInput = el("input", "wk-lookup-q");
  lookupInput.placeholder = "dictionary lookup";
  const lookupResults = el("div", "wk-lookup-results");
  sidebar.append(lookupInput, lookupResults);

  root.append(main, sidebar);

  textarea.addEventListener("input", () => {
    editor.setDocument(textarea.value, textarea.selectionStart ?? textarea.value.length);
  });
  textarea.addEventListener("click", () => {
    editor.setDocument(textarea.value, textarea.selectionStart ?? 0);
  });
  textarea.addEventListener("keydown", (ev) => {
    if (editor.dropdown === null) return;
    if (ev.key === "ArrowDown") {
      ev.preventDefault();
      editor.moveSelection(1);
    } else if (ev.key === "ArrowUp") {
      ev.preventDefault();
      editor.moveSelection(-1);
    } else if (ev.key === "Enter" || ev.key === "Tab") {
      ev.preventDefault();
      editor.acceptSuggestion(editor.dropdown.selected);
    } else if (ev.key === "Escape") {
      editor.closeDropdown();
    }
  });

  translateBtn.addEventListener("click", () => {
    void editor.requestTranslation();
  });
  consentBox.addEventListener("change", () => editor.setConsent(consentBox.checked));

  let lookupTimer: ReturnType<typeof setTimeout> | null = null;
  lookupInput.addEventListener("input", () => {
    if (lookupTimer !== null) clearTimeout(lookupTimer);
    lookupTimer = setTimeout(() => {
      const q = lookupInput.value.trim();
      if (!q) {
        lookupResults.replaceChildren();
        return;
      }
      client.lookup(q, 2, 10).then(
        (res) => {
          lookupResults.replaceChildren(
            ...res.matches.map((m) => {
              const row = el("div", "wk-lookup-row");
              row.append(
                el("b", undefined, m.headword),
                el("span", "wk-gloss", " " + m.glosses.map((g) => g.text).join(", ")),
              );
              return row;
            }),
          );
        },
        () => lookupResults.replaceChildren(el("div", "wk-gloss", "lookup unavailable")),
      );
    }, 200);
  });

  function renderBackdrop(): void {
    const doc = editor.doc;
    let html = "";
    let pos = 0;
    for (const flag of [...editor.flags].sort((a, b) => a.start - b.start)) {
      html += escapeHtml(doc.slice(pos, flag.start));
      html += `<u class="wk-flag">${escapeHtml(doc.slice(flag.start, flag.end))}</u>`;
      pos = flag.end;
    }
    html += escapeHtml(doc.slice(pos));
    backdrop.innerHTML = html + "\n";
  }

  function render(): void {
    if (textarea.value !== editor.doc) {
      textarea.value = editor.doc;
      textarea.setSelectionRange(editor.caret, editor.caret);
    }
    renderBackdrop();

    const dd = editor.dropdown;
    dropdown.replaceChildren(
      ...(dd?.items ?? []).map((item, i) => {
        const li = el("li", i === dd?.selected ? "wk-item wk-selected" : "wk-item");
        li.append(el("span", "wk-token", item.token));
        if (item.gloss) li.append(el("span", "wk-gloss", " " + item.gloss));
        li.addEventListener("mousedown", (ev) => {
          ev.preventDefault();
          editor.acceptSuggestion(i);
        });
        return li;
      }),
    );
    dropdown.style.display = dd ? "block" : "none";

    corrections.replaceChildren(
      ...editor.flags.map((flag, fi) => {
        const row = el("div", "wk-flag-row");
        row.append(el("span", "wk-flag-token", flag.token + ": "));
        flag.suggestions.forEach((c, ri) => {
          const btn = el("button", "wk-fix", c.token);
          btn.addEventListener("click", () => editor.acceptCorrection(fi, ri));
          row.append(btn);
        });
        return row;
      }),
    );

    toast.textContent = editor.toast;
    toast.style.display = editor.toast ? "block" : "none";
    translateBtn.disabled = editor.doc.trim() === "" || editor.translating;
    pane.textContent = editor.translating ? "translating…" : editor.translation;
  }

  editor.subscribe(render);
  render();
}
