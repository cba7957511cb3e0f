/**
 * DOM rendering: one function from View to elements, no framework.
 * Rows are rendered verbatim in server order.
 */

import type { SessionStore, UiRow, View } from "./state.js";

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

function verdictLabel(row: UiRow): string {
  if (row.verdict === "accepted") return "accepted";
  if (row.verdict === "rejected") return "rejected";
  return "";
}

function rowElement(
  row: UiRow,
  index: number,
  selected: boolean,
  store: SessionStore,
): HTMLTableRowElement {
  const tr = el("tr", `candidate ${row.verdict}${selected ? " selected" : ""}`);
  tr.append(
    el("td", "rank", String(row.rank)),
    el("td", "lemmas", row.words.join(", ")),
    el("td", "synset", row.synsetId),
    el("td", "score", row.score.toFixed(4)),
    el("td", "verdict", verdictLabel(row)),
  );
  const actions = el("td", "actions");
  const accept = el("button", "accept", "accept");
  accept.addEventListener("click", () => void store.decide(index, "accept"));
  const reject = el("button", "reject", "reject");
  reject.addEventListener("click", () => void store.decide(index, "reject"));
  actions.append(accept, reject);
  tr.append(actions);
  tr.addEventListener("click", () => store.select(index));
  return tr;
}

function wordScreen(view: View & { kind: "word" }, store: SessionStore) {
  const main = el("div", "word-screen");
  const header = el("header");
  header.append(
    el("h1", "query-word", view.word),
    el("span", "progress", `${view.position} of ${view.total}`),
  );
  main.append(header);

  const table = el("table", "candidates");
  const head = el("tr");
  for (const col of ["rank", "lemmas", "synset", "score", "verdict", ""]) {
    head.append(el("th", undefined, col));
  }
  table.append(head);
  view.rows.forEach((row, i) => {
    table.append(rowElement(row, i, i === view.selected, store));
  });
  main.append(table);

  const anyAccepted = view.rows.some((r) => r.verdict === "accepted");
  const commit = el("button", "commit", "commit");
  commit.disabled = !anyAccepted || view.committing;
  commit.addEventListener("click", () => void store.commit());
  main.append(commit);

  if (view.error) {
    main.append(el("div", "toast error", view.error));
  }
  main.append(
    el(
      "p",
      "hint",
      "a accept / r reject / enter commit / arrows move",
    ),
  );
  return main;
}

/** Replace root's content with the rendering of the current view. */
export function render(view: View, root: HTMLElement, store: SessionStore) {
  root.textContent = "";
  switch (view.kind) {
    case "loading":
      root.append(el("p", "loading", "loading..."));
      return;
    case "disconnected": {
      const banner = el("div", "banner error");
      banner.append(
        el("p", undefined, `service unreachable: ${view.message}`),
      );
      const retry = el("button", "retry", "retry");
      retry.addEventListener("click", () => void store.start());
      banner.append(retry);
      root.append(banner);
      return;
    }
    case "done": {
      const done = el("div", "done-screen");
      done.append(
        el("h1", undefined, "queue empty"),
        el("p", undefined, `${view.committed} words committed this session`),
      );
      root.append(done);
      return;
    }
    case "word":
      root.append(wordScreen(view, store));
  }
}
