/** Entry point: wire the API client, store, renderer and shortcuts. */

import { AnnotationApi } from "./api.js";
import { annotatorFrom, baseUrlFrom } from "./config.js";
import { bindKeys } from "./keyboard.js";
import { render } from "./render.js";
import { SessionStore } from "./state.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

const api = new AnnotationApi(baseUrlFrom(window.location));
const store = new SessionStore(api, annotatorFrom(window.location));
store.onChange((view) => render(view, root, store));

bindKeys(window, {
  accept: () => {
    const v = store.view;
    if (v.kind === "word") void store.decide(v.selected, "accept");
  },
  reject: () => {
    const v = store.view;
    if (v.kind === "word") void store.decide(v.selected, "reject");
  },
  commit: () => void store.commit(),
  move: (delta) => store.moveSelection(delta),
});

void store.start();
