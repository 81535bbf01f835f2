// Entry point: ?server=http://127.0.0.1:8777&dialogue=<id>

import { ApiClient } from "./api";
import { render } from "./render";
import { AnnotationStore } from "./store";

const params = new URLSearchParams(window.location.search);
const server = params.get("server") ?? "http://127.0.0.1:8777";
const dialogueId = params.get("dialogue");

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

const store = new AnnotationStore(new ApiClient(server));
store.subscribe(() => render(root, store));
render(root, store);

async function boot(): Promise<void> {
  const api = new ApiClient(server);
  if (dialogueId) {
    await store.open(dialogueId);
    return;
  }
  const dialogues = await api.listDialogues();
  if (dialogues.length) {
    await store.open(dialogues[0].id);
  } else {
    root!.textContent = `no dialogues on ${server}; create one via POST /dialogues or cgw import`;
  }
}

boot().catch((error) => {
  root!.textContent = `failed to load: ${error}`;
});
