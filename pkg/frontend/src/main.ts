import { ApiClient } from "./api.js";
import { broadcastUpdate, renderErrorBanner, renderForm } from "./render.js";
import { FormViewState } from "./state.js";

const DEFAULT_API = "http://127.0.0.1:8040";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app container");
  }
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("api") ?? DEFAULT_API);
  try {
    const schema = await api.fetchSchema();
    const state = new FormViewState(schema, api, {
      onUpdate: () => broadcastUpdate(root),
    });
    renderForm(root, state);
    document.title = `${schema.name} — fieldsense demo`;
  } catch (err) {
    renderErrorBanner(root, `cannot reach the suggestion service: ${err}`);
  }
}

void boot();
