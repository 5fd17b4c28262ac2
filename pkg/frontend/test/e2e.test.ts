import assert from "node:assert/strict";
import { test } from "node:test";

import { ApiClient } from "../src/api.js";
import { filterByPrefix } from "../src/options.js";
import { FormViewState } from "../src/state.js";

const base = process.env.FIELDSENSE_API;

// Runs only when a live service is provided, e.g. from the repo root:
//   python3 -m pytest tests/test_ui_acceptance.py -s
test("live loop: pin on entry, restore on clear, filter keeps pins", { skip: !base }, async () => {
  const api = new ApiClient(base!);
  const schema = await api.fetchSchema();
  const state = new FormViewState(schema, api);
  state.scheduleRefresh.cancel();

  // entering company type = Leasing pins suggested values with probabilities
  state.setFieldValue("company type", "Leasing");
  state.scheduleRefresh.cancel();
  await state.refreshSuggestions();
  const pinnedView = state.optionsFor("primary activity");
  assert.ok(pinnedView.pinned.length >= 1, "expected pinned suggestions");
  assert.equal(pinnedView.pinned[0].value, "Leasing Service");
  assert.ok(pinnedView.pinned[0].probability > 0.7);
  assert.ok(!pinnedView.rest.includes("Leasing Service"));

  // first-letter filtering preserves the pinned section
  const filtered = filterByPrefix(pinnedView, "L");
  assert.deepEqual(filtered.pinned.map((i) => i.value), ["Leasing Service"]);
  assert.ok(filtered.rest.every((v) => v.toLowerCase().startsWith("l")));

  // clearing the field restores the plain alphabetical list
  state.setFieldValue("company type", "");
  state.scheduleRefresh.cancel();
  await state.refreshSuggestions();
  const cleared = state.optionsFor("primary activity");
  assert.equal(cleared.pinned.length, 0);
  assert.deepEqual(cleared.rest, [...cleared.rest].sort((a, b) => a.localeCompare(b)));
  assert.ok(cleared.rest.includes("Leasing Service"));
});
