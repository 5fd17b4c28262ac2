import assert from "node:assert/strict";
import { test } from "node:test";

import { buildOptionList, filterByPrefix, isEmpty } from "../src/options.js";
import { SuggestResponse } from "../src/types.js";

const CANDIDATES = [
  "Accommodation Service",
  "Air transport",
  "Catering",
  "Financial Service",
  "Leasing Service",
];

function endorsed(items: Array<[string, number]>): SuggestResponse {
  return {
    endorsed: true,
    items: items.map(([value, probability]) => ({ value, probability })),
    model_used: "global",
    check_dep: true,
    check_prob: true,
    top_mass: 0.9,
    n_r: items.length,
    target: "primary activity",
    latency_ms: 1,
  };
}

test("endorsed suggestions pin in service order above alphabetical rest", () => {
  const list = buildOptionList(
    CANDIDATES,
    endorsed([
      ["Leasing Service", 0.7],
      ["Financial Service", 0.15],
      ["Accommodation Service", 0.05],
    ])
  );
  assert.deepEqual(
    list.pinned.map((i) => i.value),
    ["Leasing Service", "Financial Service", "Accommodation Service"]
  );
  assert.deepEqual(list.pinned.map((i) => i.probability), [0.7, 0.15, 0.05]);
  assert.deepEqual(list.rest, ["Air transport", "Catering"]);
});

test("values outside the candidate universe are never pinned", () => {
  const list = buildOptionList(
    CANDIDATES,
    endorsed([
      ["Leasing Service", 0.6],
      ["Smuggling", 0.3],
    ])
  );
  assert.deepEqual(list.pinned.map((i) => i.value), ["Leasing Service"]);
  assert.ok(!list.rest.includes("Smuggling"));
});

test("no suggestion means a plain alphabetical list", () => {
  const list = buildOptionList(CANDIDATES, null);
  assert.deepEqual(list.pinned, []);
  assert.deepEqual(list.rest, [...CANDIDATES].sort());
});

test("unendorsed response also restores the alphabetical list", () => {
  const response = endorsed([]);
  response.endorsed = false;
  const list = buildOptionList(CANDIDATES, response);
  assert.deepEqual(list.pinned, []);
  assert.equal(list.rest.length, CANDIDATES.length);
});

test("prefix filtering keeps the pinned section above the divider", () => {
  const list = buildOptionList(
    CANDIDATES,
    endorsed([
      ["Leasing Service", 0.7],
      ["Accommodation Service", 0.05],
    ])
  );
  const filtered = filterByPrefix(list, "a");
  assert.deepEqual(filtered.pinned.map((i) => i.value), ["Accommodation Service"]);
  assert.deepEqual(filtered.rest, ["Air transport"]);
});

test("empty prefix returns the full structured list", () => {
  const list = buildOptionList(CANDIDATES, endorsed([["Catering", 0.8]]));
  const filtered = filterByPrefix(list, "  ");
  assert.deepEqual(filtered, list);
});

test("prefix without matches empties both sections", () => {
  const list = buildOptionList(CANDIDATES, endorsed([["Catering", 0.8]]));
  const filtered = filterByPrefix(list, "zz");
  assert.ok(isEmpty(filtered));
});
