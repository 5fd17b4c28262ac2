import { SuggestionItem, SuggestResponse } from "./types.js";

/**
 * What a categorical dropdown shows: endorsed suggestions pinned above a
 * divider (service order, with probabilities), every other candidate
 * alphabetical below it.
 */
export interface OptionList {
  pinned: SuggestionItem[];
  rest: string[];
}

export function buildOptionList(
  candidates: string[],
  suggestion: SuggestResponse | null
): OptionList {
  const alphabetical = [...candidates].sort((a, b) => a.localeCompare(b));
  if (!suggestion || !suggestion.endorsed || suggestion.items.length === 0) {
    return { pinned: [], rest: alphabetical };
  }
  const universe = new Set(candidates);
  // never pin a value outside the field's candidate universe
  const pinned = suggestion.items.filter((item) => universe.has(item.value));
  const pinnedValues = new Set(pinned.map((item) => item.value));
  return {
    pinned,
    rest: alphabetical.filter((value) => !pinnedValues.has(value)),
  };
}

/**
 * Case-insensitive prefix filter over both sections; the pinned-above-
 * divider structure is preserved.
 */
export function filterByPrefix(list: OptionList, prefix: string): OptionList {
  const needle = prefix.trim().toLowerCase();
  if (!needle) {
    return { pinned: [...list.pinned], rest: [...list.rest] };
  }
  return {
    pinned: list.pinned.filter((item) =>
      item.value.toLowerCase().startsWith(needle)
    ),
    rest: list.rest.filter((value) => value.toLowerCase().startsWith(needle)),
  };
}

export function isEmpty(list: OptionList): boolean {
  return list.pinned.length === 0 && list.rest.length === 0;
}
