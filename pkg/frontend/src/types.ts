/** Wire formats of the suggestion service. */

export type FieldKind = "categorical" | "numerical" | "textual" | "file";

export interface FieldSchema {
  name: string;
  kind: FieldKind;
  candidates?: string[];
  mandatory: boolean;
  tab_index: number;
}

export interface FormSchema {
  name: string;
  fields: FieldSchema[];
}

export interface SuggestionItem {
  value: string;
  probability: number;
}

export interface SuggestResponse {
  endorsed: boolean;
  items: SuggestionItem[];
  model_used: string;
  check_dep: boolean;
  check_prob: boolean;
  top_mass: number;
  n_r: number;
  target: string;
  latency_ms: number;
}
