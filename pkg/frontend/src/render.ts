import { filterByPrefix, isEmpty, OptionList } from "./options.js";
import { FormViewState } from "./state.js";
import { FieldSchema } from "./types.js";

function probabilityLabel(p: number): string {
  return p.toFixed(2);
}

function renderOptionRows(
  container: HTMLElement,
  list: OptionList,
  pick: (value: string) => void
): void {
  container.textContent = "";
  for (const item of list.pinned) {
    const row = document.createElement("div");
    row.className = "option pinned";
    row.dataset.value = item.value;
    const label = document.createElement("span");
    label.textContent = item.value;
    const prob = document.createElement("span");
    prob.className = "prob";
    prob.textContent = probabilityLabel(item.probability);
    row.append(label, prob);
    row.addEventListener("mousedown", () => pick(item.value));
    container.appendChild(row);
  }
  if (list.pinned.length > 0) {
    const divider = document.createElement("div");
    divider.className = "divider";
    container.appendChild(divider);
  }
  for (const value of list.rest) {
    const row = document.createElement("div");
    row.className = "option";
    row.dataset.value = value;
    row.textContent = value;
    row.addEventListener("mousedown", () => pick(value));
    container.appendChild(row);
  }
  if (isEmpty(list)) {
    const none = document.createElement("div");
    none.className = "no-match";
    none.textContent = "no match";
    container.appendChild(none);
  }
}

function renderCategorical(
  field: FieldSchema,
  state: FormViewState
): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "select";
  const input = document.createElement("input");
  input.type = "text";
  input.tabIndex = field.tab_index + 1;
  input.autocomplete = "off";
  input.placeholder = "select or type a letter…";
  const dropdown = document.createElement("div");
  dropdown.className = "dropdown";
  dropdown.hidden = true;

  const note = document.createElement("div");
  note.className = "note";

  const repaint = () => {
    const view = state.fields.get(field.name)!;
    const options = filterByPrefix(state.optionsFor(field.name), input.value);
    renderOptionRows(dropdown, options, (value) => {
      input.value = value;
      state.setFieldValue(field.name, value);
      dropdown.hidden = true;
    });
    const suggestion = view.suggestion;
    if (view.failed) {
      note.textContent = "suggestions unavailable (will retry on next edit)";
    } else if (suggestion && !suggestion.endorsed) {
      note.textContent = "no confident suggestion";
      note.title =
        `check_dep=${suggestion.check_dep} check_prob=${suggestion.check_prob} ` +
        `top_mass=${suggestion.top_mass.toFixed(3)}`;
    } else {
      note.textContent = "";
      note.title = "";
    }
  };

  input.addEventListener("focus", () => {
    dropdown.hidden = false;
    repaint();
  });
  input.addEventListener("blur", () => {
    setTimeout(() => (dropdown.hidden = true), 150);
  });
  input.addEventListener("input", () => {
    dropdown.hidden = false;
    state.setFieldValue(field.name, input.value);
    repaint();
  });

  wrap.append(input, dropdown, note);
  wrap.addEventListener("fieldsense:update", repaint);
  return wrap;
}

function renderPlain(field: FieldSchema, state: FormViewState): HTMLElement {
  const input = document.createElement("input");
  input.type = field.kind === "numerical" ? "number" : field.kind === "file" ? "file" : "text";
  input.tabIndex = field.tab_index + 1;
  input.addEventListener("input", () => state.setFieldValue(field.name, input.value));
  return input;
}

/** Build the whole form; widgets follow the schema's tab order. */
export function renderForm(root: HTMLElement, state: FormViewState): void {
  root.textContent = "";
  const form = document.createElement("div");
  form.className = "form";
  const ordered = [...state.schema.fields].sort((a, b) => a.tab_index - b.tab_index);
  for (const field of ordered) {
    const row = document.createElement("label");
    row.className = "field";
    const caption = document.createElement("span");
    caption.className = "caption";
    caption.textContent = field.name + (field.mandatory ? " *" : "");
    row.appendChild(caption);
    row.appendChild(
      field.kind === "categorical"
        ? renderCategorical(field, state)
        : renderPlain(field, state)
    );
    form.appendChild(row);
  }
  root.appendChild(form);
}

export function renderErrorBanner(root: HTMLElement, message: string): void {
  const banner = document.createElement("div");
  banner.className = "banner error";
  banner.textContent = message;
  root.prepend(banner);
}

/** Nudge every select to repaint after a state update. */
export function broadcastUpdate(root: HTMLElement): void {
  root.querySelectorAll(".select").forEach((el) => {
    el.dispatchEvent(new Event("fieldsense:update"));
  });
}
