/**
 * Editable combobox with a filtering listbox popup, per the WAI-ARIA
 * combobox pattern: the input carries role=combobox, aria-expanded,
 * aria-controls and aria-activedescendant; options are li[role=option].
 * Fully keyboard operable: arrows move, Enter selects, Escape closes,
 * typing filters.
 */

import { uniqueId } from "./a11y.js";

export interface ComboOption {
  value: string;
  label: string;
}

type OptionSource =
  | ComboOption[]
  | ((query: string) => Promise<ComboOption[]>);

export class Combobox {
  readonly root: HTMLDivElement;
  readonly input: HTMLInputElement;
  readonly listbox: HTMLUListElement;
  private options: ComboOption[] = [];
  private activeIndex = -1;
  private requestSeq = 0;

  constructor(
    label: string,
    private source: OptionSource,
    private onSelect: (option: ComboOption) => void,
  ) {
    const comboId = uniqueId("combo");
    const listId = `${comboId}-listbox`;

    this.root = document.createElement("div");
    this.root.className = "combobox";

    const labelNode = document.createElement("label");
    labelNode.htmlFor = comboId;
    labelNode.textContent = label;

    this.input = document.createElement("input");
    this.input.type = "text";
    this.input.id = comboId;
    this.input.setAttribute("role", "combobox");
    this.input.setAttribute("aria-expanded", "false");
    this.input.setAttribute("aria-controls", listId);
    this.input.setAttribute("aria-autocomplete", "list");
    this.input.autocomplete = "off";

    this.listbox = document.createElement("ul");
    this.listbox.id = listId;
    this.listbox.setAttribute("role", "listbox");
    this.listbox.setAttribute("aria-label", label);
    this.listbox.hidden = true;

    this.input.addEventListener("input", () => {
      void this.refresh(this.input.value);
    });
    this.input.addEventListener("keydown", (event) => this.onKey(event));
    this.listbox.addEventListener("click", (event) => {
      const item = (event.target as HTMLElement).closest("[role=option]");
      if (item instanceof HTMLElement) {
        this.choose(Number(item.dataset["index"]));
      }
    });

    this.root.append(labelNode, this.input, this.listbox);
  }

  get expanded(): boolean {
    return this.input.getAttribute("aria-expanded") === "true";
  }

  async open(): Promise<void> {
    await this.refresh(this.input.value);
  }

  close(): void {
    this.listbox.hidden = true;
    this.input.setAttribute("aria-expanded", "false");
    this.input.removeAttribute("aria-activedescendant");
    this.activeIndex = -1;
  }

  private async refresh(query: string): Promise<void> {
    const seq = ++this.requestSeq;
    const all = Array.isArray(this.source)
      ? this.filter(this.source, query)
      : await this.source(query);
    if (seq !== this.requestSeq) return; // a newer query superseded this one
    this.options = all;
    this.listbox.textContent = "";
    all.forEach((option, index) => {
      const item = document.createElement("li");
      item.id = `${this.listbox.id}-option-${index}`;
      item.setAttribute("role", "option");
      item.setAttribute("aria-selected", "false");
      item.dataset["index"] = String(index);
      item.textContent = option.label;
      this.listbox.append(item);
    });
    this.listbox.hidden = all.length === 0;
    this.input.setAttribute("aria-expanded", all.length ? "true" : "false");
    this.setActive(all.length ? 0 : -1);
  }

  private filter(options: ComboOption[], query: string): ComboOption[] {
    const needle = query.trim().toLocaleLowerCase();
    if (!needle) return options;
    return options.filter((o) => o.label.toLocaleLowerCase().includes(needle));
  }

  private setActive(index: number): void {
    this.activeIndex = index;
    const items = this.listbox.querySelectorAll("[role=option]");
    items.forEach((item, i) => {
      item.setAttribute("aria-selected", i === index ? "true" : "false");
      item.classList.toggle("active", i === index);
    });
    if (index >= 0 && items[index]) {
      this.input.setAttribute("aria-activedescendant", items[index].id);
    } else {
      this.input.removeAttribute("aria-activedescendant");
    }
  }

  private onKey(event: KeyboardEvent): void {
    switch (event.key) {
      case "ArrowDown":
        event.preventDefault();
        if (!this.expanded) {
          void this.open();
        } else {
          this.setActive(Math.min(this.activeIndex + 1,
                                  this.options.length - 1));
        }
        break;
      case "ArrowUp":
        event.preventDefault();
        if (this.expanded) this.setActive(Math.max(this.activeIndex - 1, 0));
        break;
      case "Home":
        if (this.expanded) {
          event.preventDefault();
          this.setActive(0);
        }
        break;
      case "End":
        if (this.expanded) {
          event.preventDefault();
          this.setActive(this.options.length - 1);
        }
        break;
      case "Enter":
        if (this.expanded && this.activeIndex >= 0) {
          event.preventDefault();
          this.choose(this.activeIndex);
        }
        break;
      case "Escape":
        if (this.expanded) {
          event.preventDefault();
          this.close();
        }
        break;
    }
  }

  private choose(index: number): void {
    const option = this.options[index];
    if (!option) return;
    this.input.value = option.label;
    this.close();
    this.onSelect(option);
  }
}
