/**
 * Live regions and focus management. Every async operation reports into the
 * polite status region; errors land in the assertive alert region and take
 * focus so keyboard and screen-reader users meet them immediately.
 */

let statusRegion: HTMLElement | null = null;
let alertRegion: HTMLElement | null = null;

/** Create the shared live regions once, right after <main>. */
export function installLiveRegions(host: HTMLElement): void {
  statusRegion = document.createElement("p");
  statusRegion.id = "status-region";
  statusRegion.className = "visually-hidden";
  statusRegion.setAttribute("role", "status");
  statusRegion.setAttribute("aria-live", "polite");

  alertRegion = document.createElement("p");
  alertRegion.id = "alert-region";
  alertRegion.className = "alert";
  alertRegion.setAttribute("role", "alert");
  alertRegion.tabIndex = -1;
  alertRegion.hidden = true;

  host.append(alertRegion, statusRegion);
}

/** Announce a polite status update (does not steal focus). */
export function announce(message: string): void {
  if (!statusRegion) return;
  statusRegion.textContent = "";
  statusRegion.textContent = message;
}

/** Surface an error: announced assertively and focused. */
export function alertError(message: string): void {
  if (!alertRegion) return;
  alertRegion.hidden = false;
  alertRegion.textContent = message;
  alertRegion.focus();
}

export function clearAlert(): void {
  if (!alertRegion) return;
  alertRegion.hidden = true;
  alertRegion.textContent = "";
}

let idCounter = 0;

export function uniqueId(prefix: string): string {
  idCounter += 1;
  return `${prefix}-${idCounter}`;
}

/** A labelled form row: <label for> wired to the control. */
export function field(labelText: string, control: HTMLInputElement
    | HTMLSelectElement | HTMLTextAreaElement): HTMLDivElement {
  const row = document.createElement("div");
  row.className = "field";
  const label = document.createElement("label");
  label.htmlFor = control.id ||= uniqueId("field");
  label.textContent = labelText;
  row.append(label, control);
  return row;
}

export function heading(level: 1 | 2 | 3, text: string): HTMLHeadingElement {
  const node = document.createElement(`h${level}`) as HTMLHeadingElement;
  node.textContent = text;
  return node;
}

export function button(label: string, onActivate: () => void,
                       kind: "button" | "submit" = "button"): HTMLButtonElement {
  const node = document.createElement("button");
  node.type = kind;
  node.textContent = label;
  if (kind === "button") node.addEventListener("click", onActivate);
  return node;
}

/** Move focus to the screen's main heading after a route change. */
export function focusMainHeading(root: HTMLElement): void {
  const target = root.querySelector("h1");
  if (target instanceof HTMLElement) {
    target.tabIndex = -1;
    target.focus();
  }
}
