/** Test drivers: booting the shell, keyboard-only interaction, waiting. */

import { boot } from "../src/main.js";
import type { App } from "../src/app.js";
import { FakeApi } from "./fake_api.js";

export function freshDom(): void {
  document.body.textContent = "";
  document.title = "Audio Library";
  sessionStorage.clear();
  location.hash = "";
}

export function bootApp(fake: FakeApi): App {
  fake.install();
  freshDom();
  return boot(document);
}

export async function flush(times = 6): Promise<void> {
  for (let i = 0; i < times; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export async function waitFor<T>(probe: () => T | null | undefined | false,
                                 what = "condition"): Promise<T> {
  for (let attempt = 0; attempt < 400; attempt++) {
    const result = probe();
    if (result) return result;
    await new Promise((resolve) => setTimeout(resolve, 5));
  }
  throw new Error(`timed out waiting for ${what}`);
}

export async function goto(app: App, hash: string): Promise<void> {
  app.navigate(hash);
  await flush();
}

/**
 * Keyboard activation the way a user agent does it: focus the control,
 * dispatch the key, and fire the resulting click for buttons and links
 * unless a handler prevented the default.
 */
export function press(element: HTMLElement, key: string,
                      init: KeyboardEventInit = {}): void {
  element.focus();
  const event = new KeyboardEvent("keydown",
    { key, bubbles: true, cancelable: true, ...init });
  const proceed = element.dispatchEvent(event);
  if (!proceed) return;
  const activates = key === "Enter" ||
    (key === " " && element instanceof HTMLButtonElement);
  if (activates && (element instanceof HTMLButtonElement ||
                    element instanceof HTMLAnchorElement)) {
    element.click();
  }
}

/** Fill a labelled control, dispatching the input event listeners expect. */
export function type(control: HTMLInputElement | HTMLTextAreaElement |
                     HTMLSelectElement, value: string): void {
  control.focus();
  control.value = value;
  control.dispatchEvent(new Event("input", { bubbles: true }));
  control.dispatchEvent(new Event("change", { bubbles: true }));
}

export function findByText<T extends HTMLElement>(selector: string,
                                                  text: string): T | null {
  for (const node of document.querySelectorAll<T>(selector)) {
    if ((node.textContent ?? "").includes(text)) return node;
  }
  return null;
}

export function labelled(labelText: string): HTMLInputElement |
    HTMLTextAreaElement | HTMLSelectElement {
  for (const label of document.querySelectorAll("label")) {
    if ((label.textContent ?? "").trim() === labelText && label.htmlFor) {
      const control = document.getElementById(label.htmlFor);
      if (control) {
        return control as HTMLInputElement;
      }
    }
  }
  throw new Error(`no field labelled ${labelText}`);
}

export function statusText(): string {
  return document.getElementById("status-region")?.textContent ?? "";
}

export function mainRegion(): HTMLElement {
  return document.querySelector("main")!;
}
