/** One book's approved parts with listen/download actions.
 *
 * The status re-check here is a hard rule: an impaired session never renders
 * a part whose status field is not Approved, no matter what the transport
 * returned.
 */

import { heading } from "../a11y.js";
import type { App } from "../app.js";
import type { Part } from "../api.js";
import { t } from "../i18n.js";

export function visibleParts(parts: Part[], role: string | null): Part[] {
  if (role === "Admin") return parts;
  if (role === "Volunteer") return parts;  // server scopes to own + approved
  return parts.filter((part) => part.status === "Approved");
}

export async function renderBook(app: App, root: HTMLElement,
                                 params: string[]): Promise<void> {
  const bookCode = Number(params[0] ?? "0");
  const found = await app.api.bookParts(bookCode);
  const role = app.session?.role ?? null;
  const parts = visibleParts(found.parts, role);

  root.append(heading(1, t("book.title", { title: String(bookCode) })));
  const partsHeading = heading(2, t("book.parts"));
  partsHeading.id = "book-parts";
  const list = document.createElement("ul");
  list.className = "rows";
  list.setAttribute("aria-labelledby", partsHeading.id);
  root.append(partsHeading, list);

  for (const part of parts) {
    const row = document.createElement("li");
    const label = document.createElement("span");
    const duration = part.duration_seconds != null
      ? ` (${t("part.duration", { seconds: Math.round(part.duration_seconds) })})`
      : "";
    label.textContent = `${part.part_name}${duration} `;
    const listen = document.createElement("a");
    listen.href = `#/player/${part.part_code}`;
    listen.textContent = t("book.listen", { name: part.part_name });
    const download = document.createElement("a");
    download.href = app.api.audioUrl(part.part_code);
    download.setAttribute("download", `${part.part_code}.mp3`);
    download.textContent = t("book.download", { name: part.part_name });
    row.append(label, listen, document.createTextNode(" "), download);
    list.append(row);
  }
  if (!parts.length) {
    const row = document.createElement("li");
    row.textContent = t("book.parts.empty");
    list.append(row);
  }
}
