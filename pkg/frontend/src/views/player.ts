/** In-browser playback of one part via a native audio element.
 *
 * The element issues its own HTTP range requests against the audio endpoint.
 * Impaired sessions re-check the part's status field before the element is
 * ever given a source.
 */

import { heading } from "../a11y.js";
import type { App } from "../app.js";
import { t } from "../i18n.js";
import { visibleParts } from "./book.js";

export async function renderPlayer(app: App, root: HTMLElement,
                                   params: string[]): Promise<void> {
  const partCode = Number(params[0] ?? "0");
  const bookCode = Math.floor(partCode / 100);
  const found = await app.api.bookParts(bookCode);
  const role = app.session?.role ?? null;
  const part = visibleParts(found.parts, role)
    .find((candidate) => candidate.part_code === partCode);

  root.append(heading(1, t("player.title")));
  if (!part) {
    const blocked = document.createElement("p");
    blocked.textContent = t("player.blocked");
    root.append(blocked);
    return;
  }

  const caption = document.createElement("p");
  caption.id = "player-caption";
  caption.textContent = t("player.of", { title: part.part_name });

  const audio = document.createElement("audio");
  audio.controls = true;
  audio.preload = "metadata";
  audio.src = app.api.audioUrl(part.part_code);
  audio.setAttribute("aria-labelledby", caption.id);

  const download = document.createElement("a");
  download.href = app.api.audioUrl(part.part_code);
  download.setAttribute("download", `${part.part_code}.mp3`);
  download.textContent = t("player.download");

  const back = document.createElement("a");
  back.href = `#/book/${bookCode}`;
  back.textContent = t("book.title", { title: String(bookCode) });

  root.append(caption, audio, download, back);
}
