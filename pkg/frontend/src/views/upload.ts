/** Part upload with a progress bar fed by the server's own byte accounting. */

import { announce, button, field, heading } from "../a11y.js";
import { requireRole, type App } from "../app.js";
import { Combobox, type ComboOption } from "../combobox.js";
import { t } from "../i18n.js";
import { PartUploader } from "../uploader.js";

export async function renderUpload(app: App, root: HTMLElement,
                                   params: string[]): Promise<void> {
  requireRole(app, "Volunteer");
  root.append(heading(1, t("upload.title")));

  const assigned = await app.api.assignedBooks();
  const options: ComboOption[] = assigned.books
    .filter((book) => book.status === "InRecording")
    .map((book) => ({
      value: String(book.book_code),
      label: `${book.title} — ${book.author}`,
    }));

  let selectedBook = params[0] ? Number(params[0]) : null;
  const combo = new Combobox(
    t("upload.book.label"), options,
    (option) => { selectedBook = Number(option.value); },
  );
  const preset = options.find((o) => o.value === String(selectedBook));
  if (preset) combo.input.value = preset.label;

  const form = document.createElement("form");
  const partName = document.createElement("input");
  partName.type = "text";
  partName.required = true;
  const file = document.createElement("input");
  file.type = "file";
  file.accept = "audio/mpeg,.mp3";
  file.required = true;

  const progress = document.createElement("div");
  progress.setAttribute("role", "progressbar");
  progress.setAttribute("aria-label", t("upload.progress"));
  progress.setAttribute("aria-valuemin", "0");
  progress.setAttribute("aria-valuemax", "100");
  progress.setAttribute("aria-valuenow", "0");
  progress.className = "progress";
  const bar = document.createElement("div");
  bar.className = "progress-bar";
  progress.append(bar);

  const start = button(t("upload.start"), () => undefined, "submit");
  const pause = button(t("upload.pause"), () => {
    uploader.pause();
    announce(t("upload.paused"));
    pause.hidden = true;
    resume.hidden = false;
  });
  pause.hidden = true;
  const resume = button(t("upload.resume"), () => {
    resume.hidden = true;
    pause.hidden = false;
    void finish(uploader.resume(selectedBook ?? 0, partName.value));
  });
  resume.hidden = true;

  const uploader = new PartUploader(app.api, (report) => {
    const percent = Math.round(report.fraction * 100);
    progress.setAttribute("aria-valuenow", String(percent));
    progress.setAttribute("aria-valuetext", `${percent}%`);
    bar.style.width = `${percent}%`;
  });

  async function finish(run: Promise<number | null>): Promise<void> {
    const partCode = await run;
    if (partCode !== null) {
      pause.hidden = true;
      resume.hidden = true;
      announce(t("upload.sent", { code: partCode }));
      form.reset();
    }
  }

  form.append(
    combo.root,
    field(t("upload.part.name"), partName),
    field(t("upload.file"), file),
    start, pause, resume, progress,
  );
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const chosen = file.files && file.files.length ? file.files[0]! : null;
    if (!chosen || selectedBook === null) return;
    pause.hidden = false;
    void finish(uploader.start(selectedBook, partName.value, chosen));
  });

  root.append(form);
}
