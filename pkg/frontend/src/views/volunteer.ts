/** Volunteer desk: the demand list to claim from, and current assignments. */

import { announce, button, heading } from "../a11y.js";
import { requireRole, type App } from "../app.js";
import { t } from "../i18n.js";
import { accountSection } from "./account.js";

export async function renderVolunteer(app: App, root: HTMLElement):
    Promise<void> {
  requireRole(app, "Volunteer");
  root.append(heading(1, t("volunteer.title")));

  const demandSection = document.createElement("section");
  const demandHeading = heading(2, t("volunteer.demand"));
  demandHeading.id = "demand-list";
  demandSection.setAttribute("aria-labelledby", demandHeading.id);
  const demandList = document.createElement("ul");
  demandList.className = "rows";
  demandSection.append(demandHeading, demandList);

  const assignedSection = document.createElement("section");
  const assignedHeading = heading(2, t("volunteer.assignments"));
  assignedHeading.id = "assigned-list";
  assignedSection.setAttribute("aria-labelledby", assignedHeading.id);
  const assignedList = document.createElement("ul");
  assignedList.className = "rows";
  assignedSection.append(assignedHeading, assignedList);

  root.append(demandSection, assignedSection, accountSection(app));

  const [demanded, assigned] = await Promise.all([
    app.api.demandedBooks(),
    app.api.assignedBooks(),
  ]);

  for (const book of demanded.books) {
    const row = document.createElement("li");
    const label = document.createElement("span");
    label.textContent = `${book.title} — ${book.author} `;
    const claim = button(
      t("volunteer.claim", { title: book.title }),
      () => {
        void app.api.claimBook(book.book_code).then(() => {
          row.remove();
          announce(t("volunteer.claimed"));
        });
      },
    );
    row.append(label, claim);
    demandList.append(row);
  }
  if (!demanded.books.length) {
    const row = document.createElement("li");
    row.textContent = t("volunteer.demand.empty");
    demandList.append(row);
  }

  for (const book of assigned.books) {
    const row = document.createElement("li");
    const label = document.createElement("span");
    label.textContent = `${book.title} — ${book.author} (${book.status}) `;
    const upload = document.createElement("a");
    upload.href = `#/upload/${book.book_code}`;
    upload.textContent = t("volunteer.upload", { title: book.title });
    row.append(label, upload);
    assignedList.append(row);
  }
  if (!assigned.books.length) {
    const row = document.createElement("li");
    row.textContent = t("volunteer.assignments.empty");
    assignedList.append(row);
  }
}
