/** The member library: search (combobox), book requests, and fresh lists. */

import { announce, button, field, heading } from "../a11y.js";
import { requireRole, type App } from "../app.js";
import { Combobox } from "../combobox.js";
import { t } from "../i18n.js";
import { accountSection } from "./account.js";

export async function renderImpaired(app: App, root: HTMLElement):
    Promise<void> {
  requireRole(app, "Impaired");
  root.append(heading(1, t("impaired.title")));

  // catalog search drives straight into the book screen
  const searchSection = document.createElement("section");
  const searchHeading = heading(2, t("impaired.search"));
  searchHeading.id = "catalog-search";
  searchSection.setAttribute("aria-labelledby", searchHeading.id);
  const combo = new Combobox(
    t("impaired.search.label"),
    async (query: string) => {
      if (!query.trim()) return [];
      const found = await app.api.searchBooks(query);
      return found.books.map((book) => ({
        value: String(book.book_code),
        label: `${book.title} — ${book.author}`,
      }));
    },
    (option) => app.navigate(`#/book/${option.value}`),
  );
  searchSection.append(searchHeading, combo.root);

  const requestSection = document.createElement("section");
  const requestHeading = heading(2, t("impaired.request"));
  requestHeading.id = "book-request";
  requestSection.setAttribute("aria-labelledby", requestHeading.id);
  const form = document.createElement("form");
  const title = document.createElement("input");
  title.type = "text";
  title.required = true;
  const author = document.createElement("input");
  author.type = "text";
  author.required = true;
  form.append(
    field(t("impaired.request.title"), title),
    field(t("impaired.request.author"), author),
    button(t("impaired.request.submit"), () => undefined, "submit"),
  );
  const mineHeading = heading(2, t("impaired.mine"));
  mineHeading.id = "my-requests";
  const mineList = document.createElement("ul");
  mineList.className = "rows";
  mineList.setAttribute("aria-labelledby", mineHeading.id);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void app.api.requestBook(title.value, author.value).then(() => {
      form.reset();
      announce(t("impaired.requested"));
      return loadMine();
    });
  });
  requestSection.append(requestHeading, form, mineHeading, mineList);

  const recentSection = document.createElement("section");
  const recentHeading = heading(2, t("impaired.recent"));
  recentHeading.id = "recent-parts";
  recentSection.setAttribute("aria-labelledby", recentHeading.id);
  const recentList = document.createElement("ul");
  recentList.className = "rows";
  recentSection.append(recentHeading, recentList);

  const mostlySection = document.createElement("section");
  const mostlyHeading = heading(2, t("impaired.mostly"));
  mostlyHeading.id = "mostly-read";
  mostlySection.setAttribute("aria-labelledby", mostlyHeading.id);
  const mostlyList = document.createElement("ul");
  mostlyList.className = "rows";
  mostlySection.append(mostlyHeading, mostlyList);

  root.append(searchSection, requestSection, recentSection, mostlySection,
              accountSection(app));

  async function loadMine(): Promise<void> {
    const mine = await app.api.myBooks();
    mineList.textContent = "";
    for (const book of mine.books) {
      const row = document.createElement("li");
      row.textContent = `${book.title} — ${book.author}: ${book.status}`;
      mineList.append(row);
    }
    if (!mine.books.length) {
      const row = document.createElement("li");
      row.textContent = t("impaired.mine.empty");
      mineList.append(row);
    }
  }

  const [recent, mostly] = await Promise.all([
    app.api.recentParts(10),
    app.api.mostlyRead(10),
  ]);
  for (const part of recent.parts) {
    const row = document.createElement("li");
    const link = document.createElement("a");
    link.href = `#/player/${part.part_code}`;
    link.textContent = `${part.part_name}${part.title ? ` (${part.title})` : ""}`;
    row.append(link);
    recentList.append(row);
  }
  for (const book of mostly.books) {
    const row = document.createElement("li");
    const link = document.createElement("a");
    link.href = `#/book/${book.book_code}`;
    link.textContent = `${book.title} — ${book.author}`;
    row.append(link);
    mostlyList.append(row);
  }
  await loadMine();
}
