/** Public home page: news/announcement/link feed plus the visitors' page. */

import { announce, button, field, heading } from "../a11y.js";
import type { App } from "../app.js";
import { t } from "../i18n.js";

export async function renderHome(app: App, root: HTMLElement): Promise<void> {
  root.append(heading(1, t("app.title")));

  const feedSection = document.createElement("section");
  feedSection.setAttribute("aria-labelledby", "home-news");
  const feedHeading = heading(2, t("home.news"));
  feedHeading.id = "home-news";
  const feed = document.createElement("ul");
  feed.className = "feed";
  feedSection.append(feedHeading, feed);

  const guestSection = document.createElement("section");
  guestSection.setAttribute("aria-labelledby", "home-guestbook");
  const guestHeading = heading(2, t("home.guestbook"));
  guestHeading.id = "home-guestbook";
  const entries = document.createElement("ul");
  entries.className = "feed";

  const form = document.createElement("form");
  const nameInput = document.createElement("input");
  nameInput.type = "text";
  nameInput.required = true;
  const bodyInput = document.createElement("textarea");
  bodyInput.required = true;
  form.append(
    field(t("home.guestbook.name"), nameInput),
    field(t("home.guestbook.body"), bodyInput),
    button(t("home.guestbook.sign"), () => undefined, "submit"),
  );
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void app.api.signGuestbook(nameInput.value, bodyInput.value).then(() => {
      nameInput.value = "";
      bodyInput.value = "";
      announce(t("home.guestbook.signed"));
      return loadGuestbook();
    });
  });
  guestSection.append(guestHeading, form, entries);
  root.append(feedSection, guestSection);

  async function loadGuestbook(): Promise<void> {
    const book = await app.api.guestbook();
    entries.textContent = "";
    for (const entry of book.entries) {
      const item = document.createElement("li");
      item.textContent = `${entry.author_name}: ${entry.body}`;
      entries.append(item);
    }
    if (!book.entries.length) {
      const item = document.createElement("li");
      item.textContent = t("home.empty");
      entries.append(item);
    }
  }

  const items = await app.api.items();
  for (const item of items.items) {
    const node = document.createElement("li");
    if (item.kind === "Link") {
      const anchor = document.createElement("a");
      anchor.href = item.body_or_url;
      anchor.textContent = item.title;
      node.append(anchor);
    } else {
      const title = document.createElement("strong");
      title.textContent = `${item.title} `;
      node.append(title, document.createTextNode(item.body_or_url));
    }
    feed.append(node);
  }
  if (!items.items.length) {
    const node = document.createElement("li");
    node.textContent = t("home.empty");
    feed.append(node);
  }
  await loadGuestbook();
}
