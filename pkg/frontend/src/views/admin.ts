/** Moderation desk: the three pending queues, publishing, and the guestbook. */

import { announce, button, field, heading } from "../a11y.js";
import { requireRole, type App } from "../app.js";
import { t } from "../i18n.js";
import type { PendingReviews } from "../api.js";

export async function renderAdmin(app: App, root: HTMLElement): Promise<void> {
  requireRole(app, "Admin");
  root.append(heading(1, t("admin.title")));

  const queues = document.createElement("div");
  root.append(queues);

  async function loadQueues(): Promise<void> {
    const reviews = await app.api.reviews();
    queues.textContent = "";
    queues.append(
      applicationQueue(app, reviews, loadQueues),
      claimQueue(app, reviews, loadQueues),
      partQueue(app, reviews, loadQueues),
    );
  }

  root.append(publishSection(app), completeSection(app));
  root.append(await guestbookSection(app));
  await loadQueues();
}

function queueShell(titleKey: string, id: string):
    [HTMLElement, HTMLUListElement] {
  const section = document.createElement("section");
  const title = heading(2, t(titleKey));
  title.id = id;
  section.setAttribute("aria-labelledby", id);
  const list = document.createElement("ul");
  list.className = "rows";
  section.append(title, list);
  return [section, list];
}

function emptyRow(list: HTMLUListElement): void {
  const row = document.createElement("li");
  row.textContent = t("admin.queue.empty");
  list.append(row);
}

function decisionButtons(onDecide: (decision: "Approve" | "Reject") => void):
    HTMLElement {
  const wrap = document.createElement("span");
  wrap.append(
    button(t("admin.approve"), () => onDecide("Approve")),
    button(t("admin.reject"), () => onDecide("Reject")),
  );
  return wrap;
}

function applicationQueue(app: App, reviews: PendingReviews,
                          reload: () => Promise<void>): HTMLElement {
  const [section, list] = queueShell("admin.applications", "queue-apps");
  for (const application of reviews.applications) {
    const row = document.createElement("li");
    const label = document.createElement("span");
    label.textContent = `${application.form.name} ` +
      `(${application.desired_role}, ${application.form.username}) `;
    row.append(label);
    if (application.trial_blob) {
      const listen = document.createElement("a");
      listen.href = app.api.trialAudioUrl(application.application_id);
      listen.textContent = t("admin.trial.listen");
      row.append(listen, document.createTextNode(" "));
    }
    row.append(decisionButtons((decision) => {
      void app.api.decideApplication(application.application_id, decision)
        .then((outcome) => {
          announce(outcome.username
            ? t("admin.credentials", { name: outcome.username })
            : t("admin.decided"));
          return reload();
        });
    }));
    list.append(row);
  }
  if (!reviews.applications.length) emptyRow(list);
  return section;
}

function claimQueue(app: App, reviews: PendingReviews,
                    reload: () => Promise<void>): HTMLElement {
  const [section, list] = queueShell("admin.claims", "queue-claims");
  for (const claim of reviews.claims) {
    const row = document.createElement("li");
    const label = document.createElement("span");
    label.textContent = `book ${claim.book_code} `;
    row.append(label, decisionButtons((decision) => {
      void app.api.decideClaim(claim.claim_id, decision).then(() => {
        announce(t("admin.decided"));
        return reload();
      });
    }));
    list.append(row);
  }
  if (!reviews.claims.length) emptyRow(list);
  return section;
}

function partQueue(app: App, reviews: PendingReviews,
                   reload: () => Promise<void>): HTMLElement {
  const [section, list] = queueShell("admin.parts", "queue-parts");
  for (const part of reviews.parts) {
    const row = document.createElement("li");
    const label = document.createElement("span");
    label.textContent = `${part.part_name} (${part.part_code}) `;
    const listen = document.createElement("a");
    listen.href = `#/player/${part.part_code}`;
    listen.textContent = t("book.listen", { name: part.part_name });
    row.append(label, listen, document.createTextNode(" "),
               decisionButtons((decision) => {
                 void app.api.decidePart(part.part_code, decision).then(() => {
                   announce(t("admin.decided"));
                   return reload();
                 });
               }));
    list.append(row);
  }
  if (!reviews.parts.length) emptyRow(list);
  return section;
}

function publishSection(app: App): HTMLElement {
  const section = document.createElement("section");
  const title = heading(2, t("admin.publish"));
  title.id = "admin-publish";
  section.setAttribute("aria-labelledby", title.id);

  const form = document.createElement("form");
  const kind = document.createElement("select");
  for (const value of ["News", "Announcement", "Link"]) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value;
    kind.append(option);
  }
  const itemTitle = document.createElement("input");
  itemTitle.type = "text";
  itemTitle.required = true;
  const body = document.createElement("input");
  body.type = "text";
  body.required = true;
  form.append(
    field(t("admin.publish.kind"), kind),
    field(t("admin.publish.title"), itemTitle),
    field(t("admin.publish.body"), body),
    button(t("admin.publish.submit"), () => undefined, "submit"),
  );
  const published = document.createElement("ul");
  published.className = "rows";
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void app.api.publishItem(kind.value, itemTitle.value, body.value)
      .then((item) => {
        const row = document.createElement("li");
        const label = document.createElement("span");
        label.textContent = `${itemTitle.value} `;
        row.append(label, button(
          t("admin.retract", { title: itemTitle.value }),
          () => {
            void app.api.retractItem(item.item_id).then(() => row.remove());
          },
        ));
        published.append(row);
        form.reset();
        announce(t("admin.published"));
      });
  });
  section.append(title, form, published);
  return section;
}

function completeSection(app: App): HTMLElement {
  const section = document.createElement("section");
  const title = heading(2, t("admin.complete.submit"));
  title.id = "admin-complete";
  section.setAttribute("aria-labelledby", title.id);
  const form = document.createElement("form");
  const code = document.createElement("input");
  code.type = "number";
  code.required = true;
  form.append(
    field(t("admin.complete.book"), code),
    button(t("admin.complete.submit"), () => undefined, "submit"),
  );
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void app.api.markComplete(Number(code.value)).then(() => {
      form.reset();
      announce(t("admin.completed"));
    });
  });
  section.append(title, form);
  return section;
}

async function guestbookSection(app: App): Promise<HTMLElement> {
  const section = document.createElement("section");
  const title = heading(2, t("admin.guestbook"));
  title.id = "admin-guestbook";
  section.setAttribute("aria-labelledby", title.id);
  const list = document.createElement("ul");
  list.className = "rows";
  section.append(title, list);

  const book = await app.api.guestbookAll();
  for (const entry of book.entries) {
    const row = document.createElement("li");
    const label = document.createElement("span");
    label.textContent = `${entry.author_name}: ${entry.body} `;
    const toggle = button(
      entry.visible ? t("admin.hide") : t("admin.show"),
      () => {
        const next = toggle.textContent === t("admin.hide");
        void app.api.setGuestbookVisibility(entry.entry_id, !next)
          .then(() => {
            toggle.textContent = next ? t("admin.show") : t("admin.hide");
            announce(t("admin.decided"));
          });
      },
    );
    row.append(label, toggle);
    list.append(row);
  }
  if (!book.entries.length) emptyRow(list);
  return section;
}
