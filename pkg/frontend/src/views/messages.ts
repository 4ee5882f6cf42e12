/** Inbox, composer, and the friend list. Opening the inbox marks it read. */

import { announce, button, field, heading } from "../a11y.js";
import { requireRole, type App } from "../app.js";
import { t } from "../i18n.js";

export async function renderMessages(app: App, root: HTMLElement):
    Promise<void> {
  requireRole(app, "Volunteer", "Impaired", "Admin");
  root.append(heading(1, t("messages.title")));

  const inboxHeading = heading(2, t("messages.inbox"));
  inboxHeading.id = "inbox";
  const unreadNote = document.createElement("p");
  const inboxList = document.createElement("ul");
  inboxList.className = "rows";
  inboxList.setAttribute("aria-labelledby", inboxHeading.id);

  const composeForm = document.createElement("form");
  const to = document.createElement("input");
  to.type = "text";
  to.required = true;
  const body = document.createElement("textarea");
  body.required = true;
  composeForm.append(
    field(t("messages.to"), to),
    field(t("messages.body"), body),
    button(t("messages.send"), () => undefined, "submit"),
  );
  composeForm.addEventListener("submit", (event) => {
    event.preventDefault();
    void app.api.sendMessage(to.value, body.value).then(() => {
      composeForm.reset();
      announce(t("messages.sent"));
    });
  });

  const friendsHeading = heading(2, t("friends.title"));
  friendsHeading.id = "friends";
  const friendsList = document.createElement("ul");
  friendsList.className = "rows";
  friendsList.setAttribute("aria-labelledby", friendsHeading.id);
  const friendForm = document.createElement("form");
  const friendName = document.createElement("input");
  friendName.type = "text";
  friendName.required = true;
  friendForm.append(
    field(t("friends.add"), friendName),
    button(t("friends.submit"), () => undefined, "submit"),
  );
  friendForm.addEventListener("submit", (event) => {
    event.preventDefault();
    void app.api.addFriend(friendName.value).then(() => {
      friendForm.reset();
      announce(t("friends.added"));
      return loadFriends();
    });
  });

  root.append(inboxHeading, unreadNote, inboxList,
              composeForm, friendsHeading, friendForm, friendsList);

  async function loadFriends(): Promise<void> {
    const friends = await app.api.friends();
    friendsList.textContent = "";
    for (const friend of friends.friends) {
      const row = document.createElement("li");
      row.textContent = friend.friend_username;
      friendsList.append(row);
    }
    if (!friends.friends.length) {
      const row = document.createElement("li");
      row.textContent = t("friends.empty");
      friendsList.append(row);
    }
  }

  const inbox = await app.api.inbox(true);
  unreadNote.textContent = t("messages.unread", { n: inbox.unread });
  announce(t("messages.unread", { n: inbox.unread }));
  for (const message of inbox.messages) {
    const row = document.createElement("li");
    row.textContent = message.body;
    inboxList.append(row);
  }
  if (!inbox.messages.length) {
    const row = document.createElement("li");
    row.textContent = t("messages.empty");
    inboxList.append(row);
  }
  await loadFriends();
}
