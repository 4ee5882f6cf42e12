/** Credential self-service section shared by the member dashboards. */

import { announce, button, field, heading } from "../a11y.js";
import type { App } from "../app.js";
import { t } from "../i18n.js";

export function accountSection(app: App): HTMLElement {
  const section = document.createElement("section");
  const title = heading(2, t("account.title"));
  title.id = "account-settings";
  section.setAttribute("aria-labelledby", title.id);

  const form = document.createElement("form");
  const username = document.createElement("input");
  username.type = "text";
  username.autocomplete = "username";
  const password = document.createElement("input");
  password.type = "password";
  password.autocomplete = "new-password";
  password.minLength = 8;
  form.append(
    field(t("account.username"), username),
    field(t("account.password"), password),
    button(t("account.submit"), () => undefined, "submit"),
  );
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void app.api.changeCredentials(
      username.value || undefined,
      password.value || undefined,
    ).then(() => {
      if (app.session && username.value) {
        app.session.username = username.value;
      }
      form.reset();
      announce(t("account.updated"));
    });
  });

  section.append(title, form);
  return section;
}
