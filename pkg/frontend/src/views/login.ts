/** Sign-in screen with the password-reset request tucked underneath. */

import { announce, button, field, heading } from "../a11y.js";
import type { App } from "../app.js";
import { t } from "../i18n.js";
import { homeRoute, saveSession, takeIntent } from "../session.js";

export async function renderLogin(app: App, root: HTMLElement): Promise<void> {
  root.append(heading(1, t("login.title")));

  const form = document.createElement("form");
  const username = document.createElement("input");
  username.type = "text";
  username.autocomplete = "username";
  username.required = true;
  const password = document.createElement("input");
  password.type = "password";
  password.autocomplete = "current-password";
  password.required = true;
  form.append(
    field(t("login.username"), username),
    field(t("login.password"), password),
    button(t("login.submit"), () => undefined, "submit"),
  );
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void app.api.login(username.value, password.value).then((session) => {
      app.api.token = session.token;
      saveSession(session);
      app.setSession(session);
      announce(t("login.welcome", { name: session.username }));
      app.navigate(takeIntent() ?? homeRoute(session.role));
    });
  });

  const resetDetails = document.createElement("details");
  const resetSummary = document.createElement("summary");
  resetSummary.textContent = t("login.forgot");
  const resetForm = document.createElement("form");
  const resetName = document.createElement("input");
  resetName.type = "text";
  resetName.required = true;
  resetForm.append(
    field(t("login.reset.name"), resetName),
    button(t("login.reset.submit"), () => undefined, "submit"),
  );
  resetForm.addEventListener("submit", (event) => {
    event.preventDefault();
    void app.api.requestPasswordReset(resetName.value).then(() => {
      announce(t("login.reset.sent"));
    });
  });
  resetDetails.append(resetSummary, resetForm);

  root.append(form, resetDetails);
}
