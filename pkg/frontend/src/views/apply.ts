/** Membership application; volunteers attach the one-minute trial clip. */

import { announce, button, field, heading } from "../a11y.js";
import type { App } from "../app.js";
import { t } from "../i18n.js";

export async function renderApply(app: App, root: HTMLElement): Promise<void> {
  root.append(heading(1, t("apply.title")));

  const form = document.createElement("form");
  const role = document.createElement("select");
  for (const [value, label] of [
    ["Impaired", t("apply.role.impaired")],
    ["Volunteer", t("apply.role.volunteer")],
  ] as const) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = label;
    role.append(option);
  }
  const name = document.createElement("input");
  name.type = "text";
  name.required = true;
  name.autocomplete = "name";
  const email = document.createElement("input");
  email.type = "email";
  email.required = true;
  email.autocomplete = "email";
  const username = document.createElement("input");
  username.type = "text";
  username.required = true;

  const trial = document.createElement("input");
  trial.type = "file";
  trial.accept = "audio/mpeg,.mp3";
  const trialRow = field(t("apply.trial"), trial);
  const trialHint = document.createElement("p");
  trialHint.id = "trial-hint";
  trialHint.textContent = t("apply.trial.hint");
  trial.setAttribute("aria-describedby", trialHint.id);
  trialRow.append(trialHint);
  trialRow.hidden = true;

  role.addEventListener("change", () => {
    trialRow.hidden = role.value !== "Volunteer";
  });

  form.append(
    field(t("apply.role"), role),
    field(t("apply.name"), name),
    field(t("apply.email"), email),
    field(t("apply.username"), username),
    trialRow,
    button(t("apply.submit"), () => undefined, "submit"),
  );
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const file = trial.files && trial.files.length ? trial.files[0]! : null;
    void app.api.apply({
      desired_role: role.value,
      name: name.value,
      email: email.value,
      username: username.value,
    }, role.value === "Volunteer" ? file : null).then(() => {
      form.reset();
      trialRow.hidden = true;
      announce(t("apply.submitted"));
    });
  });

  root.append(form);
}
