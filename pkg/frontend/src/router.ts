/** Hash router: screen renderers keyed by the first path segment. */

import { alertError, clearAlert, focusMainHeading } from "./a11y.js";
import type { App } from "./app.js";
import { ApiError } from "./api.js";
import { t } from "./i18n.js";
import { rememberIntent } from "./session.js";
import { renderAdmin } from "./views/admin.js";
import { renderApply } from "./views/apply.js";
import { renderBook } from "./views/book.js";
import { renderHome } from "./views/home.js";
import { renderImpaired } from "./views/impaired.js";
import { renderLogin } from "./views/login.js";
import { renderMessages } from "./views/messages.js";
import { renderPlayer } from "./views/player.js";
import { renderUpload } from "./views/upload.js";
import { renderVolunteer } from "./views/volunteer.js";

type Renderer = (app: App, root: HTMLElement, params: string[])
  => Promise<void>;

const routes: Record<string, Renderer> = {
  "": renderHome,
  "login": renderLogin,
  "apply": renderApply,
  "volunteer": renderVolunteer,
  "library": renderImpaired,
  "admin": renderAdmin,
  "book": renderBook,
  "player": renderPlayer,
  "upload": renderUpload,
  "messages": renderMessages,
};

export async function renderRoute(app: App, root: HTMLElement,
                                  hash: string): Promise<void> {
  const segments = hash.replace(/^#\/?/, "").split("/").filter(Boolean);
  const renderer = routes[segments[0] ?? ""] ?? renderHome;
  clearAlert();
  root.textContent = "";
  try {
    await renderer(app, root, segments.slice(1));
    focusMainHeading(root);
  } catch (error) {
    if (error instanceof ApiError) {
      if (error.code === "SessionExpired" || error.code === "AuthRequired") {
        rememberIntent(hash);
        app.setSession(null);
        app.navigate("#/login");
        alertError(t("error.expired"));
        return;
      }
      alertError(t("error.prefix", { detail: error.detail || error.code }));
      return;
    }
    if ((error as { code?: string }).code === "RouteGuard") {
      rememberIntent(hash);
      app.navigate("#/login");
      return;
    }
    throw error;
  }
}
