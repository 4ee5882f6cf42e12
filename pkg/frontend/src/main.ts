/** Application shell: skip link, landmark layout, nav, and route dispatch. */

import { alertError, installLiveRegions } from "./a11y.js";
import { ApiClient, ApiError } from "./api.js";
import type { App } from "./app.js";
import { detectLocale, setLocale, t } from "./i18n.js";
import { renderRoute } from "./router.js";
import {
  clearSession,
  homeRoute,
  loadSession,
  rememberIntent,
  saveSession,
} from "./session.js";

export function boot(document: Document, apiBase = ""): App {
  setLocale(detectLocale());
  const session = loadSession();
  const api = new ApiClient(apiBase, session?.token ?? null);

  const body = document.body;
  body.textContent = "";

  const skip = document.createElement("a");
  skip.href = "#main";
  skip.className = "skip-link";
  skip.textContent = t("app.skip");

  const header = document.createElement("header");
  const brand = document.createElement("p");
  brand.className = "brand";
  brand.textContent = t("app.title");
  const nav = document.createElement("nav");
  nav.setAttribute("aria-label", t("app.title"));
  const navList = document.createElement("ul");
  nav.append(navList);
  header.append(brand, nav);

  const main = document.createElement("main");
  main.id = "main";

  body.append(skip, header, main);
  installLiveRegions(body);

  const app: App = {
    api,
    session,
    navigate(hash: string): void {
      if (location.hash === hash) {
        void renderRoute(app, main, hash);
      } else {
        location.hash = hash;
      }
    },
    setSession(next): void {
      app.session = next;
      api.token = next?.token ?? null;
      if (next) saveSession(next);
      else clearSession();
      app.refreshNav();
    },
    refreshNav(): void {
      navList.textContent = "";
      const links: Array<[string, string]> = [["#/", t("nav.home")]];
      const role = app.session?.role;
      if (!role) {
        links.push(["#/login", t("nav.login")], ["#/apply", t("nav.apply")]);
      } else {
        if (role === "Volunteer") {
          links.push(["#/volunteer", t("nav.volunteer")],
                     ["#/upload", t("nav.upload")]);
        }
        if (role === "Impaired") links.push(["#/library", t("nav.impaired")]);
        if (role === "Admin") links.push(["#/admin", t("nav.admin")]);
        links.push(["#/messages", t("nav.messages")]);
      }
      for (const [href, label] of links) {
        const item = document.createElement("li");
        const anchor = document.createElement("a");
        anchor.href = href;
        anchor.textContent = label;
        item.append(anchor);
        navList.append(item);
      }
      if (role) {
        const item = document.createElement("li");
        const logout = document.createElement("button");
        logout.type = "button";
        logout.textContent = t("nav.logout");
        logout.addEventListener("click", () => {
          void api.logout().catch(() => undefined).then(() => {
            app.setSession(null);
            app.navigate("#/");
          });
        });
        item.append(logout);
        navList.append(item);
      }
    },
  };

  api.onSessionExpired = () => {
    rememberIntent(location.hash || homeRoute(app.session?.role ?? null));
    app.setSession(null);
  };

  app.refreshNav();
  // listeners go inert once this shell's DOM is replaced (e.g. re-boot)
  window.addEventListener("hashchange", () => {
    if (!main.isConnected) return;
    void renderRoute(app, main, location.hash);
  });
  window.addEventListener("unhandledrejection", (event) => {
    if (!main.isConnected) return;
    const reason = event.reason;
    if (reason instanceof ApiError) {
      event.preventDefault();
      if (reason.code === "SessionExpired") {
        app.navigate("#/login");
        alertError(t("error.expired"));
      } else {
        alertError(t("error.prefix", { detail: reason.detail || reason.code }));
      }
    }
  });
  void renderRoute(app, main, location.hash);
  return app;
}

declare global {
  interface Window { __audiolibBooted?: boolean }
}

if (typeof window !== "undefined" && !window.__audiolibBooted &&
    !("__vitest_worker__" in globalThis)) {
  window.__audiolibBooted = true;
  boot(document);
}
