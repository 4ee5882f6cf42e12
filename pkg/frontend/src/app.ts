/** Shared application context handed to every screen renderer. */

import type { ApiClient, Session } from "./api.js";

export interface App {
  api: ApiClient;
  session: Session | null;
  navigate(hash: string): void;
  setSession(session: Session | null): void;
  refreshNav(): void;
}

export function requireRole(app: App,
                            ...roles: Array<Session["role"]>): Session {
  if (!app.session || !roles.includes(app.session.role)) {
    throw Object.assign(new Error("sign in required"), { code: "RouteGuard" });
  }
  return app.session;
}
