/**
 * Session state: the bearer token lives in sessionStorage so a reload keeps
 * you signed in but closing the tab signs you out. When a request reports
 * SessionExpired the intended route is remembered and restored after login.
 */

import type { Session } from "./api.js";

const KEY = "audiolib.session";
const INTENT_KEY = "audiolib.intent";

export function loadSession(): Session | null {
  try {
    const raw = sessionStorage.getItem(KEY);
    return raw ? (JSON.parse(raw) as Session) : null;
  } catch {
    return null;
  }
}

export function saveSession(session: Session): void {
  sessionStorage.setItem(KEY, JSON.stringify(session));
}

export function clearSession(): void {
  sessionStorage.removeItem(KEY);
}

export function rememberIntent(hash: string): void {
  sessionStorage.setItem(INTENT_KEY, hash);
}

export function takeIntent(): string | null {
  const intent = sessionStorage.getItem(INTENT_KEY);
  sessionStorage.removeItem(INTENT_KEY);
  return intent;
}

/** The dashboard route for a role. */
export function homeRoute(role: Session["role"] | null): string {
  switch (role) {
    case "Volunteer":
      return "#/volunteer";
    case "Impaired":
      return "#/library";
    case "Admin":
      return "#/admin";
    default:
      return "#/";
  }
}
