/**
 * Typed client over the documented JSON API. All requests go through one
 * place so session expiry and error shapes are handled uniformly.
 */

export interface Session {
  token: string;
  role: "Volunteer" | "Impaired" | "Admin";
  account_id: string;
  username: string;
}

export interface Book {
  book_code: number;
  title: string;
  author: string;
  status: string;
  approved_parts?: number;
  play_count?: number;
}

export interface Part {
  book_code: number;
  part_code: number;
  part_name: string;
  duration_seconds: number | null;
  added_at: number;
  status: string;
  title?: string;
}

export interface Message {
  message_id: string;
  from_id: string;
  to_id: string;
  body: string;
  sent_at: number;
  read: boolean;
}

export interface PendingReviews {
  applications: Array<{
    application_id: string;
    desired_role: string;
    form: { name: string; email: string; username: string };
    trial_blob?: string | null;
  }>;
  claims: Array<{ claim_id: string; book_code: number; volunteer: string }>;
  parts: Part[];
}

export class ApiError extends Error {
  constructor(public code: string, public status: number,
              public detail: string, public data?: Record<string, unknown>) {
    super(detail || code);
  }
}

export class ApiClient {
  onSessionExpired: (() => void) | null = null;

  constructor(private base = "", public token: string | null = null) {}

  private async request<T>(method: string, path: string, options: {
    json?: unknown;
    form?: FormData;
    raw?: BodyInit;
    headers?: Record<string, string>;
  } = {}): Promise<T> {
    const headers: Record<string, string> = { ...options.headers };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    let body: BodyInit | undefined;
    if (options.json !== undefined) {
      headers["Content-Type"] = "application/json";
      body = JSON.stringify(options.json);
    } else if (options.form) {
      body = options.form;
    } else if (options.raw !== undefined) {
      headers["Content-Type"] = "application/octet-stream";
      body = options.raw;
    }
    const response = await fetch(this.base + path, { method, headers, body });
    let parsed: Record<string, unknown> = {};
    const text = await response.text();
    if (text) {
      try {
        parsed = JSON.parse(text) as Record<string, unknown>;
      } catch {
        parsed = {};
      }
    }
    if (!response.ok) {
      const code = String(parsed["error"] ?? `HTTP${response.status}`);
      if (code === "SessionExpired" && this.onSessionExpired) {
        this.onSessionExpired();
      }
      throw new ApiError(code, response.status,
        String(parsed["detail"] ?? ""),
        parsed["data"] as Record<string, unknown> | undefined);
    }
    return parsed as T;
  }

  // sessions ---------------------------------------------------------------

  login(username: string, password: string): Promise<Session> {
    return this.request("POST", "/api/login", { json: { username, password } });
  }

  logout(): Promise<void> {
    return this.request("POST", "/api/logout", {});
  }

  account(): Promise<{ username: string; role: string; email: string }> {
    return this.request("GET", "/api/account");
  }

  changeCredentials(username?: string, password?: string): Promise<unknown> {
    const body: Record<string, string> = {};
    if (username) body["username"] = username;
    if (password) body["password"] = password;
    return this.request("PATCH", "/api/account", { json: body });
  }

  requestPasswordReset(name: string): Promise<void> {
    return this.request("POST", "/api/password-reset",
      { json: { username_or_email: name } });
  }

  // membership ---------------------------------------------------------------

  apply(fields: { desired_role: string; name: string; email: string;
                  username: string }, trial: File | null):
      Promise<{ application_id: string }> {
    const form = new FormData();
    for (const [key, value] of Object.entries(fields)) form.set(key, value);
    if (trial) form.set("trial", trial, trial.name);
    return this.request("POST", "/api/applications", { form });
  }

  decideApplication(id: string, decision: "Approve" | "Reject"):
      Promise<{ status: string; username?: string }> {
    return this.request("POST", `/api/applications/${id}/decision`,
      { json: { decision } });
  }

  trialAudioUrl(applicationId: string): string {
    return `${this.base}/api/applications/${applicationId}/trial` +
      `?access_token=${encodeURIComponent(this.token ?? "")}`;
  }

  // books and claims ------------------------------------------------------------

  requestBook(title: string, author: string): Promise<{ book_code: number }> {
    return this.request("POST", "/api/books", { json: { title, author } });
  }

  demandedBooks(): Promise<{ books: Book[] }> {
    return this.request("GET", "/api/books/demanded");
  }

  myBooks(): Promise<{ books: Book[] }> {
    return this.request("GET", "/api/books/mine");
  }

  assignedBooks(): Promise<{ books: Book[] }> {
    return this.request("GET", "/api/books/assigned");
  }

  bookParts(code: number): Promise<{ parts: Part[] }> {
    return this.request("GET", `/api/books/${code}/parts`);
  }

  claimBook(code: number): Promise<{ claim_id: string }> {
    return this.request("POST", `/api/books/${code}/claims`, {});
  }

  decideClaim(id: string, decision: "Approve" | "Reject"): Promise<unknown> {
    return this.request("POST", `/api/claims/${id}/decision`,
      { json: { decision } });
  }

  decidePart(code: number, decision: "Approve" | "Reject"): Promise<unknown> {
    return this.request("POST", `/api/parts/${code}/decision`,
      { json: { decision } });
  }

  markComplete(code: number): Promise<unknown> {
    return this.request("POST", `/api/books/${code}/complete`, {});
  }

  reviews(): Promise<PendingReviews> {
    return this.request("GET", "/api/reviews");
  }

  // uploads -------------------------------------------------------------------------

  beginUpload(size: number, checksum: string): Promise<{ session_id: string }> {
    return this.request("POST", "/api/uploads", { json: { size, checksum } });
  }

  putChunk(sessionId: string, offset: number, data: Blob | ArrayBuffer):
      Promise<{ received_bytes: number; complete: boolean }> {
    return this.request("PUT",
      `/api/uploads/${sessionId}/chunks?offset=${offset}`,
      { raw: data as BodyInit });
  }

  commitUpload(sessionId: string, checksum: string):
      Promise<{ blob: string; duration_seconds: number | null }> {
    return this.request("POST", `/api/uploads/${sessionId}/commit`,
      { json: { checksum } });
  }

  registerPart(bookCode: number, partName: string, sessionId: string):
      Promise<{ part_code: number }> {
    return this.request("POST", `/api/books/${bookCode}/parts`,
      { json: { part_name: partName, session_id: sessionId } });
  }

  // catalog ---------------------------------------------------------------------------

  searchBooks(query: string): Promise<{ books: Book[] }> {
    return this.request("GET",
      `/api/catalog/search?q=${encodeURIComponent(query)}`);
  }

  recentParts(limit = 10): Promise<{ parts: Part[] }> {
    return this.request("GET", `/api/catalog/recent?limit=${limit}`);
  }

  mostlyRead(limit = 10): Promise<{ books: Book[] }> {
    return this.request("GET", `/api/catalog/mostly-read?limit=${limit}`);
  }

  audioUrl(partCode: number): string {
    return `${this.base}/api/parts/${partCode}/audio` +
      `?access_token=${encodeURIComponent(this.token ?? "")}`;
  }

  // community ---------------------------------------------------------------------------

  inbox(markRead: boolean): Promise<{ messages: Message[]; unread: number }> {
    return this.request("GET", `/api/messages?mark_read=${markRead}`);
  }

  sendMessage(to: string, body: string): Promise<{ message_id: string }> {
    return this.request("POST", "/api/messages", { json: { to, body } });
  }

  friends(): Promise<{ friends: Array<{ friend_username: string }> }> {
    return this.request("GET", "/api/friends");
  }

  addFriend(username: string): Promise<unknown> {
    return this.request("POST", "/api/friends", { json: { username } });
  }

  guestbook(): Promise<{ entries: Array<{ entry_id: string;
      author_name: string; body: string; visible: boolean }> }> {
    return this.request("GET", "/api/guestbook");
  }

  guestbookAll(): Promise<{ entries: Array<{ entry_id: string;
      author_name: string; body: string; visible: boolean }> }> {
    return this.request("GET", "/api/guestbook?include_hidden=1");
  }

  signGuestbook(name: string, body: string): Promise<{ entry_id: string }> {
    return this.request("POST", "/api/guestbook", { json: { name, body } });
  }

  setGuestbookVisibility(entryId: string, visible: boolean): Promise<unknown> {
    return this.request("POST", `/api/guestbook/${entryId}/visibility`,
      { json: { visible } });
  }

  items(): Promise<{ items: Array<{ item_id: string; kind: string;
      title: string; body_or_url: string }> }> {
    return this.request("GET", "/api/items");
  }

  publishItem(kind: string, title: string, bodyOrUrl: string):
      Promise<{ item_id: string }> {
    return this.request("POST", "/api/items",
      { json: { kind, title, body_or_url: bodyOrUrl } });
  }

  retractItem(id: string): Promise<unknown> {
    return this.request("DELETE", `/api/items/${id}`);
  }
}

/** SHA-256 of a file, hex-encoded, via WebCrypto. */
export async function sha256Hex(data: ArrayBuffer): Promise<string> {
  // wrap in a local-realm view: FileReader buffers can cross realms
  const digest = await crypto.subtle.digest("SHA-256", new Uint8Array(data));
  return Array.from(new Uint8Array(digest))
    .map((b) => b.toString(16).padStart(2, "0"))
    .join("");
}
