/**
 * Chunked upload client with pause/resume. Progress mirrors the server's
 * accounting exactly: the fraction reported is received_bytes / total from
 * the last chunk acknowledgement, not a client-side guess.
 */

import { ApiClient, sha256Hex } from "./api.js";

export const CHUNK_SIZE = 512 * 1024;

export interface UploadProgress {
  receivedBytes: number;
  totalBytes: number;
  fraction: number;
  complete: boolean;
}

export class PartUploader {
  private paused = false;
  private sessionId: string | null = null;
  private checksum = "";
  private data: ArrayBuffer | null = null;
  private nextOffset = 0;

  constructor(
    private api: ApiClient,
    private onProgress: (progress: UploadProgress) => void,
    private chunkSize = CHUNK_SIZE,
  ) {}

  pause(): void {
    this.paused = true;
  }

  /**
   * Upload the file and register it as a part of the book. Resolves with
   * the new part code, or null when paused mid-transfer (call resume()).
   */
  async start(bookCode: number, partName: string, file: File | Blob):
      Promise<number | null> {
    this.data = await toArrayBuffer(file);
    this.checksum = await sha256Hex(this.data);
    const session = await this.api.beginUpload(this.data.byteLength,
                                               this.checksum);
    this.sessionId = session.session_id;
    this.nextOffset = 0;
    this.paused = false;
    return this.pump(bookCode, partName);
  }

  async resume(bookCode: number, partName: string): Promise<number | null> {
    if (!this.sessionId || !this.data) throw new Error("nothing to resume");
    this.paused = false;
    return this.pump(bookCode, partName);
  }

  private async pump(bookCode: number, partName: string):
      Promise<number | null> {
    if (!this.sessionId || !this.data) throw new Error("no active session");
    const total = this.data.byteLength;
    while (this.nextOffset < total) {
      if (this.paused) return null;
      const end = Math.min(this.nextOffset + this.chunkSize, total);
      const chunk = this.data.slice(this.nextOffset, end);
      const ack = await this.api.putChunk(this.sessionId, this.nextOffset,
                                          chunk);
      this.nextOffset = end;
      this.onProgress({
        receivedBytes: ack.received_bytes,
        totalBytes: total,
        fraction: total ? ack.received_bytes / total : 1,
        complete: ack.complete,
      });
    }
    await this.api.commitUpload(this.sessionId, this.checksum);
    const part = await this.api.registerPart(bookCode, partName,
                                             this.sessionId);
    this.sessionId = null;
    this.data = null;
    return part.part_code;
  }
}

/** Blob.arrayBuffer with a FileReader fallback for older engines. */
function toArrayBuffer(file: File | Blob): Promise<ArrayBuffer> {
  if (typeof file.arrayBuffer === "function") return file.arrayBuffer();
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => resolve(reader.result as ArrayBuffer);
    reader.onerror = () => reject(reader.error);
    reader.readAsArrayBuffer(file);
  });
}
