/** The one piece of configuration: where the review service lives. */

const STORAGE_KEY = "radlabel.baseUrl";
const DEFAULT_BASE_URL = "http://127.0.0.1:8000";

export function getBaseUrl(): string {
  const injected = (globalThis as { __REVIEW_BASE_URL__?: string }).__REVIEW_BASE_URL__;
  if (injected) return injected;
  try {
    const stored = globalThis.localStorage?.getItem(STORAGE_KEY);
    if (stored) return stored;
  } catch {
    // storage unavailable (private mode, non-browser host)
  }
  return DEFAULT_BASE_URL;
}

export function setBaseUrl(url: string): void {
  try {
    globalThis.localStorage?.setItem(STORAGE_KEY, url.replace(/\/+$/, ""));
  } catch {
    // best effort only
  }
}
