// Backend base URL: build-time default, overridable from the settings field
// (persisted in localStorage so it survives reloads).

export const DEFAULT_API_BASE = "http://127.0.0.1:8080";

const STORAGE_KEY = "pragya.apiBase";

export function apiBase(): string {
  try {
    return localStorage.getItem(STORAGE_KEY) ?? DEFAULT_API_BASE;
  } catch {
    return DEFAULT_API_BASE;
  }
}

export function setApiBase(url: string): void {
  try {
    if (url && url !== DEFAULT_API_BASE) localStorage.setItem(STORAGE_KEY, url);
    else localStorage.removeItem(STORAGE_KEY);
  } catch {
    // storage unavailable (private mode); the session default still applies
  }
}
