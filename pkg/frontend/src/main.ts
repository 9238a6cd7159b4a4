/** Browser bootstrap: wire config, keyboard, and connectivity events. */

import { ApiClient } from "./api.js";
import { ReviewApp } from "./app.js";
import { getBaseUrl, setBaseUrl } from "./config.js";
import { VerdictQueue } from "./queue.js";

function requireElement(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id} in index.html`);
  return node;
}

function bootstrap(): void {
  const baseUrlInput = requireElement("base-url") as HTMLInputElement;
  const keywordsInput = requireElement("keywords") as HTMLInputElement;
  const sampleSizeInput = requireElement("sample-size") as HTMLInputElement;
  const seedInput = requireElement("seed") as HTMLInputElement;
  const arbiterInput = requireElement("arbiter") as HTMLInputElement;
  const startButton = requireElement("start") as HTMLButtonElement;
  const retryButton = requireElement("retry") as HTMLButtonElement;

  baseUrlInput.value = getBaseUrl();

  const queue = new VerdictQueue(window.localStorage);
  let app: ReviewApp | null = null;

  startButton.addEventListener("click", async () => {
    setBaseUrl(baseUrlInput.value);
    const client = new ApiClient(baseUrlInput.value.replace(/\/+$/, ""), (url, init) =>
      fetch(url, init),
    );
    app = new ReviewApp(
      client,
      queue,
      {
        item: requireElement("item"),
        chart: requireElement("chart"),
        status: requireElement("status"),
      },
      document,
      arbiterInput.value || "reviewer",
    );
    const keywords = keywordsInput.value
      .split(",")
      .map((s) => s.trim().toLowerCase())
      .filter(Boolean);
    try {
      await app.start(keywords, Number(sampleSizeInput.value) || 33, Number(seedInput.value) || 0);
    } catch (error) {
      requireElement("status").textContent = `could not start session: ${(error as Error).message}`;
    }
  });

  retryButton.addEventListener("click", () => void app?.flushQueue());
  window.addEventListener("online", () => void app?.flushQueue());

  document.addEventListener("keydown", (event) => {
    if (!app || event.target instanceof HTMLInputElement) return;
    if (event.key === "y") void app.verdict(true);
    else if (event.key === "n") void app.verdict(false);
    else if (event.key === "s") void app.skip();
  });
}

document.addEventListener("DOMContentLoaded", bootstrap);
