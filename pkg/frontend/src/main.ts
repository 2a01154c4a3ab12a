/** Browser bootstrap: wires the chat controller to the page. */

import { ApiClient } from "./api.js";
import { ChatController } from "./chat.js";
import { SessionStore } from "./session.js";

function appendBlocks(log: HTMLElement, blocks: string[]): void {
  for (const html of blocks) {
    log.insertAdjacentHTML("beforeend", html);
  }
  log.scrollTop = log.scrollHeight;
}

export function boot(): void {
  const log = document.getElementById("log") as HTMLElement;
  const form = document.getElementById("form") as HTMLFormElement;
  const input = document.getElementById("input") as HTMLInputElement;
  const status = document.getElementById("status") as HTMLElement;

  const api = new ApiClient(window.location.origin.replace(/\/$/, ""));
  const store = new SessionStore(window.localStorage);
  const chat = new ChatController(api, store);

  appendBlocks(log, chat.restoreTranscript());
  api.health().then((ok) => {
    status.textContent = ok ? "connected" : "service unreachable";
    status.className = ok ? "ok" : "down";
  });

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text) return;
    input.value = "";
    input.disabled = true;
    try {
      appendBlocks(log, await chat.send(text));
    } finally {
      input.disabled = false;
      input.focus();
    }
  });
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", boot);
}
