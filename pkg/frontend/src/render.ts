/** Pure text-to-HTML rendering for chat messages. Everything here returns
 * strings so it can be tested without a DOM. */

const TAG_RE = /<hr>(.*?)<\/hr>/gs;
export const NOISY_LABEL = "signal too noisy";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Human form of one tagged value: one decimal for numbers, a plain-language
 * label for NaN. */
export function formatValue(raw: string): string {
  const trimmed = raw.trim();
  const value = Number(trimmed);
  if (trimmed === "" || Number.isNaN(value)) {
    return NOISY_LABEL;
  }
  return value.toFixed(1);
}

/** Replace every <hr>...</hr> span with a highlighted element; the rest of
 * the text is escaped verbatim. */
export function highlightTaggedValues(text: string): string {
  let html = "";
  let last = 0;
  for (const match of text.matchAll(TAG_RE)) {
    html += escapeHtml(text.slice(last, match.index));
    const label = formatValue(match[1]);
    const cls = label === NOISY_LABEL ? "hr-value hr-noisy" : "hr-value";
    html += `<span class="${cls}">${escapeHtml(label)}</span>`;
    last = match.index + match[0].length;
  }
  html += escapeHtml(text.slice(last));
  return html;
}

export type Role = "user" | "agent" | "clarification" | "error";

export function renderMessage(role: Role, text: string): string {
  const body = role === "agent" ? highlightTaggedValues(text) : escapeHtml(text);
  return `<div class="message message-${role}"><span class="role">${role}</span><p>${body}</p></div>`;
}

/** Clarification turns get a distinct visual treatment plus a fixed prefix
 * so they cannot be mistaken for an answer. */
export function renderClarification(question: string): string {
  return renderMessage("clarification", `The agent needs more information: ${question}`);
}
