/**
 * HTML renderers for the rating flow.
 *
 * Pure string templates keep the view testable without a browser; the
 * controller swaps the rendered tree in and re-wires events. The reference
 * images always render below the video so the first visual a rater judges is
 * the video itself.
 */

import { ASPECTS, ASPECT_LABELS, type Aspect } from "./api.js";
import { canSubmit, type RatingFormState, type SessionState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function renderAspectControl(form: RatingFormState, aspect: Aspect): string {
  const options = [1, 2, 3, 4, 5]
    .map((value) => {
      const checked = form.selections[aspect] === value ? " checked" : "";
      return (
        `<label class="score-option"><input type="radio" name="${aspect}" value="${value}"` +
        `${checked} data-aspect="${aspect}" data-value="${value}"><span>${value}</span></label>`
      );
    })
    .join("");
  return (
    `<fieldset class="aspect" data-aspect-group="${aspect}">` +
    `<legend>${escapeHtml(ASPECT_LABELS[aspect])}</legend>` +
    `<div class="score-row">${options}</div>` +
    `</fieldset>`
  );
}

function renderBanner(banner: string | null): string {
  if (banner === null) {
    return "";
  }
  return (
    `<div class="banner" role="alert">${escapeHtml(banner)} ` +
    `<button type="button" data-action="retry">Retry</button></div>`
  );
}

export function renderRating(state: Extract<SessionState, { phase: "rating" }>): string {
  const form = state.form;
  const submitting = form.submissionStatus === "submitting";
  const disabled = !canSubmit(form) ? " disabled" : "";
  const references = form.task.referenceUrls
    .map((url, index) => `<img src="${escapeHtml(url)}" alt="reference image ${index + 1}">`)
    .join("");
  return `
<section class="task">
  ${renderBanner(state.banner)}
  <video src="${escapeHtml(form.task.videoUrl)}" autoplay loop muted playsinline data-role="task-video"></video>
  <p class="prompt">${escapeHtml(form.task.promptText)}</p>
  <div class="references" data-role="references" aria-label="reference images">${references}</div>
  <p class="instructions">${escapeHtml(form.task.instructions)}</p>
  <form data-role="rating-form">
    ${ASPECTS.map((aspect) => renderAspectControl(form, aspect)).join("\n    ")}
    <button type="submit" data-action="submit"${disabled}>${submitting ? "Submitting…" : "Submit rating"}</button>
  </form>
  <p class="progress">Rated: ${state.ratedCount}</p>
  <p class="hint">Keys 1–5 score the first unanswered aspect.</p>
</section>`;
}

export function renderApp(state: SessionState): string {
  switch (state.phase) {
    case "loading":
      return `<section class="status"><p>Loading the next task…</p><p class="progress">Rated: ${state.ratedCount}</p></section>`;
    case "rating":
      return renderRating(state);
    case "done":
      return `<section class="status"><p>All tasks rated — thank you!</p><p class="progress">Rated: ${state.ratedCount}</p></section>`;
  }
}
