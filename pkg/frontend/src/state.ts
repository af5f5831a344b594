/**
 * Pure state for the single-page rating flow.
 *
 * The form invariants live here, away from the DOM: submit is possible only
 * when all five aspects are selected, selections are cleared whenever the
 * session advances to a new task, and a duplicate-submission outcome advances
 * without counting a second rating.
 */

import { ASPECTS, type Aspect, type RatingTask, type Scores } from "./api.js";

export type SubmissionStatus = "idle" | "submitting";

export interface RatingFormState {
  task: RatingTask;
  selections: Partial<Record<Aspect, number>>;
  submissionStatus: SubmissionStatus;
}

export function createForm(task: RatingTask): RatingFormState {
  return { task, selections: {}, submissionStatus: "idle" };
}

export function select(form: RatingFormState, aspect: Aspect, value: number): RatingFormState {
  if (!(ASPECTS as readonly string[]).includes(aspect)) {
    throw new RangeError(`unknown aspect ${aspect}`);
  }
  if (!Number.isInteger(value) || value < 1 || value > 5) {
    throw new RangeError(`score must be an integer in [1,5], got ${value}`);
  }
  return { ...form, selections: { ...form.selections, [aspect]: value } };
}

export function canSubmit(form: RatingFormState): boolean {
  return form.submissionStatus === "idle" && ASPECTS.every((aspect) => form.selections[aspect] !== undefined);
}

/** The five selected scores; throws if any aspect is still unset. */
export function completedScores(form: RatingFormState): Scores {
  const scores: Partial<Record<Aspect, number>> = {};
  for (const aspect of ASPECTS) {
    const value = form.selections[aspect];
    if (value === undefined) {
      throw new RangeError(`missing score for ${aspect}`);
    }
    scores[aspect] = value;
  }
  return scores as Scores;
}

/** First aspect without a selection — the target for keyboard shortcuts. */
export function activeAspect(form: RatingFormState): Aspect | null {
  for (const aspect of ASPECTS) {
    if (form.selections[aspect] === undefined) {
      return aspect;
    }
  }
  return null;
}

export type SessionState =
  | { phase: "loading"; ratedCount: number }
  | { phase: "rating"; form: RatingFormState; ratedCount: number; banner: string | null }
  | { phase: "done"; ratedCount: number };

export type SessionEvent =
  | { type: "task_loaded"; task: RatingTask | null }
  | { type: "select"; aspect: Aspect; value: number }
  | { type: "submit_started" }
  | { type: "submit_accepted" }
  | { type: "submit_duplicate" }
  | { type: "submit_failed"; message: string }
  | { type: "media_failed"; message: string }
  | { type: "media_retry" };

export function initialSession(): SessionState {
  return { phase: "loading", ratedCount: 0 };
}

export function reduce(state: SessionState, event: SessionEvent): SessionState {
  switch (event.type) {
    case "task_loaded": {
      if (state.phase !== "loading") {
        return state;
      }
      if (event.task === null) {
        return { phase: "done", ratedCount: state.ratedCount };
      }
      // A fresh form per task: selections never carry over.
      return { phase: "rating", form: createForm(event.task), ratedCount: state.ratedCount, banner: null };
    }
    case "select": {
      if (state.phase !== "rating" || state.form.submissionStatus !== "idle") {
        return state;
      }
      return { ...state, form: select(state.form, event.aspect, event.value) };
    }
    case "submit_started": {
      // Partial forms are blocked here, before any network call happens.
      if (state.phase !== "rating" || !canSubmit(state.form)) {
        return state;
      }
      return { ...state, form: { ...state.form, submissionStatus: "submitting" }, banner: null };
    }
    case "submit_accepted": {
      if (state.phase !== "rating") {
        return state;
      }
      return { phase: "loading", ratedCount: state.ratedCount + 1 };
    }
    case "submit_duplicate": {
      // Already stored server-side: advance, but do not count it again.
      if (state.phase !== "rating") {
        return state;
      }
      return { phase: "loading", ratedCount: state.ratedCount };
    }
    case "submit_failed": {
      if (state.phase !== "rating") {
        return state;
      }
      return { ...state, form: { ...state.form, submissionStatus: "idle" }, banner: event.message };
    }
    case "media_failed": {
      // Never silently skip a task with broken media; surface it instead.
      if (state.phase !== "rating") {
        return state;
      }
      return { ...state, banner: event.message };
    }
    case "media_retry": {
      if (state.phase !== "rating") {
        return state;
      }
      return { ...state, banner: null };
    }
  }
}
