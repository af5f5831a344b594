/**
 * Browser bootstrap: owns the session state, renders on every transition,
 * and talks to the service through the typed client. While a submission is
 * in flight the next task is already being fetched, so the rater never waits
 * on two round trips back to back.
 */

import { ServiceClient, type RatingTask } from "./api.js";
import {
  activeAspect,
  canSubmit,
  completedScores,
  initialSession,
  reduce,
  type SessionEvent,
  type SessionState,
} from "./state.js";
import { renderApp } from "./view.js";

const client = new ServiceClient("");

function mount(root: HTMLElement, raterId: string): void {
  let state: SessionState = initialSession();
  let prefetched: Promise<RatingTask | null> | null = null;

  function dispatch(event: SessionEvent): void {
    const next = reduce(state, event);
    if (next === state) {
      return;
    }
    state = next;
    render();
    if (state.phase === "loading") {
      void loadNext();
    }
  }

  async function loadNext(): Promise<void> {
    const pending = prefetched ?? client.nextTask(raterId);
    prefetched = null;
    try {
      dispatch({ type: "task_loaded", task: await pending });
    } catch (error) {
      // Re-render a retry affordance through the banner on a synthetic task-less screen.
      root.innerHTML = `<section class="status"><p>Could not reach the study service: ${String(
        error,
      )}</p><button type="button" data-action="reload">Retry</button></section>`;
      root.querySelector("[data-action=reload]")?.addEventListener("click", () => void loadNext());
    }
  }

  async function submit(): Promise<void> {
    if (state.phase !== "rating" || !canSubmit(state.form)) {
      return;
    }
    const { task } = state.form;
    const scores = completedScores(state.form);
    dispatch({ type: "submit_started" });
    prefetched = client.nextTask(raterId); // optimistic fetch while the rating uploads
    try {
      const outcome = await client.submitRating(raterId, task.taskId, scores);
      dispatch({ type: outcome.kind === "accepted" ? "submit_accepted" : "submit_duplicate" });
    } catch (error) {
      prefetched = null;
      dispatch({ type: "submit_failed", message: `Submission failed: ${String(error)}` });
    }
  }

  function render(): void {
    root.innerHTML = renderApp(state);
    const video = root.querySelector<HTMLVideoElement>("[data-role=task-video]");
    video?.addEventListener("error", () =>
      dispatch({ type: "media_failed", message: "The video failed to load." }),
    );
    root.querySelectorAll<HTMLInputElement>("input[type=radio][data-aspect]").forEach((input) => {
      input.addEventListener("change", () => {
        dispatch({
          type: "select",
          aspect: input.dataset["aspect"] as never,
          value: Number(input.dataset["value"]),
        });
      });
    });
    root.querySelector("[data-role=rating-form]")?.addEventListener("submit", (event) => {
      event.preventDefault();
      void submit();
    });
    root.querySelector("[data-action=retry]")?.addEventListener("click", () => {
      dispatch({ type: "media_retry" });
    });
  }

  document.addEventListener("keydown", (event) => {
    if (state.phase !== "rating" || event.key < "1" || event.key > "5") {
      return;
    }
    const aspect = activeAspect(state.form);
    if (aspect !== null) {
      dispatch({ type: "select", aspect, value: Number(event.key) });
    }
  });

  render();
  void loadNext();
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (root === null) {
    return;
  }
  const form = document.getElementById("rater-form") as HTMLFormElement | null;
  const input = document.getElementById("rater-id") as HTMLInputElement | null;
  if (form === null || input === null) {
    return;
  }
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const raterId = input.value.trim();
    if (raterId === "") {
      return;
    }
    void client
      .registerRater(raterId)
      .then(() => {
        form.hidden = true;
        mount(root, raterId);
      })
      .catch((error) => {
        const note = document.getElementById("rater-error");
        if (note !== null) {
          note.textContent = `Registration failed: ${String(error)}`;
        }
      });
  });
}

void boot();
