/**
 * Typed client for the rating study HTTP API.
 *
 * Every payload that reaches application state passes through a sanitizer
 * that copies a fixed allow-list of fields, so nothing the server might ever
 * attach beyond the rater-facing contract (in particular any model identity)
 * can leak into client state.
 */

export const ASPECTS = [
  "visual_quality",
  "tv_alignment",
  "motion_quality",
  "temporal_consistency",
  "subjective_likeness",
] as const;

export type Aspect = (typeof ASPECTS)[number];

export const ASPECT_LABELS: Record<Aspect, string> = {
  visual_quality: "Video quality — how visually appealing and artifact-free the video looks",
  tv_alignment: "Text-video alignment — how well the content matches the prompt",
  motion_quality: "Motion quality — how natural and well-executed the movement is",
  temporal_consistency: "Temporal consistency — how stable subjects and scenery stay across frames",
  subjective_likeness: "Subjective likeness — how much you personally like the video overall",
};

export interface RatingTask {
  taskId: string;
  promptText: string;
  videoUrl: string;
  referenceUrls: [string, string, string];
  instructions: string;
}

export type Scores = Record<Aspect, number>;

export type SubmitOutcome =
  | { kind: "accepted"; ackId: string }
  | { kind: "duplicate"; ackId: string };

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

function asString(value: unknown, field: string): string {
  if (typeof value !== "string" || value.length === 0) {
    throw new TypeError(`task payload field ${field} must be a non-empty string`);
  }
  return value;
}

/** Copy only the rater-facing fields; anything else in the payload is dropped. */
export function sanitizeTask(raw: unknown): RatingTask {
  if (typeof raw !== "object" || raw === null) {
    throw new TypeError("task payload must be an object");
  }
  const record = raw as Record<string, unknown>;
  const refs = record["reference_urls"];
  if (!Array.isArray(refs) || refs.length !== 3) {
    throw new TypeError("task payload must carry exactly 3 reference urls");
  }
  return {
    taskId: asString(record["task_id"], "task_id"),
    promptText: asString(record["prompt_text"], "prompt_text"),
    videoUrl: asString(record["video_url"], "video_url"),
    referenceUrls: [
      asString(refs[0], "reference_urls[0]"),
      asString(refs[1], "reference_urls[1]"),
      asString(refs[2], "reference_urls[2]"),
    ],
    instructions: asString(record["instructions"], "instructions"),
  };
}

/** Client-side mirror of the server's score validation. */
export function validateScores(scores: Partial<Record<Aspect, number>>): Scores {
  const clean: Partial<Record<Aspect, number>> = {};
  for (const aspect of ASPECTS) {
    const value = scores[aspect];
    if (value === undefined) {
      throw new RangeError(`missing score for ${aspect}`);
    }
    if (!Number.isInteger(value) || value < 1 || value > 5) {
      throw new RangeError(`score for ${aspect} must be an integer in [1,5], got ${value}`);
    }
    clean[aspect] = value;
  }
  for (const key of Object.keys(scores)) {
    if (!(ASPECTS as readonly string[]).includes(key)) {
      throw new RangeError(`unknown aspect ${key}`);
    }
  }
  return clean as Scores;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    return this.fetchFn(`${this.baseUrl}${path}`, init);
  }

  private async readError(response: Response): Promise<ApiError> {
    let detail = `request failed with status ${response.status}`;
    try {
      const body = (await response.json()) as { detail?: string };
      if (typeof body.detail === "string") {
        detail = body.detail;
      }
    } catch {
      // keep the generic message
    }
    return new ApiError(detail, response.status);
  }

  async registerRater(raterId: string): Promise<void> {
    const response = await this.request("/api/raters", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ rater_id: raterId }),
    });
    if (!response.ok) {
      throw await this.readError(response);
    }
  }

  /** The next blinded task for this rater, or null when the study is exhausted. */
  async nextTask(raterId: string): Promise<RatingTask | null> {
    const response = await this.request(`/api/raters/${encodeURIComponent(raterId)}/next-task`);
    if (!response.ok) {
      throw await this.readError(response);
    }
    const body = (await response.json()) as { task: unknown; done: boolean };
    if (body.done || body.task === null) {
      return null;
    }
    return sanitizeTask(body.task);
  }

  /**
   * Validate locally, then submit. A 409 conflict (this rater already rated
   * the task) resolves as a duplicate outcome so the caller can advance
   * without writing twice.
   */
  async submitRating(
    raterId: string,
    taskId: string,
    scores: Partial<Record<Aspect, number>>,
  ): Promise<SubmitOutcome> {
    const clean = validateScores(scores);
    const response = await this.request("/api/ratings", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ rater_id: raterId, task_id: taskId, scores: clean }),
    });
    if (response.status === 409) {
      const body = (await response.json()) as { ack_id: string };
      return { kind: "duplicate", ackId: body.ack_id };
    }
    if (!response.ok) {
      throw await this.readError(response);
    }
    const body = (await response.json()) as { ack_id: string };
    return { kind: "accepted", ackId: body.ack_id };
  }
}
