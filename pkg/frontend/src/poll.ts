import type { ApiClient } from "./api.js";
import type { JobRecord } from "./types.js";

// Jobs are polled rather than pushed: desk-scale runs finish in seconds
// to minutes. The interval starts at one second and backs off on
// transport errors only; a reachable server is polled at a steady rate.

export interface PollToken {
  cancelled: boolean;
  cancel(): void;
}

export function pollToken(): PollToken {
  return {
    cancelled: false,
    cancel() {
      this.cancelled = true;
    },
  };
}

export interface PollOptions {
  intervalMs?: number;
  maxIntervalMs?: number;
  onUpdate?: (record: JobRecord) => void;
  token?: PollToken;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class PollCancelled extends Error {
  constructor() {
    super("polling cancelled");
    this.name = "PollCancelled";
  }
}

// Resolves with the terminal record (status done or failed); the caller
// decides what a failure means for its view.
export async function pollJob(
  client: ApiClient,
  jobId: string,
  options: PollOptions = {},
): Promise<JobRecord> {
  const base = options.intervalMs ?? 1000;
  const ceiling = options.maxIntervalMs ?? 8000;
  const sleep = options.sleep ?? defaultSleep;
  let interval = base;

  for (;;) {
    if (options.token?.cancelled) throw new PollCancelled();
    let record: JobRecord | null = null;
    try {
      record = await client.job(jobId);
      interval = base;
    } catch (error) {
      // Transient transport problem: back off and retry. Let API errors
      // (e.g. unknown job) propagate, they will not heal on retry.
      if ((error as { name?: string }).name === "ApiError") throw error;
      interval = Math.min(interval * 2, ceiling);
    }
    if (record !== null) {
      options.onUpdate?.(record);
      if (record.status === "done" || record.status === "failed") return record;
    }
    await sleep(interval);
  }
}
