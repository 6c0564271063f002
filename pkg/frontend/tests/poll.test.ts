import { describe, expect, it } from "vitest";

import type { ApiClient } from "../src/api.js";
import { ApiError } from "../src/api.js";
import { PollCancelled, pollJob, pollToken } from "../src/poll.js";
import type { JobRecord, JobStatus } from "../src/types.js";

function record(status: JobStatus, progress = 0, error: string | null = null): JobRecord {
  return {
    id: "j1",
    kind: "simulate",
    status,
    progress,
    result_ref: status === "done" ? "/v1/jobs/j1/result" : null,
    submitted_at: "2026-08-15T00:00:00Z",
    finished_at: null,
    error,
  };
}

// Each entry is either a record to return or an error to throw; the stub
// walks the script one poll at a time.
function scriptedClient(script: (JobRecord | Error)[]) {
  const client = {
    job: async () => {
      const next = script.shift();
      if (next === undefined) throw new Error("script exhausted");
      if (next instanceof Error) throw next;
      return next;
    },
  };
  return client as unknown as ApiClient;
}

function sleepRecorder() {
  const slept: number[] = [];
  return {
    slept,
    sleep: async (ms: number) => {
      slept.push(ms);
    },
  };
}

describe("pollJob", () => {
  it("polls at a steady one-second interval while the job runs", async () => {
    const { slept, sleep } = sleepRecorder();
    const seen: number[] = [];
    const final = await pollJob(
      scriptedClient([record("queued"), record("running", 0.4), record("done", 1)]),
      "j1",
      { sleep, onUpdate: (r) => seen.push(r.progress) },
    );
    expect(final.status).toBe("done");
    expect(seen).toEqual([0, 0.4, 1]);
    expect(slept).toEqual([1000, 1000]);
  });

  it("backs off on transport errors, caps at the ceiling, and resets on contact", async () => {
    const { slept, sleep } = sleepRecorder();
    const flaky = new TypeError("fetch failed");
    const final = await pollJob(
      scriptedClient([
        record("running", 0.1),
        flaky,
        flaky,
        flaky,
        flaky,
        record("running", 0.8),
        record("done", 1),
      ]),
      "j1",
      { sleep },
    );
    expect(final.status).toBe("done");
    expect(slept).toEqual([1000, 2000, 4000, 8000, 8000, 1000]);
  });

  it("honours custom interval bounds", async () => {
    const { slept, sleep } = sleepRecorder();
    await pollJob(
      scriptedClient([new TypeError("down"), new TypeError("down"), record("done", 1)]),
      "j1",
      { sleep, intervalMs: 100, maxIntervalMs: 250 },
    );
    expect(slept).toEqual([200, 250]);
  });

  it("returns failed records instead of retrying them", async () => {
    const final = await pollJob(
      scriptedClient([record("failed", 0.3, "scenario 2 is infeasible")]),
      "j1",
      { sleep: async () => {} },
    );
    expect(final.status).toBe("failed");
    expect(final.error).toBe("scenario 2 is infeasible");
  });

  it("propagates API errors immediately", async () => {
    const unknownJob = new ApiError(404, "not_found", "", "no such job");
    await expect(
      pollJob(scriptedClient([unknownJob]), "j1", { sleep: async () => {} }),
    ).rejects.toBe(unknownJob);
  });

  it("stops with PollCancelled when the token is cancelled", async () => {
    const token = pollToken();
    const { sleep } = sleepRecorder();
    await expect(
      pollJob(scriptedClient([record("running", 0.2), record("running", 0.5)]), "j1", {
        sleep,
        token,
        onUpdate: () => token.cancel(),
      }),
    ).rejects.toBeInstanceOf(PollCancelled);
  });
});
