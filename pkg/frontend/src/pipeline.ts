import { ApiClient, ApiError } from "./api.js";
import { pollJob, PollOptions } from "./poll.js";
import type {
  CalibrateConfig,
  CalibrateResult,
  SimulateConfig,
  SimulateResult,
} from "./types.js";

// One run = calibrate the decision cutoffs on the scenario's congruent
// null, then simulate the operating characteristics. Both halves are
// background jobs on the server; the view updates as they progress.

export type RunPhase = "idle" | "calibrating" | "simulating" | "done" | "failed";

export interface RunView {
  phase: RunPhase;
  jobId: string | null;
  progress: number;
  cutoffs: CalibrateResult | null;
  result: SimulateResult | null;
  error: string | null;
}

export function idleRunView(): RunView {
  return { phase: "idle", jobId: null, progress: 0, cutoffs: null, result: null, error: null };
}

export async function runPipeline(
  client: ApiClient,
  calibrateConfig: CalibrateConfig,
  simulateConfig: SimulateConfig,
  onUpdate: (view: RunView) => void,
  poll: PollOptions = {},
): Promise<RunView> {
  const view = idleRunView();
  const push = () => onUpdate({ ...view });

  try {
    const calJob = await client.calibrate(calibrateConfig);
    view.phase = "calibrating";
    view.jobId = calJob.id;
    push();
    const calDone = await pollJob(client, calJob.id, {
      ...poll,
      onUpdate: (record) => {
        view.progress = record.progress;
        push();
      },
    });
    if (calDone.status === "failed") {
      view.phase = "failed";
      view.error = calDone.error ?? "calibration failed";
      push();
      return view;
    }
    view.cutoffs = await client.jobResult<CalibrateResult>(calJob.id);
    push();

    const simJob = await client.simulate(simulateConfig);
    view.phase = "simulating";
    view.jobId = simJob.id;
    view.progress = 0;
    push();
    const simDone = await pollJob(client, simJob.id, {
      ...poll,
      onUpdate: (record) => {
        view.progress = record.progress;
        push();
      },
    });
    if (simDone.status === "failed") {
      view.phase = "failed";
      view.error = simDone.error ?? "simulation failed";
      push();
      return view;
    }
    view.result = await client.jobResult<SimulateResult>(simJob.id);
    view.phase = "done";
    view.progress = 1;
    push();
    return view;
  } catch (error) {
    view.phase = "failed";
    // Server messages (including 422 unsupported-method) pass through
    // verbatim; anything else is a transport problem.
    view.error = error instanceof ApiError ? error.message : String(error);
    push();
    return view;
  }
}
