/**
 * Pipeline monitoring view models: step chips with status colors,
 * substitution badges and per-step log panes. Statuses come solely from the
 * polled pipeline payload; logs and badges from the run records.
 */

import { PipelineJson, RunRecordJson, StepResultJson } from "./types.js";

export type StepStatus = "pending" | "running" | "succeeded" | "failed" | "substituted";

export interface StepChip {
  order: number;
  stage: string;
  microserviceId: string;
  status: StepStatus;
  cssClass: string;
  substituted: boolean;
  substitutionLabel: string | null;
}

export interface LogPane {
  order: number;
  microserviceId: string;
  outcome: string;
  attempts: number;
  stdoutTail: string;
  stderrTail: string;
}

export interface PipelineView {
  id: string;
  name: string;
  status: string;
  chips: StepChip[];
  logs: LogPane[];
  finalStatus: string | null;
  artifactAvailable: boolean;
  selectionMode: string | null;
}

const STATUS_CLASSES: Record<StepStatus, string> = {
  pending: "chip chip-pending",
  running: "chip chip-running",
  succeeded: "chip chip-succeeded",
  failed: "chip chip-failed",
  substituted: "chip chip-substituted",
};

function tail(text: string, lines = 12): string {
  const parts = text.split("\n");
  return parts.slice(Math.max(0, parts.length - lines)).join("\n");
}

function logPane(result: StepResultJson): LogPane {
  return {
    order: result.step_order,
    microserviceId: result.microservice_id,
    outcome: result.outcome,
    attempts: result.attempt_count,
    stdoutTail: tail(result.stdout),
    stderrTail: tail(result.stderr),
  };
}

export function buildPipelineView(
  pipeline: PipelineJson,
  latestRun: RunRecordJson | null,
): PipelineView {
  const substitutions = new Map<string, [string, string]>();
  for (const [stage, original, substitute] of latestRun?.substitutions ?? []) {
    substitutions.set(stage, [original, substitute]);
  }
  const chips = pipeline.steps.map((step) => {
    const status = (STATUS_CLASSES[step.status as StepStatus]
      ? step.status
      : "pending") as StepStatus;
    const sub = substitutions.get(step.stage) ?? null;
    return {
      order: step.order,
      stage: step.stage,
      microserviceId: step.microservice_id,
      status,
      cssClass: STATUS_CLASSES[status],
      substituted: status === "substituted",
      substitutionLabel: sub ? `${sub[0]} → ${sub[1]}` : null,
    };
  });
  return {
    id: pipeline.id,
    name: pipeline.name,
    status: pipeline.status,
    chips,
    logs: (latestRun?.step_results ?? []).map(logPane),
    finalStatus: latestRun?.final_status ?? null,
    artifactAvailable: latestRun?.final_status === "completed",
    selectionMode: latestRun?.selection_mode ?? null,
  };
}
