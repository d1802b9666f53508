/**
 * JSON payload shapes from the gateway API. The workbench never recomputes
 * any of these values; it projects them into view models verbatim.
 */

export interface BreakdownJson {
  keyword: number;
  semantic: number;
  compatibility: number;
  pattern: number;
  composite: number;
  weights: number[];
  explanation: string;
}

export interface CandidateJson {
  id: string;
  name?: string;
  breakdown: BreakdownJson;
  explanation: string;
}

export interface StageRecommendationJson {
  stage: string;
  candidates: CandidateJson[];
}

export interface StepJson {
  order: number;
  stage: string;
  microservice_id: string;
  params: Record<string, unknown>;
  depends_on: number | null;
  expected_input_format: string;
  expected_output_format: string;
  status: string;
}

export interface PipelineJson {
  id: string;
  name: string;
  owner: string;
  status: string;
  steps: StepJson[];
  intent: { task_type: string; target: string | null; required_stages: string[] };
  profile_ref: string;
}

export interface StepResultJson {
  step_order: number;
  microservice_id: string;
  attempt_count: number;
  outcome: string;
  stdout: string;
  stderr: string;
  duration: number;
  output_artifact: string | null;
  error_kind: string | null;
}

export interface RunRecordJson {
  pipeline_id: string;
  user_id: string;
  step_results: StepResultJson[];
  final_status: string;
  substitutions: [string, string, string][];
  started_at: string;
  ended_at: string;
  workspace: string;
  selection_mode: string;
}

export interface ValidationFindingJson {
  check: string;
  level: string;
  message: string;
}

export interface MicroserviceJson {
  id: string;
  state: string;
  created_at: string;
  composite_text: string;
  submission: {
    name: string;
    user_description: string;
    python_version: string;
    category: string;
    keywords: string[];
  };
  analysis: {
    semantic_description: string;
    capabilities: string[];
    input_formats: string[];
    output_formats: string[];
    security_flags: { pattern: string; location: string; severity: string }[];
    analyzer_id: string;
    analyzed_at: string;
  } | null;
  validation: ValidationFindingJson[] | null;
  match_score?: number;
}

export interface JobJson {
  id: string;
  kind: string;
  state: string;
  pipeline_id: string;
  result_ref: string | null;
  error_detail: string | null;
}

export interface PipelinePayloadJson {
  pipeline: PipelineJson;
  validation?: Record<string, { level: string; message: string }>;
  candidates?: Record<string, StageRecommendationJson>;
  awaiting_selection: boolean;
}

export interface DatasetPayloadJson {
  dataset_id: string;
  profile: {
    best_target: string | null;
    row_count: number;
    column_count: number;
    format: string;
    quality: { overall: number; completeness: number; consistency: number; uniqueness: number };
    schema: { name: string; storage_type: string; semantic_type: string }[];
  };
}
