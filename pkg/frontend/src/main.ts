/** DOM wiring: tabs, upload forms, selection flow, one-second monitor poll. */

import { ApiError, WorkbenchClient } from "./api.js";
import { buildCandidateCards, CandidateCard, selectionChoices } from "./cards.js";
import { buildCatalogRows, buildDualDocs, buildFindingRows } from "./catalog.js";
import {
  applyPollFailure,
  applyPollSuccess,
  initialPollState,
  POLL_INTERVAL_MS,
  staleBannerText,
} from "./monitor.js";
import { buildPipelineView } from "./pipeline.js";
import {
  candidateCardHtml,
  catalogTableHtml,
  dualDocsHtml,
  esc,
  findingsHtml,
  pipelineViewHtml,
} from "./render.js";
import {
  DatasetPayloadJson,
  JobJson,
  MicroserviceJson,
  PipelinePayloadJson,
  RunRecordJson,
} from "./types.js";

const client = new WorkbenchClient("");

const $ = (id: string): HTMLElement => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
};

function showError(target: HTMLElement, error: unknown): void {
  const text = error instanceof ApiError ? `${error.status}: ${error.body}` : String(error);
  target.innerHTML = `<p class="error">${esc(text)} <button class="retry">retry</button></p>`;
}

// --- tabs -------------------------------------------------------------------

function activateTab(name: string): void {
  document.querySelectorAll<HTMLElement>(".tab-page").forEach((page) => {
    page.hidden = page.dataset.tab !== name;
  });
  document.querySelectorAll<HTMLElement>(".tab-button").forEach((button) => {
    button.classList.toggle("active", button.dataset.tab === name);
  });
}

document.querySelectorAll<HTMLElement>(".tab-button").forEach((button) => {
  button.addEventListener("click", () => activateTab(button.dataset.tab ?? "catalog"));
});

// --- catalog ----------------------------------------------------------------

async function refreshCatalog(query = ""): Promise<void> {
  const target = $("catalog-list");
  try {
    const resp = await client.listMicroservices<MicroserviceJson[]>(query);
    target.innerHTML = catalogTableHtml(buildCatalogRows(resp.data));
    target.querySelectorAll<HTMLElement>(".svc-link").forEach((link) => {
      link.addEventListener("click", async (event) => {
        event.preventDefault();
        const detail = await client.getMicroservice<MicroserviceJson>(link.dataset.id ?? "");
        $("catalog-detail").innerHTML = dualDocsHtml(buildDualDocs(detail.data));
      });
    });
  } catch (error) {
    showError(target, error);
  }
}

$("catalog-search-form").addEventListener("submit", (event) => {
  event.preventDefault();
  const query = ($("catalog-query") as HTMLInputElement).value;
  void refreshCatalog(query);
});

// --- upload -----------------------------------------------------------------

$("upload-form").addEventListener("submit", async (event) => {
  event.preventDefault();
  const form = event.target as HTMLFormElement;
  const target = $("upload-result");
  try {
    const resp = await client.uploadMicroservice<MicroserviceJson>(new FormData(form));
    const findings = buildFindingRows(resp.data.validation);
    target.innerHTML = `
      <p>uploaded <strong>${esc(resp.data.submission.name)}</strong>
         (${esc(resp.data.id)}) — state <em>${esc(resp.data.state)}</em></p>
      ${findingsHtml(findings)}`;
    void refreshCatalog();
  } catch (error) {
    showError(target, error);
  }
});

// --- run flow -----------------------------------------------------------------

interface RunFlowState {
  datasetId: string | null;
  pipelineId: string | null;
  awaiting: boolean;
  defaults: Map<string, string>;
  picks: Map<string, string>;
  cards: CandidateCard[];
}

const flow: RunFlowState = {
  datasetId: null,
  pipelineId: null,
  awaiting: false,
  defaults: new Map(),
  picks: new Map(),
  cards: [],
};

$("dataset-form").addEventListener("submit", async (event) => {
  event.preventDefault();
  const target = $("dataset-result");
  try {
    const resp = await client.uploadDataset<DatasetPayloadJson>(
      new FormData(event.target as HTMLFormElement),
    );
    flow.datasetId = resp.data.dataset_id;
    const profile = resp.data.profile;
    target.innerHTML = `
      <p>dataset <code>${esc(resp.data.dataset_id)}</code>:
         ${profile.row_count} rows × ${profile.column_count} columns
         (${esc(profile.format)}), best target
         <strong>${esc(profile.best_target ?? "(none)")}</strong></p>`;
  } catch (error) {
    showError(target, error);
  }
});

function renderCards(): void {
  const target = $("candidates");
  const byStage = new Map<string, CandidateCard[]>();
  for (const card of flow.cards) {
    const list = byStage.get(card.stage) ?? [];
    list.push(card);
    byStage.set(card.stage, list);
  }
  const sections: string[] = [];
  for (const [stage, cards] of byStage) {
    const picked = flow.picks.get(stage) ?? flow.defaults.get(stage);
    sections.push(`
      <section class="stage-section">
        <h4>${esc(stage)}</h4>
        ${cards.map((c) => candidateCardHtml(c, c.id === picked)).join("")}
      </section>`);
  }
  target.innerHTML = sections.join("");
  target.querySelectorAll<HTMLElement>(".pick").forEach((button) => {
    button.addEventListener("click", () => {
      flow.picks.set(button.dataset.stage ?? "", button.dataset.id ?? "");
      renderCards();
    });
  });
}

$("pipeline-form").addEventListener("submit", async (event) => {
  event.preventDefault();
  const target = $("pipeline-result");
  if (!flow.datasetId) {
    target.innerHTML = `<p class="error">upload a dataset first</p>`;
    return;
  }
  const goal = ($("goal-input") as HTMLInputElement).value;
  const interactive = ($("mode-interactive") as HTMLInputElement).checked;
  try {
    const resp = await client.createPipeline<PipelinePayloadJson>({
      dataset_id: flow.datasetId,
      goal,
      mode: interactive ? "interactive" : "autonomous",
    });
    flow.pipelineId = resp.data.pipeline.id;
    flow.awaiting = resp.data.awaiting_selection;
    flow.defaults = new Map(
      resp.data.pipeline.steps.map((s) => [s.stage, s.microservice_id]),
    );
    flow.picks = new Map();
    flow.cards = [];
    if (resp.data.candidates) {
      for (const [stage, rec] of Object.entries(resp.data.candidates)) {
        flow.cards.push(...buildCandidateCards(rec, resp.raw, `candidates.${stage}`));
      }
    }
    target.innerHTML = `
      <p>pipeline <code>${esc(resp.data.pipeline.id)}</code> —
         status <em>${esc(resp.data.pipeline.status)}</em>
         ${flow.awaiting ? "(awaiting selection)" : ""}</p>`;
    renderCards();
    $("confirm-selection").hidden = !flow.awaiting;
    $("execute-pipeline").hidden = flow.awaiting;
  } catch (error) {
    showError(target, error);
  }
});

$("confirm-selection").addEventListener("click", async () => {
  const target = $("pipeline-result");
  if (!flow.pipelineId) return;
  try {
    const choices = selectionChoices(flow.picks, flow.defaults);
    const resp = await client.submitSelections<{ pipeline: PipelinePayloadJson["pipeline"] }>(
      flow.pipelineId, choices);
    flow.awaiting = false;
    target.innerHTML = `<p>selections applied; pipeline
      <em>${esc(resp.data.pipeline.status)}</em></p>`;
    $("confirm-selection").hidden = true;
    $("execute-pipeline").hidden = false;
  } catch (error) {
    showError(target, error);
  }
});

$("execute-pipeline").addEventListener("click", async () => {
  const target = $("pipeline-result");
  if (!flow.pipelineId) return;
  try {
    const resp = await client.executePipeline<JobJson>(flow.pipelineId);
    target.innerHTML = `<p>execution job <code>${esc(resp.data.id)}</code> queued</p>`;
    ($("monitor-pipeline-id") as HTMLInputElement).value = flow.pipelineId;
    activateTab("monitor");
    startMonitor(flow.pipelineId);
  } catch (error) {
    showError(target, error);
  }
});

// --- monitor -------------------------------------------------------------------

let pollTimer: number | null = null;
let pollState = initialPollState();

function startMonitor(pipelineId: string): void {
  if (pollTimer !== null) {
    window.clearInterval(pollTimer);
  }
  pollState = initialPollState();
  const tick = async (): Promise<void> => {
    const banner = $("stale-banner");
    const target = $("monitor-view");
    try {
      const pipelineResp = await client.getPipeline<PipelinePayloadJson>(pipelineId);
      const runsResp = await client.getRuns<RunRecordJson[]>(pipelineId);
      pollState = applyPollSuccess(pollState, Date.now());
      const latest = runsResp.data.length ? runsResp.data[runsResp.data.length - 1] : null;
      const view = buildPipelineView(pipelineResp.data.pipeline, latest);
      target.innerHTML = pipelineViewHtml(view) + (view.artifactAvailable
        ? `<p><a href="${client.artifactUrl(pipelineId)}" download>download final artifact</a></p>`
        : "");
    } catch {
      pollState = applyPollFailure(pollState);
    }
    const text = staleBannerText(pollState);
    banner.hidden = text === null;
    banner.textContent = text ?? "";
  };
  void tick();
  pollTimer = window.setInterval(() => void tick(), POLL_INTERVAL_MS);
}

$("monitor-form").addEventListener("submit", (event) => {
  event.preventDefault();
  const pipelineId = ($("monitor-pipeline-id") as HTMLInputElement).value.trim();
  if (pipelineId) {
    startMonitor(pipelineId);
  }
});

// --- boot ------------------------------------------------------------------------

activateTab("catalog");
void refreshCatalog();
