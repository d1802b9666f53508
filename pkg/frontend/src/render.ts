/** HTML templates over the view models; no logic beyond string assembly. */

import { CandidateCard } from "./cards.js";
import { CatalogRow, DualDocs, FindingRow } from "./catalog.js";
import { PipelineView } from "./pipeline.js";

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function candidateCardHtml(card: CandidateCard, selected: boolean): string {
  const bars = card.signals
    .map(
      (s) => `
      <div class="signal">
        <span class="signal-label">${esc(s.label)}</span>
        <div class="bar"><div class="bar-fill" style="width:${s.percent}%"></div></div>
        <span class="signal-value">${esc(s.display)}</span>
      </div>`,
    )
    .join("");
  return `
  <div class="card ${selected ? "card-selected" : ""}" data-stage="${esc(card.stage)}" data-id="${esc(card.id)}">
    <div class="card-head">
      <span class="rank">#${card.rank}</span>
      <strong>${esc(card.name)}</strong>
      <code>${esc(card.id)}</code>
      <span class="composite">composite ${esc(card.composite)}</span>
    </div>
    ${bars}
    <p class="explanation">${esc(card.explanation)}</p>
    <button class="pick" data-stage="${esc(card.stage)}" data-id="${esc(card.id)}">
      ${selected ? "selected" : "select"}
    </button>
  </div>`;
}

export function pipelineViewHtml(view: PipelineView): string {
  const chips = view.chips
    .map(
      (chip) => `
      <div class="${chip.cssClass}" title="${esc(chip.microserviceId)}">
        <span>${chip.order}. ${esc(chip.stage)}</span>
        <small>${esc(chip.microserviceId)}</small>
        ${chip.substituted ? `<span class="badge">substituted ${esc(chip.substitutionLabel ?? "")}</span>` : ""}
      </div>`,
    )
    .join("");
  const logs = view.logs
    .map(
      (pane) => `
      <details class="log-pane">
        <summary>step ${pane.order} [${esc(pane.microserviceId)}] ${esc(pane.outcome)}
          (${pane.attempts} attempt${pane.attempts === 1 ? "" : "s"})</summary>
        <pre class="stdout">${esc(pane.stdoutTail) || "(no stdout)"}</pre>
        <pre class="stderr">${esc(pane.stderrTail) || "(no stderr)"}</pre>
      </details>`,
    )
    .join("");
  return `
  <h3>${esc(view.name)} <small>(${esc(view.id)})</small> — <em>${esc(view.status)}</em></h3>
  ${view.selectionMode ? `<p class="selection-mode">selection mode: ${esc(view.selectionMode)}</p>` : ""}
  <div class="chips">${chips}</div>
  <div class="logs">${logs}</div>`;
}

export function catalogTableHtml(rows: CatalogRow[]): string {
  const body = rows
    .map(
      (r) => `
      <tr data-id="${esc(r.id)}">
        <td><a href="#" class="svc-link" data-id="${esc(r.id)}">${esc(r.name)}</a></td>
        <td>${esc(r.category)}</td>
        <td>${esc(r.state)}</td>
        <td>${esc(r.capabilities.join(", "))}</td>
        <td>${r.matchScore === null ? "" : esc(String(r.matchScore))}</td>
      </tr>`,
    )
    .join("");
  return `
  <table class="catalog">
    <thead><tr><th>name</th><th>category</th><th>state</th><th>capabilities</th><th>match</th></tr></thead>
    <tbody>${body}</tbody>
  </table>`;
}

export function dualDocsHtml(docs: DualDocs): string {
  return `
  <h3>${esc(docs.name)}</h3>
  <div class="dual-docs">
    <section>
      <h4>Author documentation</h4>
      <pre>${esc(docs.authorDescription) || "(none)"}</pre>
    </section>
    <section>
      <h4>Code-derived analysis <small>${esc(docs.analyzerId)} @ ${esc(docs.analyzedAt)}</small></h4>
      <p>${esc(docs.derivedDescription)}</p>
      <p>capabilities: ${esc(docs.capabilities.join(", ")) || "(none)"}</p>
      <p>formats: in ${esc(docs.inputFormats.join("/")) || "?"} / out ${esc(docs.outputFormats.join("/")) || "?"}</p>
      ${docs.securityFlags.length ? `<p class="flags">security: ${esc(docs.securityFlags.join("; "))}</p>` : ""}
    </section>
  </div>`;
}

export function findingsHtml(rows: FindingRow[]): string {
  if (!rows.length) {
    return `<p class="ok">validation passed with no findings</p>`;
  }
  const items = rows
    .map(
      (f) => `<li class="${f.blocking ? "finding-error" : "finding-warning"}">
        [${esc(f.check)}] ${esc(f.level)}: ${esc(f.message)}</li>`,
    )
    .join("");
  return `<ul class="findings">${items}</ul>`;
}
