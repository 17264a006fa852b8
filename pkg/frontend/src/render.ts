// HTML views. Pure string builders over service payloads and view state,
// so the fixture tests can check displayed values byte for byte.

import { layoutDag } from "./dag.js";
import {
  assignmentLabel,
  constraintLabel,
  escapeHtml,
  fmtNum,
  fmtPercent,
  fmtSigned,
  paramLabel,
} from "./format.js";
import { boundBandSvg, solutionSpaceSvg } from "./plots.js";
import type { SuggestionItem, ViewState } from "./state.js";
import type {
  Assignment,
  MarginalsPayload,
  NetworkSummary,
  ParamSuggestResponse,
  QueryResult,
  RelevancePayload,
  SoftevResponse,
  SoftevResultPayload,
  SolutionSpacePayload,
  SuggestionPayload,
  SuggestResponse,
} from "./types.js";

export function renderPosteriorBadge(q: QueryResult): string {
  const cond = Object.keys(q.evidence).length ? ` | ${assignmentLabel(q.evidence)}` : "";
  return (
    `<span class="badge" data-posterior="${q.posterior}">` +
    `Pr(${escapeHtml(assignmentLabel(q.target))}${escapeHtml(cond)}) = ` +
    `<strong>${fmtPercent(q.posterior)}</strong></span>`
  );
}

export function renderDag(summary: NetworkSummary, evidence: Assignment): string {
  const layout = layoutDag(summary);
  const edges = layout.edges
    .map(
      (e) =>
        `<line x1="${e.from.x.toFixed(1)}" y1="${(e.from.y + 14).toFixed(1)}" ` +
        `x2="${e.to.x.toFixed(1)}" y2="${(e.to.y - 14).toFixed(1)}" class="edge"/>`,
    )
    .join("");
  const nodes = layout.nodes
    .map((n) => {
      const observed = n.name in evidence;
      const label = observed ? `${n.name}=${evidence[n.name]}` : n.name;
      return (
        `<g class="node${observed ? " observed" : ""}" data-variable="${escapeHtml(n.name)}">` +
        `<ellipse cx="${n.x.toFixed(1)}" cy="${n.y.toFixed(1)}" rx="44" ry="14"/>` +
        `<text x="${n.x.toFixed(1)}" y="${(n.y + 4).toFixed(1)}">${escapeHtml(label)}</text></g>`
      );
    })
    .join("");
  return `<svg class="dag" width="${layout.width}" height="${layout.height}">${edges}${nodes}</svg>`;
}

export function renderCptTables(summary: NetworkSummary): string {
  const tables = summary.cpts.map((cpt) => {
    const header =
      `<tr>${cpt.parents.map((p) => `<th>${escapeHtml(p)}</th>`).join("")}` +
      cpt.states.map((s) => `<th>${escapeHtml(s)}</th>`).join("") +
      `<th>lock</th></tr>`;
    const rows = cpt.rows
      .map((row) => {
        const inst = cpt.parents.map((p) => `<td>${escapeHtml(row.instantiation[p])}</td>`).join("");
        const probs = row.probabilities.map((v) => `<td class="num">${fmtNum(v)}</td>`).join("");
        const locked = row.locked.length > 0;
        const lockAttrs =
          `data-lock-variable="${escapeHtml(cpt.variable)}" ` +
          `data-lock-state="${escapeHtml(cpt.states[0])}" ` +
          `data-lock-parents="${escapeHtml(JSON.stringify(row.instantiation))}"`;
        return (
          `<tr>${inst}${probs}<td><input type="checkbox" class="lock-toggle" ${lockAttrs}` +
          `${locked ? " checked" : ""}/></td></tr>`
        );
      })
      .join("");
    return (
      `<details class="cpt"><summary>${escapeHtml(cpt.variable)}</summary>` +
      `<table>${header}${rows}</table></details>`
    );
  });
  return tables.join("");
}

export function renderEvidencePanel(
  summary: NetworkSummary,
  evidence: Assignment,
  marginals: MarginalsPayload | null,
): string {
  const rows = summary.variables
    .map((v) => {
      const buttons = v.states
        .map((s) => {
          const active = evidence[v.name] === s;
          return (
            `<button class="state-toggle${active ? " active" : ""}" ` +
            `data-variable="${escapeHtml(v.name)}" data-state="${escapeHtml(s)}">${escapeHtml(s)}</button>`
          );
        })
        .join("");
      const beliefs = marginals
        ? v.states
            .map((s) => `<span class="belief">${escapeHtml(s)}: ${fmtPercent(marginals.marginals[v.name][s])}</span>`)
            .join(" ")
        : "";
      return (
        `<div class="evidence-row" data-variable="${escapeHtml(v.name)}">` +
        `<span class="var-name">${escapeHtml(v.name)}</span>${buttons}` +
        `<span class="beliefs">${beliefs}</span></div>`
      );
    })
    .join("");
  return rows;
}

export function renderConstraintBuilder(state: ViewState): string {
  const net = state.network;
  if (!net) return "";
  const variables = net.variables
    .map(
      (v) =>
        `<option value="${escapeHtml(v.name)}"${v.name === state.draft.targetVariable ? " selected" : ""}>` +
        `${escapeHtml(v.name)}</option>`,
    )
    .join("");
  const target = net.variables.find((v) => v.name === state.draft.targetVariable);
  const states = (target ? target.states : [])
    .map(
      (s) =>
        `<option value="${escapeHtml(s)}"${s === state.draft.targetState ? " selected" : ""}>${escapeHtml(s)}</option>`,
    )
    .join("");
  return (
    `<label>target <select id="draft-variable">${variables}</select>` +
    `<select id="draft-state">${states}</select></label>` +
    `<label>direction <select id="draft-direction">` +
    `<option value="at_least"${state.draft.direction === "at_least" ? " selected" : ""}>&ge;</option>` +
    `<option value="at_most"${state.draft.direction === "at_most" ? " selected" : ""}>&le;</option>` +
    `</select></label>` +
    `<label>threshold <input id="draft-threshold" type="range" min="0.01" max="0.99" step="0.01" ` +
    `value="${state.draft.threshold}"/> <span id="draft-threshold-value">${fmtNum(state.draft.threshold)}</span></label>`
  );
}

function renderDeltas(suggestion: SuggestionPayload): string {
  if (!suggestion.deltas || suggestion.deltas.length === 0) {
    return `<p class="note">no change needed</p>`;
  }
  const rows = suggestion.deltas
    .map(
      (d) =>
        `<tr><td>${escapeHtml(paramLabel(d.param))}</td>` +
        `<td class="num">${fmtNum(d.old_value)}</td>` +
        `<td class="num">${fmtSigned(d.delta)}</td>` +
        `<td class="num">${fmtNum(d.new_value)}</td></tr>`,
    )
    .join("");
  return (
    `<table class="deltas"><tr><th>parameter</th><th>now</th><th>delta</th><th>new</th></tr>` +
    rows +
    `</table>`
  );
}

export function renderSuggestion(item: SuggestionItem): string {
  const body: string[] = [`<h4>${escapeHtml(item.label)}</h4>`];
  if (item.kind === "softev") {
    const response = item.response as SoftevResponse;
    const result = response.result as SoftevResultPayload | { feasible: false; reason: string };
    if ("sensors" in result) {
      for (const s of result.sensors) {
        body.push(
          `<p>sensor <strong>${escapeHtml(s.node)}</strong> on ${escapeHtml(s.host)}: ` +
            `&lambda; = <strong>${fmtNum(s.likelihood_ratio)}</strong>, ` +
            `false positive ${fmtPercent(s.false_positive)}, ` +
            `false negative ${fmtPercent(s.false_negative)}</p>`,
        );
      }
      body.push(
        `<p>achieved <strong>${fmtPercent(result.achieved_query)}</strong>, ` +
          `distance <strong>${fmtNum(result.distance)}</strong></p>`,
      );
    } else {
      body.push(`<p class="error">infeasible: ${escapeHtml(result.reason)}</p>`);
    }
    if (response.suggestion) body.push(renderDeltas(response.suggestion));
  } else {
    const response = item.response as SuggestResponse;
    const s = response.suggestion;
    if (!s.feasible) {
      body.push(`<p class="error">infeasible${s.reason ? `: ${escapeHtml(s.reason)}` : ""}</p>`);
    } else {
      body.push(
        `<p>achieved <strong data-achieved="${s.achieved_query}">${fmtPercent(s.achieved_query!)}</strong>, ` +
          `distance D = <strong data-distance="${s.distance}">${fmtNum(s.distance!)}</strong></p>`,
      );
      body.push(renderDeltas(s));
      if (s.deltas && s.deltas.length) {
        body.push(
          `<button class="apply-suggestion" data-deltas="${escapeHtml(
            JSON.stringify(s.deltas.map((d) => ({ param: d.param, delta: d.delta }))),
          )}">apply</button>`,
        );
      }
      if (item.boundCurve) {
        body.push(boundBandSvg(item.boundCurve));
      }
    }
  }
  return `<div class="suggestion">${body.join("")}</div>`;
}

export function renderParamSolutions(payload: ParamSuggestResponse): string {
  const feasible = payload.solutions.filter((s) => s.feasible && s.interval);
  const rows = feasible
    .sort((a, b) => (a.distance ?? 0) - (b.distance ?? 0))
    .map(
      (s) =>
        `<tr><td>${escapeHtml(paramLabel(s.param))}</td>` +
        `<td class="num">${fmtNum(s.current)}</td>` +
        `<td class="num">[${fmtNum(s.interval![0])}, ${fmtNum(s.interval![1])}]</td>` +
        `<td class="num">${s.suggested === null ? "" : fmtNum(s.suggested)}</td>` +
        `<td class="num">${s.distance === null ? "" : fmtNum(s.distance)}</td></tr>`,
    )
    .join("");
  const infeasible = payload.solutions.filter((s) => !s.feasible).length;
  return (
    `<p>${constraintLabel(payload.constraint)}: ${feasible.length} admissible parameters` +
    (infeasible ? `, ${infeasible} infeasible` : "") +
    `</p>` +
    `<table class="solutions"><tr><th>parameter</th><th>now</th><th>admissible</th>` +
    `<th>suggested</th><th>|&Delta; log-odds|</th></tr>${rows}</table>`
  );
}

export function renderRelevance(payload: RelevancePayload): string {
  const rows = payload.ranking
    .map(
      (r) =>
        `<li><button class="pick-cpt" data-variable="${escapeHtml(r.variable)}">` +
        `${escapeHtml(r.variable)}</button> <span class="num">${fmtNum(r.strength)}</span></li>`,
    )
    .join("");
  return `<ol class="relevance">${rows}</ol>`;
}

export function renderSolutionSpace(
  space: SolutionSpacePayload,
  optimal: { d1: number; d2: number } | null,
): string {
  if (!space.boundary) {
    return `<p class="note">solution space has ${space.alphas.length} coefficients; plots need exactly two movable parameters</p>`;
  }
  const labels =
    `<p>${escapeHtml(paramLabel(space.boundary.param_1))} (x) vs ` +
    `${escapeHtml(paramLabel(space.boundary.param_2))} (y), shaded = constraint holds</p>`;
  return labels + solutionSpaceSvg(space, { optimal });
}

export function renderError(message: string | null): string {
  return message ? `<div class="error-banner">${escapeHtml(message)}</div>` : "";
}
