// DOM glue: wires the panels to the service client and re-renders on every
// confirmed response. All state transitions go through state.ts reducers.

import { ApiClient, ServiceError } from "./api.js";
import {
  renderConstraintBuilder,
  renderCptTables,
  renderDag,
  renderError,
  renderEvidencePanel,
  renderParamSolutions,
  renderPosteriorBadge,
  renderRelevance,
  renderSolutionSpace,
  renderSuggestion,
} from "./render.js";
import { SAMPLE_DOCUMENT } from "./sample.js";
import * as state from "./state.js";
import type { SuggestResponse } from "./types.js";

const api = new ApiClient("");
let view = state.initialState();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function draftConstraint() {
  return {
    target: { [view.draft.targetVariable]: view.draft.targetState },
    direction: view.draft.direction,
    threshold: view.draft.threshold,
  };
}

async function guarded(action: () => Promise<void>): Promise<void> {
  try {
    view = state.clearError(view);
    await action();
  } catch (err) {
    const message = err instanceof ServiceError ? err.message : String(err);
    view = state.withError(view, message);
  }
  render();
}

async function refreshMarginals(): Promise<void> {
  const sid = view.sessionId;
  if (!sid) return;
  view = state.withMarginals(view, await api.marginals(sid));
  if (view.draft.targetVariable) {
    view = state.withPosterior(
      view,
      await api.query(sid, { [view.draft.targetVariable]: view.draft.targetState }),
    );
  }
}

async function loadDocument(document: string): Promise<void> {
  const info = await api.createSession(document);
  view = state.withSession(view, info);
  await refreshMarginals();
}

function render(): void {
  el("error-slot").innerHTML = renderError(view.lastError);
  if (!view.network) return;
  el("dag-slot").innerHTML = renderDag(view.network, view.evidence);
  el("cpt-slot").innerHTML = renderCptTables(view.network);
  el("evidence-slot").innerHTML = renderEvidencePanel(view.network, view.evidence, view.marginals);
  el("constraint-slot").innerHTML = renderConstraintBuilder(view);
  el("badge-slot").innerHTML = view.posterior ? renderPosteriorBadge(view.posterior) : "";
  el("relevance-slot").innerHTML = view.relevance ? renderRelevance(view.relevance) : "";
  el("solutions-slot").innerHTML = view.paramSolutions
    ? renderParamSolutions(view.paramSolutions)
    : "";
  el("suggestions-slot").innerHTML = view.suggestions.map(renderSuggestion).join("");
  el("space-slot").innerHTML = view.solutionSpace
    ? renderSolutionSpace(view.solutionSpace, optimalPoint())
    : "";
  (el("undo-button") as HTMLButtonElement).disabled = !view.canUndo;
  wire();
}

function optimalPoint(): { d1: number; d2: number } | null {
  const space = view.solutionSpace;
  if (!space || !space.boundary) return null;
  for (const item of view.suggestions) {
    const response = item.response as SuggestResponse;
    const deltas = response.suggestion?.deltas;
    if (!deltas) continue;
    const d1 = deltas.find((d) => d.param.variable === space.boundary!.param_1.variable);
    const d2 = deltas.find((d) => d.param.variable === space.boundary!.param_2.variable);
    if (d1 || d2) return { d1: d1?.delta ?? 0, d2: d2?.delta ?? 0 };
  }
  return null;
}

function wire(): void {
  document.querySelectorAll<HTMLButtonElement>(".state-toggle").forEach((button) => {
    button.onclick = () =>
      guarded(async () => {
        const variable = button.dataset.variable!;
        const value = button.dataset.state!;
        const next = { ...view.evidence };
        if (next[variable] === value) delete next[variable];
        else next[variable] = value;
        const confirmed = await api.setEvidence(view.sessionId!, next);
        view = state.withEvidence(view, confirmed.evidence);
        await refreshMarginals();
      });
  });
  document.querySelectorAll<HTMLInputElement>(".lock-toggle").forEach((box) => {
    box.onchange = () =>
      guarded(async () => {
        await api.setLock(
          view.sessionId!,
          {
            variable: box.dataset.lockVariable!,
            state: box.dataset.lockState!,
            parents: JSON.parse(box.dataset.lockParents!),
          },
          box.checked,
        );
        view = state.withNetworkState(view, await api.networkState(view.sessionId!));
      });
  });
  document.querySelectorAll<HTMLButtonElement>(".pick-cpt").forEach((button) => {
    button.onclick = () => {
      (el("cpt-pick") as HTMLInputElement).value = button.dataset.variable!;
    };
  });
  document.querySelectorAll<HTMLButtonElement>(".apply-suggestion").forEach((button) => {
    button.onclick = () =>
      guarded(async () => {
        const deltas = JSON.parse(button.dataset.deltas!);
        const response = await api.apply(view.sessionId!, deltas);
        view = state.afterApplyConfirmed(view, response);
        await refreshMarginals();
      });
  });
}

function wireStatic(): void {
  el("load-sample").onclick = () =>
    guarded(async () => {
      (el("document-input") as HTMLTextAreaElement).value = SAMPLE_DOCUMENT;
      await loadDocument(SAMPLE_DOCUMENT);
    });
  el("load-document").onclick = () =>
    guarded(() => loadDocument((el("document-input") as HTMLTextAreaElement).value));
  el("undo-button").onclick = () =>
    guarded(async () => {
      const response = await api.undo(view.sessionId!);
      view = state.afterUndoConfirmed(view, response);
      await refreshMarginals();
    });
  el("clear-evidence").onclick = () =>
    guarded(async () => {
      const confirmed = await api.clearEvidence(view.sessionId!);
      view = state.withEvidence(view, confirmed.evidence);
      await refreshMarginals();
    });
  el("run-relevance").onclick = () =>
    guarded(async () => {
      view = state.withRelevance(view, await api.relevance(view.sessionId!, draftConstraint()));
    });
  el("run-params").onclick = () =>
    guarded(async () => {
      view = state.withParamSolutions(
        view,
        await api.suggestParam(view.sessionId!, draftConstraint()),
      );
    });
  el("run-cpt").onclick = () =>
    guarded(async () => {
      const variable = (el("cpt-pick") as HTMLInputElement).value.trim();
      const response = await api.suggestCpt(view.sessionId!, draftConstraint(), variable);
      const curve = response.suggestion.feasible && response.suggestion.distance
        ? await api.bounds(response.suggestion.distance, 61)
        : null;
      view = state.withSuggestion(view, {
        kind: "cpt",
        label: `CPT of ${variable}`,
        response,
        boundCurve: curve,
      });
      view = state.withSolutionSpace(
        view,
        await api.solutionSpace(view.sessionId!, draftConstraint(), [variable]),
      );
    });
  el("run-two-cpt").onclick = () =>
    guarded(async () => {
      const pair = (el("cpt-pick") as HTMLInputElement).value
        .split(",")
        .map((s) => s.trim())
        .filter(Boolean);
      if (pair.length !== 2) throw new Error("enter two variables, comma separated");
      const response = await api.suggestTwoCpt(view.sessionId!, draftConstraint(), pair[0], pair[1]);
      const curve = response.suggestion.feasible && response.suggestion.distance
        ? await api.bounds(response.suggestion.distance, 61)
        : null;
      view = state.withSuggestion(view, {
        kind: "two-cpt",
        label: `CPTs of ${pair[0]} and ${pair[1]}`,
        response,
        boundCurve: curve,
      });
      view = state.withSolutionSpace(
        view,
        await api.solutionSpace(view.sessionId!, draftConstraint(), pair),
      );
    });
  el("run-softev").onclick = () =>
    guarded(async () => {
      const hosts = (el("softev-hosts") as HTMLInputElement).value
        .split(",")
        .map((s) => s.trim())
        .filter(Boolean);
      const response = await api.softev(view.sessionId!, draftConstraint(), hosts, false);
      view = state.withSuggestion(view, {
        kind: "softev",
        label: `soft evidence on ${hosts.join(", ")}`,
        response,
        boundCurve: null,
      });
    });
  document.body.addEventListener("change", (event) => {
    const target = event.target as HTMLElement;
    if (target.id === "draft-variable") {
      const name = (target as HTMLSelectElement).value;
      const variable = view.network?.variables.find((v) => v.name === name);
      view = state.withDraft(view, {
        targetVariable: name,
        targetState: variable ? variable.states[0] : "",
      });
      guarded(refreshMarginals);
    } else if (target.id === "draft-state") {
      view = state.withDraft(view, { targetState: (target as HTMLSelectElement).value });
      guarded(refreshMarginals);
    } else if (target.id === "draft-direction") {
      view = state.withDraft(view, {
        direction: (target as HTMLSelectElement).value as "at_least" | "at_most",
      });
      render();
    } else if (target.id === "draft-threshold") {
      view = state.withDraft(view, { threshold: Number((target as HTMLInputElement).value) });
      render();
    }
  });
}

wireStatic();
render();
