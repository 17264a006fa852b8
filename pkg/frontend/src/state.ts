// View state and its reducers. Every reducer consumes a confirmed service
// response; nothing here is updated optimistically, and nothing here
// computes probabilities.

import type {
  ApplyResponse,
  Assignment,
  BoundsCurvePayload,
  MarginalsPayload,
  NetworkStatePayload,
  NetworkSummary,
  ParamSuggestResponse,
  QueryResult,
  RelevancePayload,
  SessionInfo,
  SoftevResponse,
  SolutionSpacePayload,
  SuggestResponse,
} from "./types.js";

export interface ConstraintDraft {
  targetVariable: string;
  targetState: string;
  direction: "at_least" | "at_most";
  threshold: number;
}

export interface SuggestionItem {
  kind: "cpt" | "two-cpt" | "softev";
  label: string;
  response: SuggestResponse | SoftevResponse;
  boundCurve: BoundsCurvePayload | null;
}

export interface ViewState {
  sessionId: string | null;
  network: NetworkSummary | null;
  evidence: Assignment;
  marginals: MarginalsPayload | null;
  draft: ConstraintDraft;
  posterior: QueryResult | null;
  relevance: RelevancePayload | null;
  paramSolutions: ParamSuggestResponse | null;
  suggestions: SuggestionItem[];
  solutionSpace: SolutionSpacePayload | null;
  canUndo: boolean;
  lastError: string | null;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    network: null,
    evidence: {},
    marginals: null,
    draft: { targetVariable: "", targetState: "", direction: "at_least", threshold: 0.9 },
    posterior: null,
    relevance: null,
    paramSolutions: null,
    suggestions: [],
    solutionSpace: null,
    canUndo: false,
    lastError: null,
  };
}

export function withSession(state: ViewState, info: SessionInfo): ViewState {
  const first = info.network.variables[0];
  return {
    ...initialState(),
    sessionId: info.session_id,
    network: info.network,
    draft: {
      targetVariable: first ? first.name : "",
      targetState: first ? first.states[0] : "",
      direction: "at_least",
      threshold: 0.9,
    },
  };
}

export function withNetworkState(state: ViewState, payload: NetworkStatePayload): ViewState {
  return {
    ...state,
    network: payload.network,
    evidence: payload.evidence,
    canUndo: payload.can_undo,
  };
}

export function withEvidence(state: ViewState, evidence: Assignment): ViewState {
  // evidence changed: cached numbers no longer correspond to it
  return {
    ...state,
    evidence,
    marginals: null,
    posterior: null,
    relevance: null,
    paramSolutions: null,
    suggestions: [],
    solutionSpace: null,
  };
}

export function withMarginals(state: ViewState, marginals: MarginalsPayload): ViewState {
  return { ...state, marginals };
}

export function withPosterior(state: ViewState, posterior: QueryResult): ViewState {
  return { ...state, posterior };
}

export function withDraft(state: ViewState, draft: Partial<ConstraintDraft>): ViewState {
  return { ...state, draft: { ...state.draft, ...draft } };
}

export function withRelevance(state: ViewState, relevance: RelevancePayload): ViewState {
  return { ...state, relevance };
}

export function withParamSolutions(state: ViewState, paramSolutions: ParamSuggestResponse): ViewState {
  return { ...state, paramSolutions };
}

export function withSuggestion(state: ViewState, item: SuggestionItem): ViewState {
  return { ...state, suggestions: [...state.suggestions, item] };
}

export function withSolutionSpace(state: ViewState, solutionSpace: SolutionSpacePayload): ViewState {
  return { ...state, solutionSpace };
}

export function afterApplyConfirmed(state: ViewState, response: ApplyResponse): ViewState {
  // a confirmed mutation invalidates every cached analysis result
  return {
    ...state,
    network: response.network,
    canUndo: response.can_undo,
    marginals: null,
    posterior: null,
    relevance: null,
    paramSolutions: null,
    suggestions: [],
    solutionSpace: null,
  };
}

export const afterUndoConfirmed = afterApplyConfirmed;

export function withError(state: ViewState, message: string): ViewState {
  return { ...state, lastError: message };
}

export function clearError(state: ViewState): ViewState {
  return { ...state, lastError: null };
}
