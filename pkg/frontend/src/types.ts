// Wire types mirroring the service's JSON payloads. The UI displays these
// values verbatim (after formatting); it never derives probabilities itself.

export type Assignment = Record<string, string>;

export interface ParamRef {
  variable: string;
  state: string;
  parents: Record<string, string>;
}

export interface DeltaPayload {
  param: ParamRef;
  delta: number;
  old_value: number;
  new_value: number;
}

export interface ConstraintPayload {
  target: Assignment;
  evidence: Assignment;
  direction: "at_least" | "at_most";
  threshold: number;
}

export interface CptRowPayload {
  instantiation: Record<string, string>;
  probabilities: number[];
  locked: string[];
}

export interface CptPayload {
  variable: string;
  parents: string[];
  states: string[];
  rows: CptRowPayload[];
}

export interface NetworkSummary {
  variables: { name: string; states: string[] }[];
  cpts: CptPayload[];
  edges: [string, string][];
}

export interface SessionInfo {
  session_id: string;
  network: NetworkSummary;
}

export interface NetworkStatePayload {
  network: NetworkSummary;
  evidence: Assignment;
  can_undo: boolean;
  document: string;
}

export interface QueryResult {
  target: Assignment;
  evidence: Assignment;
  posterior: number;
}

export interface MarginalsPayload {
  evidence: Assignment;
  marginals: Record<string, Record<string, number>>;
}

export interface AlphaEntry {
  param: ParamRef;
  alpha: number;
  inert: boolean;
}

export interface CrossEntry {
  param_x: ParamRef;
  param_y: ParamRef;
  alpha: number;
}

export interface AlphaReportPayload {
  constraint: ConstraintPayload;
  variables: string[];
  rhs: number;
  already_satisfied: boolean;
  alphas: AlphaEntry[];
  cross_alphas?: CrossEntry[];
}

export interface SuggestionPayload {
  feasible: boolean;
  achieved_query?: number;
  distance?: number;
  deltas?: DeltaPayload[];
  reason?: string;
}

export interface SuggestResponse {
  report: AlphaReportPayload;
  suggestion: SuggestionPayload;
}

export interface ParameterSolutionPayload {
  param: ParamRef;
  current: number;
  feasible: boolean;
  interval: [number, number] | null;
  suggested: number | null;
  distance: number | null;
}

export interface ParamSuggestResponse {
  constraint: ConstraintPayload;
  solutions: ParameterSolutionPayload[];
  infeasible_reason?: string;
}

export interface RelevancePayload {
  ranking: { variable: string; strength: number }[];
}

export interface BoundaryPayload {
  param_1: ParamRef;
  param_2: ParamRef;
  points: [number, number][];
}

export interface SolutionSpacePayload extends AlphaReportPayload {
  boundary: BoundaryPayload | null;
  membership_samples?: { d1: number; d2: number; member: boolean }[];
}

export interface BoundsCurvePayload {
  d: number;
  points: [number, number, number][];
}

export interface SensorPayload {
  host: string;
  node: string;
  likelihood_ratio: number;
  false_positive: number;
  false_negative: number;
}

export interface SoftevResultPayload {
  sensors: SensorPayload[];
  distance: number;
  achieved_query: number;
}

export interface SoftevResponse {
  result: SoftevResultPayload | { feasible: false; reason: string };
  suggestion?: SuggestionPayload;
  attached: boolean;
}

export interface ApplyResponse {
  network: NetworkSummary;
  can_undo: boolean;
}
