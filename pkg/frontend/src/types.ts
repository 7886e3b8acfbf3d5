/** Wire types for the route assessment service.
 *
 * These mirror the service's JSON bodies field for field. The page never
 * derives a probability of its own; everything rendered is read straight
 * out of one of these documents.
 */

export interface LinkDoc {
  id: string;
  a: string;
  b: string;
  length_ratio: number;
}

export interface NetworkDoc {
  nodes: string[];
  links: LinkDoc[];
  source: string;
  sink: string;
}

export interface RouteEvaluationDoc {
  links: string[];
  pSuccess: number;
  pFailure: number;
  expectedUtility: number;
}

export interface DecisionDoc {
  perRoute: RouteEvaluationDoc[];
  recommended: number;
  recommendedLinks: string[];
  tieBroken: boolean;
}

export interface PlanResponse extends DecisionDoc {
  marginals: Record<string, number>;
}

export interface AssessmentDoc {
  linkId: string | null;
  pAttack: number;
  pClear: number;
  unnormalizedAttack: number;
  unnormalizedClear: number;
  normalizingConstant: number;
  provenance: Record<string, unknown>;
}

export type PocMode = "upheld" | "rejected";
export type Outcome = "clear" | "incident";
export type Propagation = "adjacent" | "all-downstream";

export interface ConditionalDoc {
  link: string;
  given: string;
  p: number;
}

export interface DependencyDoc {
  kind: "independent" | "conditional-chain";
  conditionals: ConditionalDoc[];
}

export interface UtilityDoc {
  kind: "binary" | "length-penalty";
  x_util: number | null;
}

export interface TraversalDoc {
  link: string;
  outcome: Outcome;
}

export interface LogEntryDoc {
  event: string;
  observation: TraversalDoc | null;
  recommendation: DecisionDoc | null;
}

export interface SessionDoc {
  sessionId: string;
  revision: number;
  status: "open" | "complete";
  network: NetworkDoc;
  marginals: Record<string, number>;
  baseMarginals: Record<string, number>;
  dependency: DependencyDoc;
  utility: UtilityDoc;
  pocMode: PocMode;
  wClear: number;
  wIncident: number;
  propagation: Propagation;
  currentNode: string;
  visited: string[];
  traversedLinks: TraversalDoc[];
  log: LogEntryDoc[];
  continuations: string[];
  recommendation: DecisionDoc | null;
}

export interface ErrorBody {
  code: string;
  message: string;
  detail: unknown;
}

/* request bodies */

export interface PriorReq {
  kind: "uniform" | "beta";
  a?: number;
  b?: number;
}

export interface PipelineConfigReq {
  seed?: number;
  iterations?: number;
  burnIn?: number;
  samples?: number;
  window?: number;
  grid?: "coarse" | "fine";
  step?: number;
  flatCurve?: boolean;
  likelihoodScale?: number;
  likelihoodExponent?: number;
}

export interface AssessRequest {
  link?: string;
  regionalCsv?: string;
  history?: number[];
  covariates?: Record<string, number>;
  prior?: PriorReq;
  likelihood?: "adversarial" | "conventional";
  config?: PipelineConfigReq;
}

export interface PlanRequest {
  network: NetworkDoc;
  marginals?: Record<string, number>;
  assessments?: AssessRequest[];
  dependency?: DependencyDoc;
  utility?: UtilityDoc;
}

export interface SessionCreateRequest extends PlanRequest {
  pocMode?: PocMode;
  wClear?: number;
  wIncident?: number;
  propagation?: Propagation;
}

export interface AdvanceRequest {
  revision: number;
  link: string;
  outcome: Outcome;
  wClear?: number;
  wIncident?: number;
}
