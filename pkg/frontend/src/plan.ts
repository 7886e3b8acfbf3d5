/** View-model for the route ranking table and per-link badges.
 *
 * Every string here is a formatted copy of a service response field; no
 * probability is computed on this side of the wire.
 */

import { fmt3 } from "./format.js";
import type { PlanResponse } from "./types.js";

export interface PlanRow {
  name: string;
  links: string[];
  pSuccess: string;
  pFailure: string;
  expectedUtility: string;
  recommended: boolean;
}

export interface PlanView {
  rows: PlanRow[];
  highlight: Set<string>;
  badges: Map<string, string>;
  tieBroken: boolean;
}

export function routeName(links: string[]): string {
  return links.join("-");
}

export function buildPlanView(plan: PlanResponse): PlanView {
  const recommendedName = routeName(plan.recommendedLinks);
  // descending expected utility; under binary utility this is the
  // success-probability ranking since the service sets them equal
  const ranked = [...plan.perRoute].sort((a, b) => b.expectedUtility - a.expectedUtility);
  const rows: PlanRow[] = ranked.map((entry) => ({
    name: routeName(entry.links),
    links: [...entry.links],
    pSuccess: fmt3(entry.pSuccess),
    pFailure: fmt3(entry.pFailure),
    expectedUtility: fmt3(entry.expectedUtility),
    recommended: routeName(entry.links) === recommendedName,
  }));
  return {
    rows,
    highlight: new Set(plan.recommendedLinks),
    badges: new Map(Object.entries(plan.marginals).map(([id, p]) => [id, fmt3(p)])),
    tieBroken: plan.tieBroken,
  };
}
