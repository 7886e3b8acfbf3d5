/** Sequential walk state and the side-effect-free what-if preview. */

import { Client, ConflictError } from "./api.js";
import { fmt3 } from "./format.js";
import type {
  AdvanceRequest,
  Outcome,
  PocMode,
  SessionCreateRequest,
  SessionDoc,
  TraversalDoc,
} from "./types.js";

export interface WalkView {
  sessionId: string;
  revision: number;
  status: "open" | "complete";
  currentNode: string;
  continuations: string[];
  badges: Map<string, string>;
  recommendedLinks: string[];
  pocMode: PocMode;
  wClear: number;
  wIncident: number;
  logLines: string[];
}

export interface WeightOverride {
  wClear: number;
  wIncident: number;
}

export interface ConflictNotice {
  kind: "conflict";
  currentRevision: number;
  message: string;
}

export interface WhatIfPreview {
  mode: PocMode;
  badges: Map<string, string>;
  recommendedLinks: string[];
  continuations: string[];
  status: "open" | "complete";
}

function logLine(entry: { event: string; observation: TraversalDoc | null }): string {
  if (entry.observation === null) return entry.event;
  return `${entry.event}: crossed ${entry.observation.link} (${entry.observation.outcome})`;
}

export class WalkController {
  private live: SessionDoc | null = null;

  constructor(private readonly client: Client) {}

  get session(): SessionDoc {
    if (!this.live) throw new Error("no open session");
    return this.live;
  }

  get hasSession(): boolean {
    return this.live !== null;
  }

  async start(req: SessionCreateRequest): Promise<WalkView> {
    this.live = await this.client.createSession(req);
    return this.view();
  }

  async refresh(): Promise<WalkView> {
    this.live = await this.client.getSession(this.session.sessionId);
    return this.view();
  }

  /**
   * Commit one observation at the session's current revision. A stale
   * revision is surfaced as a conflict notice after a resync; it is never
   * retried behind the planner's back.
   */
  async advance(
    link: string,
    outcome: Outcome,
    weights?: WeightOverride,
  ): Promise<WalkView | ConflictNotice> {
    const req: AdvanceRequest = {
      revision: this.session.revision,
      link,
      outcome,
      ...(weights ?? {}),
    };
    try {
      this.live = await this.client.advanceSession(this.session.sessionId, req);
    } catch (err) {
      if (err instanceof ConflictError) {
        await this.refresh();
        return { kind: "conflict", currentRevision: err.currentRevision, message: err.message };
      }
      throw err;
    }
    return this.view();
  }

  /**
   * Preview one candidate observation under both conditionalization
   * stances without committing anything: rebuild the walk so far in a
   * throwaway session per stance, advance it one extra leg, and read the
   * service's numbers off the throwaway. The live session is not touched,
   * so its revision cannot change.
   */
  async whatIf(
    link: string,
    outcome: Outcome,
    weights?: WeightOverride,
  ): Promise<WhatIfPreview[]> {
    const live = this.session;
    const previews: WhatIfPreview[] = [];
    for (const mode of ["upheld", "rejected"] as PocMode[]) {
      let ghost = await this.client.createSession({
        network: live.network,
        marginals: live.baseMarginals,
        dependency: live.dependency,
        utility: live.utility,
        pocMode: mode,
        wClear: weights?.wClear ?? live.wClear,
        wIncident: weights?.wIncident ?? live.wIncident,
        propagation: live.propagation,
      });
      for (const step of live.traversedLinks) {
        ghost = await this.client.advanceSession(ghost.sessionId, {
          revision: ghost.revision,
          link: step.link,
          outcome: step.outcome,
        });
      }
      ghost = await this.client.advanceSession(ghost.sessionId, {
        revision: ghost.revision,
        link,
        outcome,
        ...(weights ?? {}),
      });
      previews.push({
        mode,
        badges: new Map(Object.entries(ghost.marginals).map(([id, p]) => [id, fmt3(p)])),
        recommendedLinks: ghost.recommendation?.recommendedLinks ?? [],
        continuations: [...ghost.continuations],
        status: ghost.status,
      });
    }
    return previews;
  }

  view(): WalkView {
    const doc = this.session;
    return {
      sessionId: doc.sessionId,
      revision: doc.revision,
      status: doc.status,
      currentNode: doc.currentNode,
      continuations: [...doc.continuations],
      badges: new Map(Object.entries(doc.marginals).map(([id, p]) => [id, fmt3(p)])),
      recommendedLinks: doc.recommendation?.recommendedLinks ?? [],
      pocMode: doc.pocMode,
      wClear: doc.wClear,
      wIncident: doc.wIncident,
      logLines: doc.log.map(logLine),
    };
  }
}
