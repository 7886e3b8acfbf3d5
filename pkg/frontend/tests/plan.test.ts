import { describe, expect, it } from "vitest";

import { Client, ServiceError } from "../src/api.js";
import { fmt3 } from "../src/format.js";
import { buildPlanView, routeName } from "../src/plan.js";
import type { PlanResponse } from "../src/types.js";
import { fakeService } from "./fake.js";
import planError from "./fixtures/plan_error_empty.json";
import planBinary from "./fixtures/plan_binary.json";
import planFixture from "./fixtures/plan.json";

const plan = planFixture as unknown as PlanResponse;
const binary = planBinary as unknown as PlanResponse;

describe("route ranking view", () => {
  it("lists routes in descending expected utility with 0.430 on top", () => {
    const view = buildPlanView(plan);
    expect(view.rows.map((r) => r.name)).toEqual([
      "1-2-3-4-10",
      "1-2-9",
      "1-2-3-4-5-6-7-8",
    ]);
    expect(view.rows[0].expectedUtility).toBe("0.430");
    expect(view.rows[0].recommended).toBe(true);
    expect(view.rows.filter((r) => r.recommended).length).toBe(1);
  });

  it("highlights exactly the recommended route's links", () => {
    const view = buildPlanView(plan);
    expect([...view.highlight].sort()).toEqual([...plan.recommendedLinks].sort());
    expect(view.highlight.has("9")).toBe(false);
  });

  it("shows only numbers copied from the service response", () => {
    const view = buildPlanView(plan);
    for (const entry of plan.perRoute) {
      const row = view.rows.find((r) => r.name === routeName(entry.links));
      expect(row).toBeDefined();
      expect(row?.pSuccess).toBe(fmt3(entry.pSuccess));
      expect(row?.pFailure).toBe(fmt3(entry.pFailure));
      expect(row?.expectedUtility).toBe(fmt3(entry.expectedUtility));
    }
    for (const [linkId, p] of Object.entries(plan.marginals)) {
      expect(view.badges.get(linkId)).toBe(fmt3(p));
    }
    expect(view.badges.get("9")).toBe("0.306");
  });

  it("matches the committed snapshot of the reference table", () => {
    expect(buildPlanView(plan).rows).toMatchSnapshot();
  });

  it("ranks by success probability under binary utility", () => {
    const view = buildPlanView(binary);
    const successes = view.rows.map((r) => Number(r.pSuccess));
    const sorted = [...successes].sort((a, b) => b - a);
    expect(successes).toEqual(sorted);
    for (const row of view.rows) {
      expect(row.expectedUtility).toBe(row.pSuccess);
    }
    expect(view.rows[0].name).toBe("1-2-3-4-10");
  });

  it("surfaces an empty-marginals plan as a typed service error", async () => {
    const { fetchImpl } = fakeService(() => ({ status: 400, json: planError }));
    const client = new Client("http://svc", fetchImpl);
    const failure = await client
      .plan({ network: plan as never })
      .then(() => null)
      .catch((err: unknown) => err);
    expect(failure).toBeInstanceOf(ServiceError);
    expect((failure as ServiceError).status).toBe(400);
    expect((failure as ServiceError).code).toBe("invalid_input");
  });
});
