/** Page wiring: inputs on the left, plan and walk panels on the right. */

import { Client, ServiceError } from "./api.js";
import { fmtWeight } from "./format.js";
import { layoutNetwork } from "./layout.js";
import { buildPlanView } from "./plan.js";
import {
  clear,
  el,
  renderConflictToast,
  renderErrorBanner,
  renderLog,
  renderNetwork,
  renderPlanTable,
} from "./render.js";
import { WalkController, type WalkView } from "./session.js";
import type {
  DependencyDoc,
  NetworkDoc,
  Outcome,
  PlanRequest,
  PocMode,
  SessionCreateRequest,
  UtilityDoc,
} from "./types.js";

// editable request defaults for the bundled demonstration network
const DEMO_MARGINALS: Record<string, number> = {
  "1": 0.2, "2": 0.2, "3": 0.06, "4": 0.06, "5": 0.06,
  "6": 0.06, "7": 0.06, "8": 0.06, "9": 0.306, "10": 0.15,
};

function must<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function readNetwork(): NetworkDoc {
  return JSON.parse(must<HTMLTextAreaElement>("network-input").value) as NetworkDoc;
}

function readMarginals(): Record<string, number> {
  const text = must<HTMLTextAreaElement>("marginals-input").value.trim();
  return text === "" ? {} : (JSON.parse(text) as Record<string, number>);
}

function readDependency(): DependencyDoc {
  const text = must<HTMLTextAreaElement>("dependency-input").value.trim();
  if (text === "") return { kind: "independent", conditionals: [] };
  return JSON.parse(text) as DependencyDoc;
}

function readUtility(): UtilityDoc {
  const kind = must<HTMLSelectElement>("utility-kind").value as UtilityDoc["kind"];
  if (kind === "binary") return { kind, x_util: null };
  return { kind, x_util: Number(must<HTMLInputElement>("x-util").value) };
}

/** Sliders cover [0.1, 10] on a log scale; the input value is the exponent. */
function sliderWeight(id: string): number {
  return 10 ** Number(must<HTMLInputElement>(id).value);
}

function readPocMode(): PocMode {
  return must<HTMLInputElement>("poc-upheld").checked ? "upheld" : "rejected";
}

function banner(node: HTMLElement): void {
  const holder = must<HTMLDivElement>("banner-holder");
  clear(holder);
  holder.append(node);
}

function reportError(err: unknown): void {
  if (err instanceof ServiceError) banner(renderErrorBanner(err.code, err.message));
  else banner(renderErrorBanner("client_error", String(err)));
}

function main(): void {
  const controller = new WalkController(
    new Client(must<HTMLInputElement>("service-url").value),
  );
  let client = new Client(must<HTMLInputElement>("service-url").value);

  const refreshClient = () => {
    client = new Client(must<HTMLInputElement>("service-url").value);
  };
  must<HTMLInputElement>("service-url").addEventListener("change", refreshClient);

  // prefills; the page still works with both fields edited by hand
  must<HTMLTextAreaElement>("marginals-input").value = JSON.stringify(DEMO_MARGINALS, null, 1);
  fetch("./demo-network.json")
    .then((resp) => (resp.ok ? resp.text() : Promise.reject(new Error(String(resp.status)))))
    .then((text) => {
      must<HTMLTextAreaElement>("network-input").value = text;
    })
    .catch(() => {
      must<HTMLTextAreaElement>("network-input").placeholder =
        "paste a network document: {nodes, links, source, sink}";
    });

  for (const id of ["w-clear", "w-incident"] as const) {
    const show = () => {
      must<HTMLSpanElement>(`${id}-value`).textContent = fmtWeight(sliderWeight(id));
    };
    must<HTMLInputElement>(id).addEventListener("input", show);
    show();
  }

  must<HTMLButtonElement>("health-btn").addEventListener("click", async () => {
    try {
      const body = await client.health();
      must<HTMLSpanElement>("health-state").textContent = `service: ${body.status}`;
    } catch (err) {
      must<HTMLSpanElement>("health-state").textContent = "service: unreachable";
      reportError(err);
    }
  });

  must<HTMLButtonElement>("plan-btn").addEventListener("click", async () => {
    try {
      const req: PlanRequest = {
        network: readNetwork(),
        marginals: readMarginals(),
        dependency: readDependency(),
        utility: readUtility(),
      };
      const view = buildPlanView(await client.plan(req));
      const table = must<HTMLDivElement>("plan-table");
      clear(table);
      table.append(renderPlanTable(view.rows));
      const graph = must<HTMLDivElement>("plan-graph");
      clear(graph);
      const net = req.network;
      graph.append(
        renderNetwork(layoutNetwork(net), {
          source: net.source,
          sink: net.sink,
          highlight: view.highlight,
          badges: view.badges,
        }),
      );
      banner(el("div", { class: "banner ok" }, ["routes ranked; recommended route highlighted"]));
    } catch (err) {
      reportError(err);
    }
  });

  const paintWalk = (view: WalkView) => {
    const net = controller.session.network;
    must<HTMLSpanElement>("walk-state").textContent =
      `session ${view.sessionId} rev ${view.revision}: at node ${view.currentNode}` +
      (view.status === "complete" ? " (sink reached, walk complete)" : "");
    const graph = must<HTMLDivElement>("walk-graph");
    clear(graph);
    graph.append(
      renderNetwork(layoutNetwork(net), {
        source: net.source,
        sink: net.sink,
        highlight: new Set(view.recommendedLinks),
        badges: view.badges,
        currentNode: view.currentNode,
        traversed: new Set(controller.session.traversedLinks.map((t) => t.link)),
      }),
    );
    const choice = must<HTMLSelectElement>("obs-link");
    clear(choice);
    for (const linkId of view.continuations) {
      choice.append(el("option", { value: linkId }, [`link ${linkId}`]));
    }
    must<HTMLButtonElement>("advance-btn").disabled = view.status !== "open";
    must<HTMLButtonElement>("whatif-btn").disabled = view.status !== "open";
    const logHolder = must<HTMLDivElement>("walk-log");
    clear(logHolder);
    logHolder.append(renderLog(view.logLines));
  };

  must<HTMLButtonElement>("start-btn").addEventListener("click", async () => {
    try {
      const req: SessionCreateRequest = {
        network: readNetwork(),
        marginals: readMarginals(),
        dependency: readDependency(),
        utility: readUtility(),
        pocMode: readPocMode(),
        wClear: sliderWeight("w-clear"),
        wIncident: sliderWeight("w-incident"),
        propagation: must<HTMLSelectElement>("propagation").value as "adjacent" | "all-downstream",
      };
      paintWalk(await controller.start(req));
      banner(el("div", { class: "banner ok" }, ["session opened at the source node"]));
    } catch (err) {
      reportError(err);
    }
  });

  const observation = (): { link: string; outcome: Outcome } => ({
    link: must<HTMLSelectElement>("obs-link").value,
    outcome: must<HTMLInputElement>("obs-clear").checked ? "clear" : "incident",
  });

  must<HTMLButtonElement>("advance-btn").addEventListener("click", async () => {
    try {
      const { link, outcome } = observation();
      const result = await controller.advance(link, outcome, {
        wClear: sliderWeight("w-clear"),
        wIncident: sliderWeight("w-incident"),
      });
      if ("kind" in result) {
        banner(renderConflictToast(result.currentRevision, result.message));
        paintWalk(controller.view());
      } else {
        paintWalk(result);
      }
      clear(must<HTMLDivElement>("whatif-drawer"));
    } catch (err) {
      reportError(err);
    }
  });

  must<HTMLButtonElement>("whatif-btn").addEventListener("click", async () => {
    try {
      const { link, outcome } = observation();
      const previews = await controller.whatIf(link, outcome, {
        wClear: sliderWeight("w-clear"),
        wIncident: sliderWeight("w-incident"),
      });
      const liveBadges = controller.view().badges;
      const drawer = must<HTMLDivElement>("whatif-drawer");
      clear(drawer);
      drawer.append(el("h3", {}, [`what if: link ${link}, ${outcome} (not committed)`]));
      for (const preview of previews) {
        const rows = [...preview.badges.entries()].map(([id, badge]) =>
          el("tr", {}, [
            el("td", {}, [`link ${id}`]),
            el("td", { class: badge === liveBadges.get(id) ? "" : "changed" }, [badge]),
          ]),
        );
        drawer.append(
          el("div", { class: "whatif-card" }, [
            el("h4", {}, [`conditionalization ${preview.mode}`]),
            el("p", {}, [
              preview.status === "complete"
                ? "walk would be complete"
                : `next leg: ${preview.recommendedLinks.join("-") || "none"}`,
            ]),
            el("table", { class: "plan" }, rows),
          ]),
        );
      }
    } catch (err) {
      reportError(err);
    }
  });
}

document.addEventListener("DOMContentLoaded", main);
