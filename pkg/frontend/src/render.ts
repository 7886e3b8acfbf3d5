/** DOM and SVG painting. Pure construction; no service calls, no math. */

import type { Layout } from "./layout.js";
import type { PlanRow } from "./plan.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  for (const child of children) node.append(child);
  return node;
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

export interface NetworkRenderOptions {
  source: string;
  sink: string;
  highlight: Set<string>;
  badges: Map<string, string>;
  currentNode?: string;
  traversed?: Set<string>;
  onLinkClick?: (linkId: string) => void;
}

export function renderNetwork(layout: Layout, opts: NetworkRenderOptions): SVGSVGElement {
  const svg = svgEl("svg", {
    viewBox: `0 0 ${layout.width} ${layout.height}`,
    width: String(layout.width),
    height: String(layout.height),
    class: "network",
  }) as SVGSVGElement;

  for (const seg of layout.links) {
    const classes = ["link"];
    if (opts.highlight.has(seg.id)) classes.push("recommended");
    if (opts.traversed?.has(seg.id)) classes.push("traversed");
    const line = svgEl("line", {
      x1: String(seg.x1),
      y1: String(seg.y1),
      x2: String(seg.x2),
      y2: String(seg.y2),
      class: classes.join(" "),
      "data-link": seg.id,
    });
    if (opts.onLinkClick) {
      line.addEventListener("click", () => opts.onLinkClick?.(seg.id));
    }
    svg.append(line);

    const badge = opts.badges.get(seg.id);
    const label = badge === undefined ? seg.id : `${seg.id}: ${badge}`;
    const text = svgEl("text", {
      x: String(seg.midX),
      y: String(seg.midY - 6),
      class: "badge",
      "text-anchor": "middle",
      "data-link-badge": seg.id,
    });
    text.textContent = label;
    svg.append(text);
  }

  for (const [name, pos] of layout.nodes) {
    const classes = ["node"];
    if (name === opts.source) classes.push("source");
    if (name === opts.sink) classes.push("sink");
    if (name === opts.currentNode) classes.push("current");
    svg.append(
      svgEl("circle", {
        cx: String(pos.x),
        cy: String(pos.y),
        r: "14",
        class: classes.join(" "),
        "data-node": name,
      }),
    );
    const text = svgEl("text", {
      x: String(pos.x),
      y: String(pos.y + 4),
      class: "node-label",
      "text-anchor": "middle",
    });
    text.textContent = name;
    svg.append(text);
  }
  return svg;
}

export function renderPlanTable(rows: PlanRow[]): HTMLTableElement {
  const table = el("table", { class: "plan" });
  table.append(
    el("tr", {}, [
      el("th", {}, ["route"]),
      el("th", {}, ["p(success)"]),
      el("th", {}, ["p(failure)"]),
      el("th", {}, ["expected utility"]),
    ]),
  );
  for (const row of rows) {
    table.append(
      el("tr", { class: row.recommended ? "recommended" : "", "data-route": row.name }, [
        el("td", {}, [row.recommended ? `▶ ${row.name}` : row.name]),
        el("td", {}, [row.pSuccess]),
        el("td", {}, [row.pFailure]),
        el("td", {}, [row.expectedUtility]),
      ]),
    );
  }
  return table;
}

export function renderErrorBanner(code: string, message: string): HTMLElement {
  return el("div", { class: "banner error", role: "alert" }, [`${code}: ${message}`]);
}

export function renderConflictToast(currentRevision: number, message: string): HTMLElement {
  return el("div", { class: "banner conflict", role: "alert" }, [
    `someone advanced this session first (now at revision ${currentRevision}); ` +
      `the view has been refreshed. ${message}`,
  ]);
}

export function renderLog(lines: string[]): HTMLUListElement {
  const list = el("ul", { class: "log" });
  for (const line of lines) list.append(el("li", {}, [line]));
  return list;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}
