// Channel coherence view: augmented sankey over the three channel
// columns, with per-face-node treemaps, per-text-node term clouds and
// per-audio-node feature histograms.

import { clear, el, setIds, svg } from "../dom.js";
import { linearScale, ribbonPath, squarify, stackColumn } from "../layout.js";
import { emotionColor } from "../palette.js";
import { Selector } from "../state.js";
import { Category, HistogramBody, SankeyLinkBody, SankeyModelBody } from "../types.js";

const WIDTH = 760;
const HEIGHT = 360;
const NODE_W = 16;
const GAP = 8;
const FACE_X = 180;      // treemaps sit left of the face column
const TEXT_X = WIDTH / 2;
const AUDIO_X = WIDTH - 180;
const FEATURES = ["pitch", "intensity", "amplitude"];

interface NodeGeom {
  category: Category;
  y: number;
  height: number;
}

export class SankeyView {
  readonly root: HTMLElement;
  private featureEl: HTMLSelectElement;
  private model: SankeyModelBody | null = null;

  constructor(private onSelect: (selector: Selector) => void) {
    this.root = el("div", { class: "sankey view" });
    this.featureEl = el("select", { class: "feature" });
    for (const feature of FEATURES) {
      this.featureEl.appendChild(el("option", { value: feature }, feature));
    }
    this.featureEl.addEventListener("change", () => {
      if (this.model) {
        this.render(this.model);
      }
    });
  }

  render(model: SankeyModelBody): void {
    this.model = model;
    clear(this.root);
    const head = el("div", { class: "controls" });
    head.append(el("span", {}, "audio feature:"), this.featureEl);
    this.root.appendChild(head);

    const scene = svg("svg", {
      width: WIDTH, height: HEIGHT, viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    });
    this.root.appendChild(scene);

    const columns: { x: number; channel: "face" | "text" | "audio" }[] = [
      { x: FACE_X, channel: "face" },
      { x: TEXT_X, channel: "text" },
      { x: AUDIO_X, channel: "audio" },
    ];
    const geom = new Map<string, NodeGeom>();
    for (const { x, channel } of columns) {
      const nodes = this.model.nodes[channel];
      const stacked = stackColumn(nodes.map((n) => n.totalDuration), HEIGHT - 20, GAP);
      nodes.forEach((node, i) => {
        const g: NodeGeom = { category: node.category, y: 10 + stacked[i].y, height: stacked[i].height };
        geom.set(`${channel}:${node.category}`, g);
        const rect = svg("rect", {
          x: x - NODE_W / 2, y: g.y, width: NODE_W, height: Math.max(1, g.height),
          fill: emotionColor(node.category),
          class: "sankey-node",
          "data-kind": "node", "data-channel": channel, "data-category": node.category,
        });
        setIds(rect, node.sentenceIds);
        rect.addEventListener("click", () =>
          this.onSelect({ kind: "node", channel, category: node.category }));
        scene.appendChild(rect);
        scene.appendChild(svg("text", {
          x, y: g.y - 2, "text-anchor": "middle", class: "node-label",
        })).textContent = node.category;
      });
    }

    this.drawLinks(scene, geom, this.model.links.faceText, "face-text",
      FACE_X + NODE_W / 2, TEXT_X - NODE_W / 2, "face", "text");
    this.drawLinks(scene, geom, this.model.links.textAudio, "text-audio",
      TEXT_X + NODE_W / 2, AUDIO_X - NODE_W / 2, "text", "audio");

    this.drawTreemaps(scene, geom);
    this.drawTerms(scene, geom);
    this.drawHistograms(scene, geom);
  }

  private drawLinks(
    scene: SVGSVGElement,
    geom: Map<string, NodeGeom>,
    links: SankeyLinkBody[],
    stage: "face-text" | "text-audio",
    x0: number,
    x1: number,
    fromChannel: string,
    toChannel: string,
  ): void {
    // Stack link anchors inside each node, in link order.
    const sourceOffset = new Map<string, number>();
    const targetOffset = new Map<string, number>();
    for (const link of links) {
      const source = geom.get(`${fromChannel}:${link.from}`)!;
      const target = geom.get(`${toChannel}:${link.to}`)!;
      const sourceNode = this.model!.nodes[fromChannel as "face"].find(
        (n) => n.category === link.from)!;
      const targetNode = this.model!.nodes[toChannel as "text"].find(
        (n) => n.category === link.to)!;
      const h0 = (link.totalDuration / sourceNode.totalDuration) * source.height;
      const h1 = (link.totalDuration / targetNode.totalDuration) * target.height;
      const o0 = sourceOffset.get(link.from) ?? 0;
      const o1 = targetOffset.get(link.to) ?? 0;
      sourceOffset.set(link.from, o0 + h0);
      targetOffset.set(link.to, o1 + h1);

      const path = svg("path", {
        d: ribbonPath(x0, source.y + o0, h0, x1, target.y + o1, h1),
        fill: emotionColor(link.from),
        class: "sankey-link",
        "data-kind": "link", "data-stage": stage,
        "data-from": link.from, "data-to": link.to,
        "data-duration": link.totalDuration,
      });
      setIds(path, link.sentenceIds);
      path.addEventListener("click", () =>
        this.onSelect({ kind: "link", stage, from: link.from, to: link.to }));
      path.addEventListener("mouseenter", () => this.hoverRelated(path, true));
      path.addEventListener("mouseleave", () => this.hoverRelated(path, false));
      scene.appendChild(path);
    }
  }

  /** Hovering a text→audio link also lights the face→text links that
   * share member sentences (and vice versa). */
  private hoverRelated(link: SVGPathElement, on: boolean): void {
    link.classList.toggle("hovered", on);
    const stage = link.getAttribute("data-stage");
    const other = stage === "text-audio" ? "face-text" : "text-audio";
    const ids = new Set(
      (link.getAttribute("data-sids") ?? "").split(",").filter(Boolean).map(Number));
    for (const candidate of this.root.querySelectorAll(
      `[data-kind="link"][data-stage="${other}"]`)) {
      const shared = (candidate.getAttribute("data-sids") ?? "")
        .split(",").filter(Boolean).map(Number).some((id) => ids.has(id));
      candidate.classList.toggle("related", on && shared);
    }
  }

  private drawTreemaps(scene: SVGSVGElement, geom: Map<string, NodeGeom>): void {
    for (const [category, cells] of Object.entries(this.model!.treemaps)) {
      const node = geom.get(`face:${category}`);
      if (!node || cells.length === 0) {
        continue;
      }
      const bounds = {
        x: FACE_X - NODE_W / 2 - 130, y: node.y,
        width: 120, height: Math.max(12, node.height),
      };
      const rects = squarify(cells.map((c) => c.faceCount), bounds);
      cells.forEach((cell, i) => {
        const r = rects[i];
        const rect = svg("rect", {
          x: r.x, y: r.y, width: r.width, height: r.height,
          fill: emotionColor(cell.link.to),
          "fill-opacity": 0.55,
          stroke: "#fff",
          class: "treemap-cell",
          "data-face-count": cell.faceCount,
          "data-frame-index": cell.representative.frameIndex,
        });
        rect.appendChild(svg("title")).textContent =
          `${cell.link.from}→${cell.link.to}: ${cell.faceCount} faces, ` +
          `representative @ ${cell.representative.timestamp.toFixed(2)}s`;
        scene.appendChild(rect);
      });
    }
  }

  private drawTerms(scene: SVGSVGElement, geom: Map<string, NodeGeom>): void {
    for (const [category, terms] of Object.entries(this.model!.terms)) {
      const node = geom.get(`text:${category}`);
      if (!node || terms.length === 0) {
        continue;
      }
      const top = terms.slice(0, 6);
      const maxWeight = top[0].weight;
      top.forEach((term, i) => {
        const label = svg("text", {
          x: TEXT_X + NODE_W, y: node.y + 10 + i * 12,
          class: "term",
          "font-size": 8 + 4 * (term.weight / maxWeight),
          "data-term": term.term,
        });
        label.textContent = term.term;
        scene.appendChild(label);
      });
    }
  }

  private drawHistograms(scene: SVGSVGElement, geom: Map<string, NodeGeom>): void {
    const histograms = this.model!.histograms;
    if (histograms === null) {
      scene.appendChild(svg("text", {
        x: AUDIO_X + NODE_W, y: 20, class: "no-audio",
      })).textContent = "no audio";
      return;
    }
    for (const [category, byFeature] of Object.entries(histograms)) {
      const node = geom.get(`audio:${category}`);
      const histogram: HistogramBody | undefined = byFeature[this.featureEl.value];
      if (!node || !histogram || histogram.empty) {
        continue;
      }
      const w = 120;
      const h = Math.min(40, Math.max(14, node.height));
      const x = linearScale(0, histogram.counts.length, AUDIO_X + NODE_W, AUDIO_X + NODE_W + w);
      const peak = Math.max(...histogram.counts);
      const group = svg("g", { class: "histogram", "data-category": category });
      histogram.counts.forEach((count, i) => {
        group.appendChild(svg("rect", {
          x: x(i), y: node.y + h - (count / peak) * h,
          width: Math.max(1, x(i + 1) - x(i) - 0.5),
          height: (count / peak) * h,
          fill: emotionColor(category as Category),
        }));
      });
      scene.appendChild(group);
    }
  }
}
