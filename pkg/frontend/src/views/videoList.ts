// Video view: sortable, searchable list of talks, each row with a
// coherence line over a three-row emotion barcode, plus the player.

import { clear, el, svg } from "../dom.js";
import { linearScale } from "../layout.js";
import { emotionColor } from "../palette.js";
import { BarcodeRun, VideoSummary } from "../types.js";

const ROW_W = 360;
const BAR_H = 10;
const LINE_H = 24;

export function barcodeSvg(
  summary: VideoSummary, width = ROW_W, barHeight = BAR_H, lineHeight = LINE_H,
): SVGSVGElement {
  const x = linearScale(0, summary.duration, 0, width);
  const height = lineHeight + 3 * barHeight;
  const root = svg("svg", {
    width, height, viewBox: `0 0 ${width} ${height}`, class: "barcode",
  });

  // Coherence line: higher = more coherent; gaps where undefined.
  const yLine = linearScale(0, 2, lineHeight - 2, 2);
  let path = "";
  let pen = false;
  for (const point of summary.coherenceLine) {
    const seg = summary.barcode.text[point.segmentId];
    if (point.degree === null || !seg) {
      pen = false;
      continue;
    }
    const cmd = pen ? "L" : "M";
    path += `${cmd} ${x(seg.start)} ${yLine(point.degree)} L ${x(seg.end)} ${yLine(point.degree)} `;
    pen = true;
  }
  root.appendChild(svg("path", {
    d: path.trim(), fill: "none", stroke: "#555", "stroke-width": 1.2,
    class: "coherence-line",
  }));

  const rows: ["face", "text", "audio"] = ["face", "text", "audio"];
  rows.forEach((channel, i) => {
    const y = lineHeight + i * barHeight;
    for (const run of summary.barcode[channel]) {
      root.appendChild(rect(run, x, y, barHeight - 1, channel));
    }
  });
  return root;
}

function rect(
  run: BarcodeRun, x: (v: number) => number, y: number, h: number, channel: string,
): SVGRectElement {
  return svg("rect", {
    x: x(run.start),
    y,
    width: Math.max(0.5, x(run.end) - x(run.start)),
    height: h,
    fill: emotionColor(run.category),
    class: `run run-${channel}${run.category === null ? " undetected" : ""}`,
  });
}

export class VideoListView {
  readonly root: HTMLElement;
  private listEl: HTMLElement;
  private sortEl: HTMLSelectElement;
  private searchEl: HTMLInputElement;

  constructor(
    private onPick: (videoId: string) => void,
    private onQuery: (sort: string, q: string) => void,
  ) {
    this.root = el("div", { class: "video-list view" });
    const controls = el("div", { class: "controls" });
    this.sortEl = el("select", { class: "sort" });
    for (const [value, label] of [
      ["title", "title"],
      ["coherence", "coherence"],
      ["diversity", "diversity"],
      ["percentage:text:happiness", "% happy text"],
      ["percentage:face:neutral", "% neutral face"],
    ]) {
      this.sortEl.appendChild(el("option", { value }, label));
    }
    this.searchEl = el("input", { class: "search", placeholder: "search talks" });
    const fire = () => this.onQuery(this.sortEl.value, this.searchEl.value);
    this.sortEl.addEventListener("change", fire);
    this.searchEl.addEventListener("input", fire);
    controls.append(this.sortEl, this.searchEl);
    this.listEl = el("div", { class: "rows" });
    this.root.append(legend(), controls, this.listEl);
  }

  render(summaries: VideoSummary[], selected: string | null): void {
    clear(this.listEl);
    for (const summary of summaries) {
      const row = el("div", {
        class: `video-row${summary.videoId === selected ? " selected" : ""}`,
        "data-video": summary.videoId,
      });
      const name = el("div", { class: "name" });
      name.append(
        el("span", { class: "title" }, summary.title),
        el("span", { class: "category" }, summary.category),
        el("span", { class: "metrics" },
          `coherence ${fmt(summary.metrics.coherenceScore)} · diversity ${summary.metrics.diversity}`),
      );
      row.append(name, barcodeSvg(summary));
      row.addEventListener("click", () => this.onPick(summary.videoId));
      this.listEl.appendChild(row);
    }
  }
}

function fmt(v: number | null): string {
  return v === null ? "–" : v.toFixed(2);
}

function legend(): HTMLElement {
  const box = el("div", { class: "legend" });
  for (const category of [
    "anger", "contempt", "disgust", "fear",
    "happiness", "neutral", "sadness", "surprise",
  ] as const) {
    const item = el("span", { class: "legend-item" });
    const chip = el("span", { class: "chip" });
    chip.style.backgroundColor = emotionColor(category);
    item.append(chip, document.createTextNode(category));
    box.appendChild(item);
  }
  return box;
}
