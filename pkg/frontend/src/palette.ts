// The single shared color encoding: every view keys emotion colors off
// this constant, so the legend is authoritative everywhere.

import { Category } from "./types.js";

export const EMOTION_COLORS: Record<Category, string> = {
  anger: "#e45756",
  contempt: "#b279a2",
  disgust: "#54a24b",
  fear: "#8067b7",
  happiness: "#f5c542",
  neutral: "#b8b8b8",
  sadness: "#4c78a8",
  surprise: "#f58518",
};

export const UNDETECTED_COLOR = "#e8e8e8";
export const HIGHLIGHT_COLOR = "#d62829";

export function emotionColor(category: Category | null): string {
  return category === null ? UNDETECTED_COLOR : EMOTION_COLORS[category];
}

/** Light-to-dark ramp encoding time order for glyph centers. */
export function timeColor(index: number, count: number): string {
  const t = count <= 1 ? 1 : index / (count - 1);
  const from = [222, 235, 247];
  const to = [8, 81, 156];
  const rgb = from.map((f, i) => Math.round(f + (to[i] - f) * t));
  return `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
}
