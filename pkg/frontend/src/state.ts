// Single view state shared by all five views.  Every selection action
// is serializable to one service selection query, which keeps the
// views consistent: they all render from the same resolved id set.

import { Category, Channel } from "./types.js";

export type Selector =
  | { kind: "link"; stage: "face-text" | "text-audio"; from: Category; to: Category }
  | { kind: "node"; channel: Channel; category: Category }
  | { kind: "segment"; segmentId: number }
  | { kind: "brush"; x0: number; y0: number; x1: number; y1: number };

export interface ViewState {
  videoId: string | null;
  selection: Selector | null;
  highlighted: number[]; // resolved sentence ids, straight from the service
  selectedSentence: number | null;
  barcodeZoom: { scale: number; offset: number };
  confidenceHint: { on: boolean; channel: Channel };
  wordSort: string;
  wordQuery: string;
  hideUndetected: boolean;
  projectionSeed: number;
  projectionMode: "concat" | "literal3";
  playbackRate: 0.5 | 1 | 2;
}

export function initialState(): ViewState {
  return {
    videoId: null,
    selection: null,
    highlighted: [],
    selectedSentence: null,
    barcodeZoom: { scale: 1, offset: 0 },
    confidenceHint: { on: false, channel: "face" },
    wordSort: "frequency",
    wordQuery: "",
    hideUndetected: false,
    projectionSeed: 0,
    projectionMode: "concat",
    playbackRate: 1,
  };
}

/** Serialize a selector to the POST /videos/{id}/selection body. */
export function selectionQueryBody(
  selector: Selector,
  projection?: { mode: string; seed: number },
): Record<string, unknown> {
  switch (selector.kind) {
    case "link":
      return { link: { stage: selector.stage, from: selector.from, to: selector.to } };
    case "node":
      return { node: { channel: selector.channel, category: selector.category } };
    case "segment":
      return { segmentId: selector.segmentId };
    case "brush":
      return {
        brush: { x0: selector.x0, y0: selector.y0, x1: selector.x1, y1: selector.y1 },
        ...(projection ? { projection } : {}),
      };
  }
}

export type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState = initialState();
  private listeners: Listener[] = [];

  get(): ViewState {
    return this.state;
  }

  update(partial: Partial<ViewState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }
}
