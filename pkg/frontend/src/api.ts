// Typed client for the analytics service.  Each view tag keeps one
// in-flight request; a newer request for the same tag cancels the
// older one, so stale responses never clobber fresh state.

import {
  ProjectionBody,
  SankeyModelBody,
  SelectionResponse,
  SentenceBody,
  VideoSummary,
  WordsBody,
} from "./types.js";
import { Selector, selectionQueryBody } from "./state.js";

export interface ApiLike {
  listVideos(sort: string, order: string | null, q: string): Promise<VideoSummary[]>;
  summary(videoId: string): Promise<VideoSummary>;
  sankey(videoId: string): Promise<SankeyModelBody>;
  projection(videoId: string, mode: string, seed: number): Promise<ProjectionBody>;
  sentence(videoId: string, segmentId: number): Promise<SentenceBody>;
  words(videoId: string, sort: string, q: string): Promise<WordsBody>;
  resolveSelection(videoId: string, selector: Selector): Promise<SelectionResponse>;
  mediaUrl(videoId: string): string;
}

export class ApiClient implements ApiLike {
  private inflight = new Map<string, AbortController>();

  constructor(private base: string = "") {}

  private async get<T>(tag: string, path: string): Promise<T> {
    this.inflight.get(tag)?.abort();
    const controller = new AbortController();
    this.inflight.set(tag, controller);
    const resp = await fetch(this.base + path, { signal: controller.signal });
    if (!resp.ok) {
      const body = await resp.json().catch(() => ({ message: resp.statusText }));
      throw new Error(`${path}: ${body.message ?? resp.statusText}`);
    }
    return resp.json() as Promise<T>;
  }

  listVideos(sort: string, order: string | null, q: string): Promise<VideoSummary[]> {
    const params = new URLSearchParams({ sort });
    if (order) params.set("order", order);
    if (q) params.set("q", q);
    return this.get("videos", `/videos?${params}`);
  }

  summary(videoId: string): Promise<VideoSummary> {
    return this.get("summary", `/videos/${videoId}`);
  }

  sankey(videoId: string): Promise<SankeyModelBody> {
    return this.get("sankey", `/videos/${videoId}/sankey`);
  }

  projection(videoId: string, mode: string, seed: number): Promise<ProjectionBody> {
    return this.get("projection", `/videos/${videoId}/projection?mode=${mode}&seed=${seed}`);
  }

  sentence(videoId: string, segmentId: number): Promise<SentenceBody> {
    return this.get("sentence", `/videos/${videoId}/sentences/${segmentId}`);
  }

  words(videoId: string, sort: string, q: string): Promise<WordsBody> {
    const params = new URLSearchParams({ sort });
    if (q) params.set("q", q);
    return this.get("words", `/videos/${videoId}/words?${params}`);
  }

  async resolveSelection(videoId: string, selector: Selector): Promise<SelectionResponse> {
    const resp = await fetch(`${this.base}/videos/${videoId}/selection`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(selectionQueryBody(selector)),
    });
    if (!resp.ok) {
      throw new Error(`selection failed: ${resp.status}`);
    }
    return resp.json() as Promise<SelectionResponse>;
  }

  mediaUrl(videoId: string): string {
    return `${this.base}/media/${videoId}`;
  }
}
