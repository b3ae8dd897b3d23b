// Media playback with clamped seeking and the three playback speeds.

import { clear, el } from "../dom.js";

export const PLAYBACK_RATES = [0.5, 1, 2] as const;

export class PlayerView {
  readonly root: HTMLElement;
  private media: HTMLAudioElement | null = null;
  private knownDuration = 0;

  constructor() {
    this.root = el("div", { class: "player view" });
  }

  load(mediaUrl: string | null, duration: number): void {
    clear(this.root);
    this.knownDuration = duration;
    if (mediaUrl === null) {
      this.media = null;
      this.root.appendChild(el("div", { class: "no-media" }, "no media for this talk"));
      return;
    }
    this.media = el("audio", { controls: "", src: mediaUrl, preload: "metadata" });
    this.root.appendChild(this.media);
    const speeds = el("div", { class: "speeds" });
    for (const rate of PLAYBACK_RATES) {
      const button = el("button", { "data-rate": String(rate) }, `${rate}×`);
      button.addEventListener("click", () => this.setRate(rate));
      speeds.appendChild(button);
    }
    this.root.appendChild(speeds);
  }

  get duration(): number {
    const native = this.media?.duration;
    return native && isFinite(native) && native > 0 ? native : this.knownDuration;
  }

  /** Position the player at `time`, clamped to [0, duration]; the
   * paused/playing state is left untouched. */
  seek(time: number): number {
    const target = Math.min(Math.max(time, 0), this.duration);
    if (this.media) {
      this.media.currentTime = target;
    }
    return target;
  }

  get currentTime(): number {
    return this.media?.currentTime ?? 0;
  }

  get paused(): boolean {
    return this.media?.paused ?? true;
  }

  setRate(rate: number): void {
    if (this.media) {
      this.media.playbackRate = rate;
    }
  }
}
