import type { ApiClient } from "./api.js";
import type { AdaptationResponse, FrameIn } from "./types.js";

export interface CaptureConfig {
  samplingIntervalS: number; // default 0.1 (10 fps; browsers cannot sustain 100)
  batchDurationS: number; // default 10
  maxRetries: number;
  retryBaseMs: number;
}

export const DEFAULT_CAPTURE: CaptureConfig = {
  samplingIntervalS: 0.1,
  batchDurationS: 10,
  maxRetries: 3,
  retryBaseMs: 500,
};

// Grabs one frame from the camera as a Base64 payload.
export type FrameSource = () => { payload: string; format: string };
export type Sleep = (ms: number) => Promise<void>;

const realSleep: Sleep = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

/**
 * Samples frames at a fixed interval, batches them per batch duration and
 * posts each batch to the service. No frame leaves the device before
 * `grantConsent()` is called; frame_index is strictly increasing across the
 * whole session and preserved across retries.
 */
export class CaptureLoop {
  private consented = false;
  private running = false;
  private nextIndex = 0;
  private elapsedS = 0;
  private pending: FrameIn[] = [];

  onResponse: (r: AdaptationResponse) => void = () => {};
  onNetworkError: (err: unknown) => void = () => {};

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private source: FrameSource,
    private config: CaptureConfig = DEFAULT_CAPTURE,
    private sleep: Sleep = realSleep
  ) {
    if (config.samplingIntervalS <= 0) throw new Error("sampling interval must be > 0");
    if (config.batchDurationS < config.samplingIntervalS)
      throw new Error("batch duration must be >= sampling interval");
  }

  get hasConsent(): boolean {
    return this.consented;
  }

  grantConsent(): void {
    this.consented = true;
  }

  revokeConsent(): void {
    this.consented = false;
  }

  framesPerBatch(): number {
    return Math.floor(this.config.batchDurationS / this.config.samplingIntervalS);
  }

  /** Sample one frame into the current batch; posts when the batch fills. */
  async tick(): Promise<void> {
    if (!this.consented) return; // consent gate: no capture, no traffic
    const frame = this.source();
    this.pending.push({
      payload: frame.payload,
      format: frame.format,
      timestamp_s: this.elapsedS,
      frame_index: this.nextIndex,
    });
    this.nextIndex += 1;
    this.elapsedS += this.config.samplingIntervalS;
    if (this.pending.length >= this.framesPerBatch()) {
      await this.flush();
    }
  }

  /** Post the pending batch, retrying with backoff; frames keep their indices. */
  async flush(): Promise<void> {
    if (!this.consented || this.pending.length === 0) return;
    const batch = this.pending;
    this.pending = [];
    for (let attempt = 0; ; attempt++) {
      try {
        const response = await this.api.submitFrames(this.sessionId, { frames: batch });
        this.onResponse(response);
        return;
      } catch (err) {
        if (attempt >= this.config.maxRetries) {
          this.onNetworkError(err);
          return;
        }
        await this.sleep(this.config.retryBaseMs * 2 ** attempt);
      }
    }
  }

  async run(): Promise<void> {
    this.running = true;
    while (this.running) {
      await this.tick();
      await this.sleep(this.config.samplingIntervalS * 1000);
    }
  }

  stop(): void {
    this.running = false;
  }
}
