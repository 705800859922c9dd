// Wire types for the adaptation service protocol.

export interface FrameIn {
  payload: string; // Base64 image payload
  format: string; // png | jpeg | raw
  timestamp_s: number;
  frame_index: number;
}

export interface FrameBatchRequest {
  frames: FrameIn[];
}

export interface Animation {
  kind: string;
  enabled: boolean;
}

export interface Directive {
  background_color: string;
  animation: Animation;
  quote_category: string;
  message: string;
  shelf_category: string;
  soundtrack: string | null;
}

export interface Book {
  rank: number;
  title: string;
  author: string;
}

export interface FrameError {
  frame_index: number;
  code: string;
}

export interface AdaptationResponse {
  emotion: string;
  confidence: number;
  directive: Directive;
  books: Book[];
  quote: string;
  frame_errors: FrameError[];
}

export interface PreferencesPayload {
  overrides: Record<string, Record<string, string | boolean>>;
  animations_enabled: boolean;
  soundtrack_enabled: boolean;
}

export interface StatsEntry {
  label: string;
  count: number;
  proportion: number;
}

export interface StatsResponse {
  entries: StatsEntry[];
}

export const EMOTIONS = [
  "angry",
  "disgust",
  "fear",
  "happy",
  "sad",
  "surprise",
  "neutral",
] as const;

export type Emotion = (typeof EMOTIONS)[number];
