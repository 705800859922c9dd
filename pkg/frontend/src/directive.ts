import type { AdaptationResponse, Book, StatsEntry } from "./types.js";
import { colorToHex } from "./palette.js";

export interface UiState {
  backgroundHex: string;
  animationKind: string;
  animationRunning: boolean;
  quote: string;
  message: string;
  emotion: string;
  books: Book[];
  dashboard: StatsEntry[];
  lastResponseKey: string; // state diffing: identical responses do not re-render
}

export function initialState(): UiState {
  return {
    backgroundHex: colorToHex("gray"),
    animationKind: "neutral-emoji-rain",
    animationRunning: false,
    quote: "",
    message: "",
    emotion: "neutral",
    books: [],
    dashboard: [],
    lastResponseKey: "",
  };
}

function isValidResponse(r: unknown): r is AdaptationResponse {
  if (typeof r !== "object" || r === null) return false;
  const resp = r as Partial<AdaptationResponse>;
  return (
    typeof resp.emotion === "string" &&
    typeof resp.directive === "object" &&
    resp.directive !== null &&
    typeof resp.directive.background_color === "string" &&
    typeof resp.directive.animation === "object"
  );
}

/**
 * Pure reducer: fold an adaptation response into the UI state. A malformed
 * response leaves the previous state untouched; an identical response keeps
 * the same state object so renderers can skip re-painting.
 */
export function applyDirective(state: UiState, response: unknown): UiState {
  if (!isValidResponse(response)) {
    console.error("ignoring malformed adaptation response", response);
    return state;
  }
  const key = JSON.stringify(response);
  if (key === state.lastResponseKey) return state;
  const d = response.directive;
  return {
    ...state,
    backgroundHex: colorToHex(d.background_color),
    animationKind: d.animation.kind,
    animationRunning: d.animation.enabled,
    quote: response.quote,
    message: d.message,
    emotion: response.emotion,
    books: response.books,
    lastResponseKey: key,
  };
}

export function applyStats(state: UiState, entries: StatsEntry[]): UiState {
  return { ...state, dashboard: entries };
}
