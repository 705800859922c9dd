import type { AdaptationResponse, Directive } from "../src/types.js";

export function hexToRgb(hex: string): string {
  const r = parseInt(hex.slice(1, 3), 16);
  const g = parseInt(hex.slice(3, 5), 16);
  const b = parseInt(hex.slice(5, 7), 16);
  return `rgb(${r}, ${g}, ${b})`;
}

export function mkDirective(partial: Partial<Directive> = {}): Directive {
  return {
    background_color: "gray",
    animation: { kind: "neutral-emoji-rain", enabled: true },
    quote_category: "balance",
    message: "balance is key",
    shelf_category: "feel-good-neutral",
    soundtrack: null,
    ...partial,
  };
}

export function mkResponse(
  emotion: string,
  directive: Partial<Directive> = {},
  extra: Partial<AdaptationResponse> = {}
): AdaptationResponse {
  return {
    emotion,
    confidence: 0.9,
    directive: mkDirective(directive),
    books: [],
    quote: "",
    frame_errors: [],
    ...extra,
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
