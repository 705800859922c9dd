// Emoji-rain particle layer. Particle positions come from a seedable RNG so
// test-mode renders are deterministic.

export const RAIN_EMOJI: Record<string, string> = {
  "happy-emoji-rain": "😊",
  "sad-emoji-rain": "😢",
  "angry-emoji-rain": "😠",
  "neutral-emoji-rain": "🙂",
  "shock-emoji-rain": "😲",
};

export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface RainOptions {
  count?: number;
  seed?: number; // fixed seed => deterministic layout (test mode)
}

export function buildRainLayer(
  doc: Document,
  kind: string,
  { count = 24, seed }: RainOptions = {}
): HTMLElement {
  const layer = doc.createElement("div");
  layer.className = "emoji-rain";
  layer.dataset.kind = kind;
  const rng = seed === undefined ? Math.random : mulberry32(seed);
  const emoji = RAIN_EMOJI[kind] ?? "🙂";
  for (let i = 0; i < count; i++) {
    const drop = doc.createElement("span");
    drop.className = "emoji-drop";
    drop.textContent = emoji;
    drop.style.left = `${(rng() * 100).toFixed(2)}%`;
    drop.style.animationDelay = `${(rng() * 5).toFixed(2)}s`;
    drop.style.animationDuration = `${(3 + rng() * 4).toFixed(2)}s`;
    layer.appendChild(drop);
  }
  return layer;
}
