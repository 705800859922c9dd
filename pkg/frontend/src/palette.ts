// Single source of truth mapping rule-table color names to hex values.

export const PALETTE: Record<string, string> = {
  yellow: "#f7d633",
  "pale-blue": "#aec6e8",
  red: "#d94f4f",
  gray: "#9e9e9e",
  pink: "#f2a9c4",
  green: "#4caf50",
};

export function colorToHex(name: string): string {
  if (name.startsWith("#")) return name;
  return PALETTE[name] ?? name;
}
