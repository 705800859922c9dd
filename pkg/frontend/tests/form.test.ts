// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import { emptyForm, fromPayload, setOverride, toPayload, validateForm } from "../src/form.js";

describe("customization form model", () => {
  it("accepts a valid green-for-sad override", () => {
    const form = setOverride(emptyForm(), "sad", "background_color", "green");
    expect(validateForm(form)).toEqual({});
    expect(toPayload(form)).toEqual({
      overrides: { sad: { background_color: "green" } },
      animations_enabled: true,
      soundtrack_enabled: true,
    });
  });

  it("rejects an unknown emotion", () => {
    const form = setOverride(emptyForm(), "joy", "background_color", "green");
    expect(validateForm(form)).toEqual({ joy: "unknown emotion" });
    expect(() => toPayload(form)).toThrow();
  });

  it("rejects an unknown field and an empty value, keyed per field", () => {
    let form = setOverride(emptyForm(), "sad", "font_size", "12");
    form = setOverride(form, "happy", "background_color", "");
    expect(validateForm(form)).toEqual({
      "sad.font_size": "unknown field",
      "happy.background_color": "empty value",
    });
  });

  it("setOverride does not mutate the previous form", () => {
    const base = emptyForm();
    const next = setOverride(base, "sad", "background_color", "green");
    expect(base.overrides).toEqual({});
    expect(next.overrides.sad.background_color).toBe("green");
  });

  it("round-trips through the wire payload", () => {
    let form = setOverride(emptyForm(), "angry", "animation_enabled", false);
    form = { ...form, animationsEnabled: false, soundtrackEnabled: false };
    expect(fromPayload(toPayload(form))).toEqual(form);
  });
});
