import { EMOTIONS } from "./types.js";
import type { PreferencesPayload } from "./types.js";

// Fields a per-emotion override may set, mirroring the service contract.
export const OVERRIDE_FIELDS = [
  "background_color",
  "animation_kind",
  "animation_enabled",
  "quote_category",
  "message",
  "shelf_category",
  "soundtrack",
] as const;

export interface FormModel {
  overrides: Record<string, Record<string, string | boolean>>;
  animationsEnabled: boolean;
  soundtrackEnabled: boolean;
}

export function emptyForm(): FormModel {
  return { overrides: {}, animationsEnabled: true, soundtrackEnabled: true };
}

export function setOverride(
  form: FormModel,
  emotion: string,
  field: string,
  value: string | boolean
): FormModel {
  const overrides = { ...form.overrides };
  overrides[emotion] = { ...(overrides[emotion] ?? {}), [field]: value };
  return { ...form, overrides };
}

/** Per-field validation errors keyed "emotion.field"; empty map = valid. */
export function validateForm(form: FormModel): Record<string, string> {
  const errors: Record<string, string> = {};
  for (const [emotion, fields] of Object.entries(form.overrides)) {
    if (!(EMOTIONS as readonly string[]).includes(emotion)) {
      errors[emotion] = "unknown emotion";
      continue;
    }
    for (const [field, value] of Object.entries(fields)) {
      if (!(OVERRIDE_FIELDS as readonly string[]).includes(field)) {
        errors[`${emotion}.${field}`] = "unknown field";
      } else if (value === "") {
        errors[`${emotion}.${field}`] = "empty value";
      }
    }
  }
  return errors;
}

/** One-to-one mapping from form fields onto the preferences wire payload. */
export function toPayload(form: FormModel): PreferencesPayload {
  if (Object.keys(validateForm(form)).length > 0) {
    throw new Error("invalid form state");
  }
  return {
    overrides: form.overrides,
    animations_enabled: form.animationsEnabled,
    soundtrack_enabled: form.soundtrackEnabled,
  };
}

export function fromPayload(payload: PreferencesPayload): FormModel {
  return {
    overrides: payload.overrides,
    animationsEnabled: payload.animations_enabled,
    soundtrackEnabled: payload.soundtrack_enabled,
  };
}
