// Browser entry point: camera capture, live adaptation, customization form
// and the emotion dashboard.

import { ApiClient } from "./api.js";
import { CaptureLoop, DEFAULT_CAPTURE } from "./capture.js";
import { applyDirective, applyStats, initialState } from "./directive.js";
import { renderDashboard } from "./dashboard.js";
import { emptyForm, setOverride, toPayload, validateForm } from "./form.js";
import { render } from "./render.js";

function captureFrame(video: HTMLVideoElement): { payload: string; format: string } {
  const canvas = document.createElement("canvas");
  canvas.width = video.videoWidth || 320;
  canvas.height = video.videoHeight || 240;
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");
  ctx.drawImage(video, 0, 0, canvas.width, canvas.height);
  const dataUrl = canvas.toDataURL("image/jpeg", 0.7);
  return { payload: dataUrl.split(",", 2)[1], format: "jpeg" };
}

async function start(): Promise<void> {
  const root = document.getElementById("app")!;
  const banner = document.getElementById("banner")!;
  const serverUrl =
    (document.getElementById("server-url") as HTMLInputElement | null)?.value ??
    "http://127.0.0.1:8765";

  const api = new ApiClient(serverUrl);
  const { session_id } = await api.createSession();
  let state = applyDirective(initialState(), await api.getAdaptation(session_id));
  render(root, state);

  const video = document.getElementById("camera") as HTMLVideoElement;
  const loop = new CaptureLoop(api, session_id, () => captureFrame(video), DEFAULT_CAPTURE);
  loop.onResponse = (resp) => {
    state = applyDirective(state, resp);
    render(root, state);
  };
  loop.onNetworkError = () => {
    banner.textContent = "connection lost, retrying…";
  };

  document.getElementById("consent")!.addEventListener("click", async () => {
    try {
      const stream = await navigator.mediaDevices.getUserMedia({ video: true });
      video.srcObject = stream;
      await video.play();
      loop.grantConsent();
      void loop.run();
    } catch {
      banner.textContent = "camera permission is required for emotion detection";
    }
  });

  // customization form
  let form = emptyForm();
  const formEl = document.getElementById("customize") as HTMLFormElement;
  formEl.addEventListener("change", (ev) => {
    const input = ev.target as HTMLInputElement;
    if (input.name === "animations_enabled") {
      form = { ...form, animationsEnabled: input.checked };
    } else if (input.dataset.emotion && input.dataset.field) {
      form = setOverride(form, input.dataset.emotion, input.dataset.field, input.value);
    }
  });
  formEl.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const errors = validateForm(form);
    if (Object.keys(errors).length > 0) {
      banner.textContent = Object.entries(errors)
        .map(([k, v]) => `${k}: ${v}`)
        .join("; ");
      return;
    }
    state = applyDirective(state, await api.updatePreferences(session_id, toPayload(form)));
    render(root, state);
  });

  // dashboard refresh
  document.getElementById("refresh-stats")!.addEventListener("click", async () => {
    const stats = await api.getStats(session_id);
    state = applyStats(state, stats.entries);
    renderDashboard(document.getElementById("dashboard")!, state.dashboard);
  });
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  void start();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", () => void start());
}
