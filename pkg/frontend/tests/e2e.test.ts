// @vitest-environment jsdom
//
// End-to-end round trip against a live local service instance. The service
// is started as a child process with a classifier biased toward "sad" so a
// synthetic face frame deterministically yields a sad directive. Skipped
// when the backend package is not importable in this environment.
import { type ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { applyDirective, initialState } from "../src/directive.js";
import { emptyForm, setOverride, toPayload } from "../src/form.js";
import { render } from "../src/render.js";
import { hexToRgb } from "./helpers.js";

const PYTHON = "python3";

function backendAvailable(): boolean {
  try {
    execFileSync(PYTHON, ["-c", "import emoadapt"], { stdio: "ignore" });
    return true;
  } catch {
    return false;
  }
}

// Writes a sad-biased model to argv[1] and prints a Base64 PNG of a frame
// containing the bright-over-dark band pattern the bundled detector accepts.
const SETUP_SCRIPT = `
import sys
import numpy as np
from emoadapt.emotion import DEFAULT_ARCH, EMOTIONS, ClassifierModel, save_model
from emoadapt.imaging import RgbFrame, encode_frame
b2 = np.zeros(7, np.float32)
b2[EMOTIONS.index("sad")] = 5.0
model = ClassifierModel(
    DEFAULT_ARCH,
    (
        np.zeros((2304, 64), np.float32),
        np.zeros(64, np.float32),
        np.zeros((64, 7), np.float32),
        b2,
    ),
)
save_model(model, sys.argv[1])
img = np.full((64, 64), 128, np.uint8)
img[12:24, 10:34] = 200
img[24:36, 10:34] = 50
rgb = np.repeat(img[:, :, None], 3, axis=2)
print(encode_frame(RgbFrame(64, 64, rgb, 0, 0.0), "png"))
`;

const available = backendAvailable();
const PORT = 8900 + (process.pid % 100);
const BASE = `http://127.0.0.1:${PORT}`;

describe.skipIf(!available)("customization round-trip against a live service", () => {
  let child: ChildProcess;
  let workDir: string;
  let framePayload: string;

  beforeAll(async () => {
    workDir = mkdtempSync(join(tmpdir(), "emoadapt-e2e-"));
    const modelPath = join(workDir, "sad_model.f2fm");
    framePayload = execFileSync(PYTHON, ["-c", SETUP_SCRIPT, modelPath], {
      encoding: "utf-8",
    }).trim();

    child = spawn(
      PYTHON,
      [
        "-m",
        "emoadapt.cli",
        "serve",
        "--host",
        "127.0.0.1",
        "--port",
        String(PORT),
        "--model",
        modelPath,
        "--store-dir",
        join(workDir, "store"),
      ],
      { stdio: "ignore" }
    );

    // wait for the server to accept connections (404 on a bogus session = up)
    const deadline = Date.now() + 45_000;
    for (;;) {
      try {
        const resp = await fetch(`${BASE}/sessions/zzz/adaptation`);
        if (resp.status === 404) break;
      } catch {
        // not listening yet
      }
      if (Date.now() > deadline) throw new Error("service did not start in time");
      await new Promise((r) => setTimeout(r, 250));
    }
  });

  afterAll(() => {
    child?.kill("SIGTERM");
    rmSync(workDir, { recursive: true, force: true });
  });

  it("green-for-sad override set in the form renders green end-to-end", async () => {
    const api = new ApiClient(BASE);
    const { session_id } = await api.createSession();

    // build the override exactly as the form does and push it to the service
    const form = setOverride(emptyForm(), "sad", "background_color", "green");
    await api.updatePreferences(session_id, toPayload(form));

    // a batch of face frames classified sad by the biased model
    const frames = [0, 1, 2].map((i) => ({
      payload: framePayload,
      format: "png",
      timestamp_s: i * 0.1,
      frame_index: i,
    }));
    const response = await api.submitFrames(session_id, { frames });
    expect(response.frame_errors).toEqual([]);
    expect(response.emotion).toBe("sad");
    expect(response.directive.background_color).toBe("green");

    // the next directive fetch carries the override too
    const next = await api.getAdaptation(session_id);
    expect(next.directive.background_color).toBe("green");

    // and it renders green in the page
    const root = document.createElement("div");
    document.body.appendChild(root);
    render(root, applyDirective(initialState(), next), { rainSeed: 3 });
    expect(root.style.backgroundColor).toBe(hexToRgb("#4caf50"));
    expect(root.dataset.emotion).toBe("sad");
  });

  it("leaves other emotions on their default colors", async () => {
    const api = new ApiClient(BASE);
    const { session_id } = await api.createSession();
    const form = setOverride(emptyForm(), "sad", "background_color", "green");
    await api.updatePreferences(session_id, toPayload(form));
    // no frames submitted: session is neutral, so the default gray applies
    const resp = await api.getAdaptation(session_id);
    expect(resp.emotion).toBe("neutral");
    expect(resp.directive.background_color).toBe("gray");
  });
});
