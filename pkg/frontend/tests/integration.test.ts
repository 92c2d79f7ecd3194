/**
 * End-to-end checks against the real label service: the painted label matrix
 * must survive PUT -> GET pixel-identically, previews must stream playable
 * WAV, and accepting must retire the clip from the labeling queue.
 */
import { describe, expect, it } from "vitest";

import { LabelApi } from "../src/api.js";
import { CanvasSession } from "../src/session.js";
import { decodeGrayPng } from "../src/png.js";
import { decodeWav } from "../src/wav.js";
import { SERVICE_URL } from "./helpers.js";

const api = new LabelApi(SERVICE_URL, "integration-tester");

describe("live service round-trip", () => {
  it("lists the seeded clips", async () => {
    const clips = await api.listClips();
    const ids = clips.map((c) => c.id);
    expect(ids).toContain("clip_a");
    expect(ids).toContain("clip_b");
  });

  it("painted label matrix -> PUT -> GET decodes pixel-identical", async () => {
    const session = await CanvasSession.open(api, "clip_a");
    session.paintStroke({
      points: [
        { x: 4, y: 100 },
        { x: 9, y: 140 },
      ],
      radius: 3,
    });
    session.paintPolygon({
      vertices: [
        { x: 12, y: 200 },
        { x: 30, y: 205 },
        { x: 28, y: 260 },
        { x: 10, y: 255 },
      ],
    });
    const painted = session.layer.pixels();
    expect(painted.some((v) => v === 1)).toBe(true);

    await session.save(api);
    // the client mirrors while painting, so the server's symmetrization must
    // not change a single pixel
    expect(session.layer.equals(painted)).toBe(true);

    const stored = await decodeGrayPng(await api.getMask("clip_a"));
    expect(stored.height).toBe(session.layer.rows);
    expect(stored.width).toBe(session.layer.cols);
    expect(Array.from(stored.pixels)).toEqual(Array.from(painted));
  });

  it("preview playback fetches a valid WAV", async () => {
    const session = await CanvasSession.open(api, "clip_a");
    const bytes = await session.preview(api);
    const wav = decodeWav(bytes);
    expect(wav.sampleRate).toBe(8000);
    expect(wav.samples.length).toBe(2400);
    // masked preview carries signal, not silence
    expect(Math.max(...wav.samples.map(Math.abs))).toBeGreaterThan(0);
  });

  it("compare scores the stored mask against itself as perfect", async () => {
    const stored = await api.getMask("clip_a");
    const scores = await api.compare("clip_a", stored);
    expect(scores).toEqual({ f1: 1, iou: 1, dice: 1 });
  });

  it("accept removes the clip from the labeling queue", async () => {
    const session = await CanvasSession.open(api, "clip_b");
    session.paintStroke({ points: [{ x: 6, y: 80 }], radius: 4 });
    await session.save(api);
    await api.accept("clip_b");

    const clips = await api.listClips();
    const byId = new Map(clips.map((c) => [c.id, c.status]));
    expect(byId.get("clip_b")).toBe("accepted");
    const queue = clips.filter((c) => c.status !== "accepted" && c.status !== "rejected");
    expect(queue.map((c) => c.id)).not.toContain("clip_b");
  });
});
