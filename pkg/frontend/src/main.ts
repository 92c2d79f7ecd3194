/**
 * App bootstrap: clip queue, labeling canvas, toolbar, preview player.
 *
 * The service base URL defaults to same-origin and can be overridden with
 * ?api=http://host:port for the dev setup where the static files and the
 * label service run on different ports.
 */
import { ApiError, ClipInfo, LabelApi } from "./api.js";
import { CanvasSession, Tool } from "./session.js";
import { drawBackground, drawOverlay, drawWaveform, LABEL_COLORS } from "./render.js";
import { computePeaks, decodeWav } from "./wav.js";

const params = new URLSearchParams(location.search);
const API_BASE = params.get("api") ?? "";
const CLIENT_ID = `ui-${Math.random().toString(36).slice(2, 10)}`;

const api = new LabelApi(API_BASE, CLIENT_ID);

const el = <T extends HTMLElement>(id: string): T => document.getElementById(id) as T;

const clipList = el<HTMLUListElement>("clip-list");
const banner = el<HTMLDivElement>("banner");
const background = el<HTMLCanvasElement>("background");
const overlay = el<HTMLCanvasElement>("overlay");
const waveform = el<HTMLCanvasElement>("waveform");
const scoresBox = el<HTMLDivElement>("scores");

let session: CanvasSession | null = null;
let polygonPoints: Array<{ x: number; y: number }> = [];
let audio: HTMLAudioElement | null = null;
let audioUrl: string | null = null;

function notify(text: string, kind: "info" | "error" = "info"): void {
  banner.textContent = text;
  banner.className = kind;
  if (text) setTimeout(() => (banner.textContent = ""), 4000);
}

function repaintOverlay(): void {
  if (!session) return;
  drawOverlay(overlay, session.layer, session.overlayOpacity);
}

async function refreshClips(): Promise<void> {
  const clips = await api.listClips();
  clipList.replaceChildren();
  const queue = clips.filter((c) => c.status !== "accepted" && c.status !== "rejected");
  const done = clips.filter((c) => c.status === "accepted" || c.status === "rejected");
  for (const clip of [...queue, ...done]) {
    const item = document.createElement("li");
    item.textContent = `${clip.id} [${clip.status}] ${clip.duration_s.toFixed(2)}s`;
    item.className = clip.status;
    if (clip.status !== "accepted" && clip.status !== "rejected") {
      item.onclick = () => void openClip(clip);
    }
    clipList.appendChild(item);
  }
}

async function openClip(clip: ClipInfo): Promise<void> {
  session = await CanvasSession.open(api, clip.id);
  el<HTMLSpanElement>("current-clip").textContent = clip.id;
  drawBackground(background, session.image);
  repaintOverlay();
  drawWaveform(waveform, [], null);
  scoresBox.textContent = "";
}

function canvasPoint(event: MouseEvent): { x: number; y: number } {
  const rect = overlay.getBoundingClientRect();
  return {
    x: ((event.clientX - rect.left) / rect.width) * overlay.width,
    y: ((event.clientY - rect.top) / rect.height) * overlay.height,
  };
}

let stroking = false;
let strokePoints: Array<{ x: number; y: number }> = [];

overlay.addEventListener("mousedown", (event) => {
  if (!session) return;
  const point = canvasPoint(event);
  if (session.tool === "polygon") {
    polygonPoints.push(point);
    notify(`polygon: ${polygonPoints.length} points (double-click to close)`);
    return;
  }
  stroking = true;
  strokePoints = [point];
});

overlay.addEventListener("mousemove", (event) => {
  if (!session || !stroking) return;
  strokePoints.push(canvasPoint(event));
});

overlay.addEventListener("mouseup", () => {
  if (!session || !stroking) return;
  stroking = false;
  session.paintStroke({ points: strokePoints, radius: session.brushRadius });
  strokePoints = [];
  repaintOverlay();
});

overlay.addEventListener("dblclick", () => {
  if (!session || session.tool !== "polygon" || polygonPoints.length < 3) return;
  session.paintPolygon({ vertices: polygonPoints });
  polygonPoints = [];
  repaintOverlay();
});

document.addEventListener("keydown", (event) => {
  if (!session) return;
  if ((event.ctrlKey || event.metaKey) && event.key === "z") {
    if (event.shiftKey) session.redo();
    else session.undo();
    repaintOverlay();
  }
});

function bindToolbar(): void {
  for (const tool of ["brush", "polygon", "eraser"] as Tool[]) {
    el<HTMLButtonElement>(`tool-${tool}`).onclick = () => {
      if (session) session.tool = tool;
      polygonPoints = [];
      notify(`tool: ${tool}`);
    };
  }
  el<HTMLInputElement>("brush-radius").oninput = (e) => {
    if (session) session.brushRadius = Number((e.target as HTMLInputElement).value);
  };
  el<HTMLInputElement>("opacity").oninput = (e) => {
    if (session) {
      session.overlayOpacity = Number((e.target as HTMLInputElement).value) / 100;
      repaintOverlay();
    }
  };
  const labelPicker = el<HTMLSelectElement>("active-label");
  for (let k = 1; k <= LABEL_COLORS.length; k++) {
    const option = document.createElement("option");
    option.value = String(k);
    option.textContent = `label ${k}`;
    labelPicker.appendChild(option);
  }
  labelPicker.onchange = () => {
    if (session) session.activeLabel = Number(labelPicker.value);
  };

  el<HTMLButtonElement>("undo").onclick = () => {
    session?.undo();
    repaintOverlay();
  };
  el<HTMLButtonElement>("redo").onclick = () => {
    session?.redo();
    repaintOverlay();
  };

  el<HTMLButtonElement>("save").onclick = () => void guard(saveMask);
  el<HTMLButtonElement>("preview").onclick = () => void guard(playPreview);
  el<HTMLButtonElement>("accept").onclick = () => void guard(acceptClip);
  el<HTMLButtonElement>("reject").onclick = () => void guard(rejectClip);
}

async function guard(action: () => Promise<void>): Promise<void> {
  try {
    await action();
  } catch (err) {
    if (err instanceof ApiError && err.isLocked) {
      notify("clip locked by another labeler", "error");
    } else {
      notify(String(err), "error");
    }
  }
}

async function saveMask(): Promise<void> {
  if (!session) return;
  await session.save(api);
  repaintOverlay();
  notify("mask saved");
  await refreshClips();
}

async function playPreview(): Promise<void> {
  if (!session) return;
  const bytes = await session.preview(api);
  const wav = decodeWav(bytes);
  const peaks = computePeaks(wav.samples, waveform.width);
  if (audioUrl) URL.revokeObjectURL(audioUrl);
  audioUrl = URL.createObjectURL(new Blob([bytes as BlobPart], { type: "audio/wav" }));
  audio = new Audio(audioUrl);
  const redraw = () => {
    if (!audio) return;
    drawWaveform(waveform, peaks, audio.duration ? audio.currentTime / audio.duration : null);
    if (!audio.paused) requestAnimationFrame(redraw);
  };
  audio.onplay = redraw;
  audio.onended = () => drawWaveform(waveform, peaks, null);
  drawWaveform(waveform, peaks, null);
  await audio.play();
}

async function acceptClip(): Promise<void> {
  if (!session) return;
  await api.accept(session.clipId);
  notify(`accepted ${session.clipId}`);
  session = null;
  await refreshClips();
}

async function rejectClip(): Promise<void> {
  if (!session) return;
  await api.reject(session.clipId);
  notify(`rejected ${session.clipId}`);
  session = null;
  await refreshClips();
}

bindToolbar();
void guard(refreshClips);
