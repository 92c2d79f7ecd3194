/**
 * Canvas compositing: grayscale background, colored label overlay, waveform
 * strip. The background buffer is written once and never mutated; overlay
 * changes only ever touch the overlay canvas.
 */
import { GrayImage } from "./png.js";
import { LabelLayer } from "./labelLayer.js";
import { Peak } from "./wav.js";

// label 1..8 -> RGBA fill
export const LABEL_COLORS: Array<[number, number, number]> = [
  [255, 196, 0],
  [80, 170, 255],
  [120, 220, 100],
  [230, 90, 200],
  [255, 120, 80],
  [140, 120, 255],
  [90, 220, 220],
  [250, 250, 120],
];

export function drawBackground(canvas: HTMLCanvasElement, image: GrayImage): void {
  canvas.width = image.width;
  canvas.height = image.height;
  const ctx = canvas.getContext("2d")!;
  const buf = ctx.createImageData(image.width, image.height);
  for (let i = 0; i < image.pixels.length; i++) {
    const v = image.pixels[i];
    buf.data[i * 4] = v;
    buf.data[i * 4 + 1] = v;
    buf.data[i * 4 + 2] = v;
    buf.data[i * 4 + 3] = 255;
  }
  ctx.putImageData(buf, 0, 0);
}

export function drawOverlay(canvas: HTMLCanvasElement, layer: LabelLayer, opacity: number): void {
  canvas.width = layer.cols;
  canvas.height = layer.rows;
  const ctx = canvas.getContext("2d")!;
  const buf = ctx.createImageData(layer.cols, layer.rows);
  const alpha = Math.round(255 * Math.min(1, Math.max(0, opacity)));
  for (let r = 0; r < layer.rows; r++) {
    for (let c = 0; c < layer.cols; c++) {
      const label = layer.get(r, c);
      if (label === 0) continue;
      const [red, green, blue] = LABEL_COLORS[(label - 1) % LABEL_COLORS.length];
      const i = (r * layer.cols + c) * 4;
      buf.data[i] = red;
      buf.data[i + 1] = green;
      buf.data[i + 2] = blue;
      buf.data[i + 3] = alpha;
    }
  }
  ctx.putImageData(buf, 0, 0);
}

export function drawWaveform(
  canvas: HTMLCanvasElement,
  peaks: Peak[],
  cursorFraction: number | null,
): void {
  const ctx = canvas.getContext("2d")!;
  const { width, height } = canvas;
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, width, height);
  ctx.strokeStyle = "#69c0ff";
  ctx.beginPath();
  const mid = height / 2;
  for (let x = 0; x < Math.min(width, peaks.length); x++) {
    const p = peaks[x];
    ctx.moveTo(x + 0.5, mid - p.max * mid);
    ctx.lineTo(x + 0.5, mid - p.min * mid);
  }
  ctx.stroke();
  if (cursorFraction !== null) {
    ctx.strokeStyle = "#ff5a5a";
    const x = Math.round(cursorFraction * width) + 0.5;
    ctx.beginPath();
    ctx.moveTo(x, 0);
    ctx.lineTo(x, height);
    ctx.stroke();
  }
}
