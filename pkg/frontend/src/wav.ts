/**
 * WAV parsing for the waveform strip. The service streams mono float32 WAV
 * previews; PCM16 is handled too for workspace files opened directly.
 */

export interface WavData {
  sampleRate: number;
  samples: Float32Array;
}

export function decodeWav(data: Uint8Array): WavData {
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  const tag = (at: number) => String.fromCharCode(data[at], data[at + 1], data[at + 2], data[at + 3]);
  if (data.length < 12 || tag(0) !== "RIFF" || tag(8) !== "WAVE") {
    throw new Error("not a WAV file");
  }
  let pos = 12;
  let format = 0;
  let channels = 0;
  let sampleRate = 0;
  let bits = 0;
  let payload: Uint8Array | null = null;
  while (pos + 8 <= data.length) {
    const id = tag(pos);
    const size = view.getUint32(pos + 4, true);
    if (id === "fmt ") {
      format = view.getUint16(pos + 8, true);
      channels = view.getUint16(pos + 10, true);
      sampleRate = view.getUint32(pos + 12, true);
      bits = view.getUint16(pos + 22, true);
    } else if (id === "data") {
      payload = data.subarray(pos + 8, pos + 8 + size);
    }
    pos += 8 + size + (size & 1);
  }
  if (payload === null || channels < 1) throw new Error("WAV missing fmt or data");

  let flat: Float32Array;
  if (format === 3 && bits === 32) {
    flat = new Float32Array(payload.length >> 2);
    const pv = new DataView(payload.buffer, payload.byteOffset, payload.byteLength);
    for (let i = 0; i < flat.length; i++) flat[i] = pv.getFloat32(i * 4, true);
  } else if (format === 1 && bits === 16) {
    flat = new Float32Array(payload.length >> 1);
    const pv = new DataView(payload.buffer, payload.byteOffset, payload.byteLength);
    for (let i = 0; i < flat.length; i++) flat[i] = pv.getInt16(i * 2, true) / 32768;
  } else {
    throw new Error(`unsupported WAV format ${format}/${bits}`);
  }

  // keep the first channel; previews are mono anyway
  const frames = Math.floor(flat.length / channels);
  const samples = new Float32Array(frames);
  for (let i = 0; i < frames; i++) samples[i] = flat[i * channels];
  return { sampleRate, samples };
}

export interface Peak {
  min: number;
  max: number;
}

/** Min/max envelope per horizontal pixel for the waveform strip. */
export function computePeaks(samples: Float32Array, buckets: number): Peak[] {
  const peaks: Peak[] = [];
  if (buckets <= 0 || samples.length === 0) return peaks;
  const per = samples.length / buckets;
  for (let b = 0; b < buckets; b++) {
    const lo = Math.floor(b * per);
    const hi = Math.min(samples.length, Math.max(lo + 1, Math.floor((b + 1) * per)));
    let min = Infinity;
    let max = -Infinity;
    for (let i = lo; i < hi; i++) {
      if (samples[i] < min) min = samples[i];
      if (samples[i] > max) max = samples[i];
    }
    peaks.push({ min, max });
  }
  return peaks;
}
