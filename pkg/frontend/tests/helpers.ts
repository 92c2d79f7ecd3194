/** Shared test utilities. */

export const SERVICE_PORT = 8907;
export const SERVICE_URL = `http://127.0.0.1:${SERVICE_PORT}`;

export function fromBase64(b64: string): Uint8Array {
  return new Uint8Array(Buffer.from(b64, "base64"));
}

/** Minimal float32 mono WAV writer (test fixtures only). */
export function encodeWavFloat32(samples: Float32Array, sampleRate: number): Uint8Array {
  const payload = samples.length * 4;
  const out = new Uint8Array(44 + payload);
  const view = new DataView(out.buffer);
  const tag = (at: number, text: string) => {
    for (let i = 0; i < text.length; i++) out[at + i] = text.charCodeAt(i);
  };
  tag(0, "RIFF");
  view.setUint32(4, 36 + payload, true);
  tag(8, "WAVE");
  tag(12, "fmt ");
  view.setUint32(16, 16, true);
  view.setUint16(20, 3, true); // IEEE float
  view.setUint16(22, 1, true);
  view.setUint32(24, sampleRate, true);
  view.setUint32(28, sampleRate * 4, true);
  view.setUint16(32, 4, true);
  view.setUint16(34, 32, true);
  tag(36, "data");
  view.setUint32(40, payload, true);
  for (let i = 0; i < samples.length; i++) view.setFloat32(44 + i * 4, samples[i], true);
  return out;
}

export function chirpSamples(f0: number, f1: number, sampleRate: number, duration: number): Float32Array {
  const n = Math.floor(sampleRate * duration);
  const samples = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    const t = i / sampleRate;
    const phase = 2 * Math.PI * (f0 * t + (0.5 * (f1 - f0) * t * t) / duration);
    samples[i] = 0.5 * Math.sin(phase);
  }
  return samples;
}

/** Mirror of the layer/service symmetry rule in centered layout. */
export function symmetrizePixels(pixels: Uint8Array, rows: number, cols: number): Uint8Array {
  const out = pixels.slice();
  for (let r = 0; r < rows; r++) {
    const m = (rows - r) % rows;
    for (let c = 0; c < cols; c++) {
      const union = Math.max(pixels[r * cols + c], pixels[m * cols + c]);
      out[r * cols + c] = union;
      out[m * cols + c] = union;
    }
  }
  return out;
}
