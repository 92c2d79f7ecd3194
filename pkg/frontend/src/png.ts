/**
 * Minimal 8-bit grayscale PNG codec.
 *
 * Masks must survive the canvas -> server -> canvas trip losslessly, and
 * canvas.toDataURL / drawImage readback is a minefield (premultiplied alpha,
 * color management). Encoding and decoding the label bytes directly avoids
 * the whole class of problems and runs identically in the browser and in
 * node tests (both provide CompressionStream).
 *
 * Encoder emits color type 0, bit depth 8, filter 0 rows. Decoder accepts
 * any filter (None/Sub/Up/Average/Paeth) but only non-interlaced 8-bit
 * grayscale, which is exactly what the label service produces.
 */

export interface GrayImage {
  width: number;
  height: number;
  /** row-major, length = width * height */
  pixels: Uint8Array;
}

const SIGNATURE = new Uint8Array([137, 80, 78, 71, 13, 10, 26, 10]);

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(...parts: Uint8Array[]): number {
  let c = 0xffffffff;
  for (const part of parts) {
    for (let i = 0; i < part.length; i++) {
      c = CRC_TABLE[(c ^ part[i]) & 0xff] ^ (c >>> 8);
    }
  }
  return (c ^ 0xffffffff) >>> 0;
}

function u32be(value: number): Uint8Array {
  return new Uint8Array([(value >>> 24) & 0xff, (value >>> 16) & 0xff, (value >>> 8) & 0xff, value & 0xff]);
}

function ascii(tag: string): Uint8Array {
  return new Uint8Array([...tag].map((ch) => ch.charCodeAt(0)));
}

async function pipeThrough(data: Uint8Array, stream: CompressionStream | DecompressionStream): Promise<Uint8Array> {
  const source = new Blob([data as BlobPart]).stream().pipeThrough(stream);
  const buf = await new Response(source).arrayBuffer();
  return new Uint8Array(buf);
}

function chunk(tag: string, body: Uint8Array): Uint8Array {
  const name = ascii(tag);
  const out = new Uint8Array(12 + body.length);
  out.set(u32be(body.length), 0);
  out.set(name, 4);
  out.set(body, 8);
  out.set(u32be(crc32(name, body)), 8 + body.length);
  return out;
}

export async function encodeGrayPng(image: GrayImage): Promise<Uint8Array> {
  const { width, height, pixels } = image;
  if (pixels.length !== width * height) {
    throw new Error(`pixel count ${pixels.length} != ${width}x${height}`);
  }
  const ihdr = new Uint8Array(13);
  ihdr.set(u32be(width), 0);
  ihdr.set(u32be(height), 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 0; // color type: grayscale
  // compression 0, filter 0, interlace 0 already zeroed

  const raw = new Uint8Array(height * (width + 1));
  for (let y = 0; y < height; y++) {
    raw[y * (width + 1)] = 0; // filter: none
    raw.set(pixels.subarray(y * width, (y + 1) * width), y * (width + 1) + 1);
  }
  const idat = await pipeThrough(raw, new CompressionStream("deflate"));

  const parts = [SIGNATURE, chunk("IHDR", ihdr), chunk("IDAT", idat), chunk("IEND", new Uint8Array(0))];
  const total = parts.reduce((acc, p) => acc + p.length, 0);
  const out = new Uint8Array(total);
  let offset = 0;
  for (const part of parts) {
    out.set(part, offset);
    offset += part.length;
  }
  return out;
}

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

export async function decodeGrayPng(data: Uint8Array): Promise<GrayImage> {
  for (let i = 0; i < SIGNATURE.length; i++) {
    if (data[i] !== SIGNATURE[i]) throw new Error("not a PNG");
  }
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  let pos = 8;
  let width = 0;
  let height = 0;
  const idatParts: Uint8Array[] = [];
  let sawIhdr = false;
  while (pos + 8 <= data.length) {
    const length = view.getUint32(pos);
    const tag = String.fromCharCode(data[pos + 4], data[pos + 5], data[pos + 6], data[pos + 7]);
    const body = data.subarray(pos + 8, pos + 8 + length);
    if (body.length < length) throw new Error(`truncated ${tag} chunk`);
    if (tag === "IHDR") {
      width = view.getUint32(pos + 8);
      height = view.getUint32(pos + 12);
      const bitDepth = data[pos + 16];
      const colorType = data[pos + 17];
      const interlace = data[pos + 20];
      if (bitDepth !== 8 || colorType !== 0) {
        throw new Error(`unsupported PNG: bit depth ${bitDepth}, color type ${colorType}`);
      }
      if (interlace !== 0) throw new Error("interlaced PNG not supported");
      sawIhdr = true;
    } else if (tag === "IDAT") {
      idatParts.push(body);
    } else if (tag === "IEND") {
      break;
    }
    pos += 12 + length;
  }
  if (!sawIhdr || idatParts.length === 0) throw new Error("PNG missing IHDR or IDAT");

  const compressed = new Uint8Array(idatParts.reduce((acc, p) => acc + p.length, 0));
  let offset = 0;
  for (const part of idatParts) {
    compressed.set(part, offset);
    offset += part.length;
  }
  const raw = await pipeThrough(compressed, new DecompressionStream("deflate"));
  const stride = width + 1;
  if (raw.length < height * stride) throw new Error("PNG data shorter than expected");

  const pixels = new Uint8Array(width * height);
  const prior = new Uint8Array(width);
  for (let y = 0; y < height; y++) {
    const filter = raw[y * stride];
    const line = raw.subarray(y * stride + 1, y * stride + 1 + width);
    const row = pixels.subarray(y * width, (y + 1) * width);
    for (let x = 0; x < width; x++) {
      const a = x > 0 ? row[x - 1] : 0; // left
      const b = prior[x]; // up
      const c = x > 0 ? prior[x - 1] : 0; // up-left
      let value: number;
      switch (filter) {
        case 0:
          value = line[x];
          break;
        case 1:
          value = line[x] + a;
          break;
        case 2:
          value = line[x] + b;
          break;
        case 3:
          value = line[x] + ((a + b) >> 1);
          break;
        case 4:
          value = line[x] + paeth(a, b, c);
          break;
        default:
          throw new Error(`unknown PNG filter ${filter}`);
      }
      row[x] = value & 0xff;
    }
    prior.set(row);
  }
  return { width, height, pixels };
}
