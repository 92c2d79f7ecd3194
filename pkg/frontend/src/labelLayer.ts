/**
 * Editable label layer over an audio image.
 *
 * The layer is a row-major byte matrix with the same dimensions as the
 * background image (centered spectrogram layout: DC in the middle row).
 * Every paint operation also paints the conjugate-mirror row, previewing the
 * symmetry rule the server enforces on save. Row r mirrors to (rows - r) %
 * rows, the same formula the backend uses in this layout.
 */

export interface Stroke {
  points: Array<{ x: number; y: number }>;
  radius: number;
}

export interface Polygon {
  vertices: Array<{ x: number; y: number }>;
}

const UNDO_CAPACITY = 32; // spec floor is 20 steps

export class LabelLayer {
  readonly rows: number;
  readonly cols: number;
  private data: Uint8Array;
  private undoStack: Uint8Array[] = [];
  private redoStack: Uint8Array[] = [];

  constructor(rows: number, cols: number, initial?: Uint8Array) {
    if (rows <= 0 || cols <= 0) throw new Error(`bad layer dims ${rows}x${cols}`);
    this.rows = rows;
    this.cols = cols;
    if (initial !== undefined) {
      if (initial.length !== rows * cols) {
        throw new Error(`initial data length ${initial.length} != ${rows * cols}`);
      }
      this.data = initial.slice();
    } else {
      this.data = new Uint8Array(rows * cols);
    }
  }

  get(row: number, col: number): number {
    return this.data[row * this.cols + col];
  }

  /** Copy of the raw label matrix, row-major. */
  pixels(): Uint8Array {
    return this.data.slice();
  }

  mirrorRow(row: number): number {
    return (this.rows - row) % this.rows;
  }

  private snapshot(): void {
    this.undoStack.push(this.data.slice());
    if (this.undoStack.length > UNDO_CAPACITY) this.undoStack.shift();
    this.redoStack = [];
  }

  get undoDepth(): number {
    return this.undoStack.length;
  }

  undo(): boolean {
    const prev = this.undoStack.pop();
    if (prev === undefined) return false;
    this.redoStack.push(this.data);
    this.data = prev;
    return true;
  }

  redo(): boolean {
    const next = this.redoStack.pop();
    if (next === undefined) return false;
    this.undoStack.push(this.data);
    this.data = next;
    return true;
  }

  private setWithMirror(row: number, col: number, label: number): void {
    // out-of-bounds strokes are clipped, not errors
    if (row < 0 || row >= this.rows || col < 0 || col >= this.cols) return;
    this.data[row * this.cols + col] = label;
    this.data[this.mirrorRow(row) * this.cols + col] = label;
  }

  /** Stamp a filled disc at every stroke point; label 0 erases. */
  paintStroke(stroke: Stroke, label: number): void {
    this.snapshot();
    const r = Math.max(0, Math.floor(stroke.radius));
    for (const { x, y } of stroke.points) {
      const cx = Math.round(x);
      const cy = Math.round(y);
      for (let dy = -r; dy <= r; dy++) {
        for (let dx = -r; dx <= r; dx++) {
          if (dx * dx + dy * dy <= r * r) {
            this.setWithMirror(cy + dy, cx + dx, label);
          }
        }
      }
    }
  }

  /** Even-odd scanline fill of a closed polygon; label 0 erases. */
  paintPolygon(polygon: Polygon, label: number): void {
    const n = polygon.vertices.length;
    if (n < 3) return;
    this.snapshot();
    let minY = Infinity;
    let maxY = -Infinity;
    for (const v of polygon.vertices) {
      minY = Math.min(minY, v.y);
      maxY = Math.max(maxY, v.y);
    }
    const yLo = Math.max(0, Math.floor(minY));
    const yHi = Math.min(this.rows - 1, Math.ceil(maxY));
    for (let y = yLo; y <= yHi; y++) {
      const scanY = y + 0.5;
      const crossings: number[] = [];
      for (let i = 0; i < n; i++) {
        const a = polygon.vertices[i];
        const b = polygon.vertices[(i + 1) % n];
        if (a.y <= scanY !== b.y <= scanY) {
          crossings.push(a.x + ((scanY - a.y) * (b.x - a.x)) / (b.y - a.y));
        }
      }
      crossings.sort((p, q) => p - q);
      for (let i = 0; i + 1 < crossings.length; i += 2) {
        const xLo = Math.max(0, Math.round(crossings[i]));
        const xHi = Math.min(this.cols - 1, Math.round(crossings[i + 1]) - 1);
        for (let x = xLo; x <= xHi; x++) {
          this.setWithMirror(y, x, label);
        }
      }
    }
  }

  /** Replace the whole layer (e.g. with a mask fetched from the server). */
  load(pixels: Uint8Array): void {
    if (pixels.length !== this.rows * this.cols) {
      throw new Error(`mask length ${pixels.length} != layer ${this.rows * this.cols}`);
    }
    this.snapshot();
    this.data = pixels.slice();
  }

  equals(other: Uint8Array): boolean {
    if (other.length !== this.data.length) return false;
    for (let i = 0; i < other.length; i++) {
      if (other[i] !== this.data[i]) return false;
    }
    return true;
  }
}
