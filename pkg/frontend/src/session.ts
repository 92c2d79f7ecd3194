/**
 * Canvas session: one open clip, its background image, the editable label
 * layer, and the sync verbs against the label service.
 */
import { LabelApi } from "./api.js";
import { LabelLayer, Polygon, Stroke } from "./labelLayer.js";
import { decodeGrayPng, encodeGrayPng, GrayImage } from "./png.js";

export type Tool = "brush" | "polygon" | "eraser";

export interface SessionOptions {
  nSources?: number;
}

export class CanvasSession {
  readonly clipId: string;
  readonly image: GrayImage;
  readonly layer: LabelLayer;
  readonly nSources: number;
  activeLabel = 1;
  brushRadius = 4;
  tool: Tool = "brush";
  overlayOpacity = 0.45;
  private dirty = false;

  private constructor(clipId: string, image: GrayImage, layer: LabelLayer, nSources: number) {
    this.clipId = clipId;
    this.image = image;
    this.layer = layer;
    this.nSources = nSources;
  }

  /** Open a clip: fetch its audio image and current mask at native dims. */
  static async open(api: LabelApi, clipId: string, options: SessionOptions = {}): Promise<CanvasSession> {
    const image = await decodeGrayPng(await api.getImage(clipId));
    const mask = await decodeGrayPng(await api.getMask(clipId));
    if (mask.width !== image.width || mask.height !== image.height) {
      throw new Error(
        `mask dims ${mask.width}x${mask.height} != image ${image.width}x${image.height}`,
      );
    }
    const layer = new LabelLayer(image.height, image.width, mask.pixels);
    return new CanvasSession(clipId, image, layer, options.nSources ?? 1);
  }

  get isDirty(): boolean {
    return this.dirty;
  }

  paintStroke(stroke: Stroke): void {
    const label = this.tool === "eraser" ? 0 : this.activeLabel;
    this.layer.paintStroke(stroke, label);
    this.dirty = true;
  }

  paintPolygon(polygon: Polygon): void {
    const label = this.tool === "eraser" ? 0 : this.activeLabel;
    this.layer.paintPolygon(polygon, label);
    this.dirty = true;
  }

  undo(): boolean {
    const done = this.layer.undo();
    if (done) this.dirty = true;
    return done;
  }

  redo(): boolean {
    const done = this.layer.redo();
    if (done) this.dirty = true;
    return done;
  }

  /** Serialize the painted label matrix as the canonical grayscale PNG. */
  async exportMaskPng(): Promise<Uint8Array> {
    return encodeGrayPng({
      width: this.layer.cols,
      height: this.layer.rows,
      pixels: this.layer.pixels(),
    });
  }

  /** PUT the mask, then reload the stored (symmetrized) version. */
  async save(api: LabelApi): Promise<void> {
    await api.putMask(this.clipId, await this.exportMaskPng());
    const stored = await decodeGrayPng(await api.getMask(this.clipId));
    this.layer.load(stored.pixels);
    this.dirty = false;
  }

  async preview(api: LabelApi): Promise<Uint8Array> {
    return api.denoisePreview(this.clipId);
  }
}
