import { PNG } from "pngjs";

import { FormatError } from "./errors";
import { MaskGrid, maskGrid } from "./grid";

/** Encode an 8-bit grid as a grayscale (single channel) PNG. */
export function encodeGrayPng(grid: MaskGrid): Buffer {
  const png = new PNG({ width: grid.width, height: grid.height });
  png.data = Buffer.from(grid.data.buffer, grid.data.byteOffset, grid.data.length);
  return PNG.sync.write(png, {
    colorType: 0,
    inputColorType: 0,
    inputHasAlpha: false,
    bitDepth: 8,
  });
}

/** Interleave three 8-bit channel planes and encode as an RGB PNG. */
export function encodeRgbPng(r: MaskGrid, g: MaskGrid, b: MaskGrid): Buffer {
  const n = r.height * r.width;
  const interleaved = Buffer.allocUnsafe(n * 3);
  for (let i = 0; i < n; i++) {
    interleaved[i * 3] = r.data[i];
    interleaved[i * 3 + 1] = g.data[i];
    interleaved[i * 3 + 2] = b.data[i];
  }
  const png = new PNG({ width: r.width, height: r.height });
  png.data = interleaved;
  return PNG.sync.write(png, {
    colorType: 2,
    inputColorType: 2,
    inputHasAlpha: false,
    bitDepth: 8,
  });
}

/** Decode a single-channel PNG into an 8-bit grid. */
export function decodeGrayPng(bytes: Buffer): MaskGrid {
  let png: PNG;
  try {
    png = PNG.sync.read(bytes);
  } catch (e) {
    throw new FormatError(`not a readable PNG: ${(e as Error).message}`);
  }
  // pngjs expands every image to RGBA; a grayscale source has equal
  // channels, so the red plane carries the values
  const data = new Uint8Array(png.width * png.height);
  for (let i = 0; i < data.length; i++) {
    data[i] = png.data[i * 4];
  }
  return maskGrid(png.height, png.width, data);
}
