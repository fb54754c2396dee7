import { UsageError } from "./errors";

/**
 * A 2-D grid backed by a contiguous row-major buffer.
 *
 * Masks are 8-bit (any nonzero byte is foreground); probability maps
 * are 32-bit floats in [0, 1]. The bindings treat `data` as read-only:
 * no call mutates an input buffer, and results come back in fresh
 * buffers. Serializing to the interchange formats necessarily copies
 * the bytes once at the process boundary.
 */
export interface BoundGrid<T extends Uint8Array | Float32Array = Uint8Array | Float32Array> {
  readonly height: number;
  readonly width: number;
  readonly data: T;
}

/** 8-bit mask or label grid. */
export type MaskGrid = BoundGrid<Uint8Array>;

/** float32 probability map grid. */
export type MapGrid = BoundGrid<Float32Array>;

function checkShape(height: number, width: number, length: number): void {
  if (!Number.isInteger(height) || !Number.isInteger(width) ||
      height < 1 || width < 1) {
    throw new UsageError(`grid dimensions must be positive integers, got ${height}x${width}`);
  }
  if (length !== height * width) {
    throw new UsageError(
      `buffer holds ${length} elements, expected ${height}x${width} = ${height * width}`);
  }
}

/** Wrap an existing byte buffer as a mask grid (no copy). */
export function maskGrid(height: number, width: number, data: Uint8Array): MaskGrid {
  checkShape(height, width, data.length);
  return { height, width, data };
}

/** Wrap an existing float32 buffer as a probability map grid (no copy). */
export function mapGrid(height: number, width: number, data: Float32Array): MapGrid {
  checkShape(height, width, data.length);
  return { height, width, data };
}

export function requireMask(grid: MaskGrid, name: string): void {
  if (!(grid.data instanceof Uint8Array)) {
    throw new UsageError(`${name} must be backed by a Uint8Array`);
  }
  checkShape(grid.height, grid.width, grid.data.length);
}

export function requireMap(grid: MapGrid, name: string): void {
  if (!(grid.data instanceof Float32Array)) {
    throw new UsageError(`${name} must be backed by a Float32Array`);
  }
  checkShape(grid.height, grid.width, grid.data.length);
}
