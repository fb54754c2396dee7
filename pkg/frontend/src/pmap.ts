import { FormatError } from "./errors";
import { MapGrid, mapGrid } from "./grid";

const MAGIC = Buffer.from("PMAP", "latin1");
const VERSION = 1;
const HEADER_BYTES = 13;

/** Serialize a probability map to the binary interchange format. */
export function encodePmap(grid: MapGrid): Buffer {
  const out = Buffer.allocUnsafe(HEADER_BYTES + grid.data.length * 4);
  MAGIC.copy(out, 0);
  out.writeUInt8(VERSION, 4);
  out.writeUInt32LE(grid.height, 5);
  out.writeUInt32LE(grid.width, 9);
  for (let i = 0; i < grid.data.length; i++) {
    out.writeFloatLE(grid.data[i], HEADER_BYTES + i * 4);
  }
  return out;
}

/** Parse the binary probability map format back into a grid. */
export function decodePmap(bytes: Buffer): MapGrid {
  if (bytes.length < HEADER_BYTES) {
    throw new FormatError(`truncated header: ${bytes.length} bytes`);
  }
  if (!bytes.subarray(0, 4).equals(MAGIC)) {
    throw new FormatError("bad magic, expected PMAP");
  }
  if (bytes.readUInt8(4) !== VERSION) {
    throw new FormatError(`unsupported version ${bytes.readUInt8(4)}`);
  }
  const height = bytes.readUInt32LE(5);
  const width = bytes.readUInt32LE(9);
  if (height === 0 || width === 0) {
    throw new FormatError(`degenerate dimensions ${height}x${width}`);
  }
  const expected = HEADER_BYTES + height * width * 4;
  if (bytes.length !== expected) {
    throw new FormatError(
      `payload is ${bytes.length - HEADER_BYTES} bytes, expected ${expected - HEADER_BYTES}`);
  }
  const data = new Float32Array(height * width);
  for (let i = 0; i < data.length; i++) {
    data[i] = bytes.readFloatLE(HEADER_BYTES + i * 4);
  }
  return mapGrid(height, width, data);
}
