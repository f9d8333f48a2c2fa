/**
 * Minimal reader for NPY format version 1.0 files holding little-endian
 * float64 payloads in C order — exactly what the core CLI emits.
 */

export interface NpyArray {
  readonly shape: readonly number[];
  /** Payload in C (row-major) order. */
  readonly data: Float64Array;
}

const MAGIC = [0x93, 0x4e, 0x55, 0x4d, 0x50, 0x59]; // \x93NUMPY

export class NpyFormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "NpyFormatError";
  }
}

function parseHeaderDict(header: string): { descr: string; fortranOrder: boolean; shape: number[] } {
  // The header is a Python dict literal with a known, fixed key set, e.g.
  // {'descr': '<f8', 'fortran_order': False, 'shape': (12, 12), }
  const descr = /'descr':\s*'([^']*)'/.exec(header);
  const fortran = /'fortran_order':\s*(True|False)/.exec(header);
  const shape = /'shape':\s*\(([^)]*)\)/.exec(header);
  if (!descr || !fortran || !shape) {
    throw new NpyFormatError(`unparseable NPY header: ${header.trim()}`);
  }
  const dims = shape[1]!
    .split(",")
    .map((part) => part.trim())
    .filter((part) => part.length > 0)
    .map((part) => {
      const dim = Number(part);
      if (!Number.isInteger(dim) || dim < 0) {
        throw new NpyFormatError(`bad dimension ${part} in NPY shape`);
      }
      return dim;
    });
  return { descr: descr[1]!, fortranOrder: fortran[1] === "True", shape: dims };
}

/** Parse an NPY v1.0 buffer into shape + float64 payload. */
export function parseNpy(bytes: Uint8Array): NpyArray {
  if (bytes.length < 10 || MAGIC.some((byte, i) => bytes[i] !== byte)) {
    throw new NpyFormatError("not an NPY file (bad magic)");
  }
  const major = bytes[6]!;
  const minor = bytes[7]!;
  if (major !== 1 || minor !== 0) {
    throw new NpyFormatError(`unsupported NPY version ${major}.${minor}`);
  }
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const headerLength = view.getUint16(8, true);
  if (10 + headerLength > bytes.length) {
    throw new NpyFormatError("NPY header extends past end of file");
  }
  let header = "";
  for (let i = 10; i < 10 + headerLength; i++) {
    header += String.fromCharCode(bytes[i]!);
  }
  const { descr, fortranOrder, shape } = parseHeaderDict(header);
  if (descr !== "<f8") {
    throw new NpyFormatError(`expected little-endian float64 ('<f8'), got '${descr}'`);
  }
  if (fortranOrder) {
    throw new NpyFormatError("Fortran-ordered payloads are not supported");
  }
  const count = shape.reduce((acc, dim) => acc * dim, 1);
  const payloadStart = 10 + headerLength;
  if (bytes.length - payloadStart !== count * 8) {
    throw new NpyFormatError(
      `payload is ${bytes.length - payloadStart} bytes, expected ${count * 8}`,
    );
  }
  const data = new Float64Array(count);
  for (let i = 0; i < count; i++) {
    data[i] = view.getFloat64(payloadStart + i * 8, true);
  }
  return { shape, data };
}
