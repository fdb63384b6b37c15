/**
 * DCTT tensor container parser.
 *
 * A file is a sequence of records, each laid out as:
 *   magic "DCTT" | version u8 | dtype u8 (0=i32, 1=f32, 2=f64) | ndim u8 |
 *   dims u32 LE x ndim | payload row-major LE
 */

export type DcttData = Int32Array | Float32Array | Float64Array;

export interface DcttTensor {
  dtype: 'i32' | 'f32' | 'f64';
  dims: number[];
  data: DcttData;
}

const MAGIC = 0x44435454; // "DCTT" big-endian

export function parseDctt(buf: Uint8Array): DcttTensor[] {
  const view = new DataView(buf.buffer, buf.byteOffset, buf.byteLength);
  const tensors: DcttTensor[] = [];
  let pos = 0;
  while (pos < buf.byteLength) {
    if (pos + 7 > buf.byteLength || view.getUint32(pos, false) !== MAGIC) {
      throw new Error(`bad DCTT record at offset ${pos}`);
    }
    const version = view.getUint8(pos + 4);
    if (version !== 1) throw new Error(`unsupported DCTT version ${version}`);
    const dtypeCode = view.getUint8(pos + 5);
    const ndim = view.getUint8(pos + 6);
    pos += 7;
    if (pos + 4 * ndim > buf.byteLength) throw new Error('truncated DCTT dims');
    const dims: number[] = [];
    for (let i = 0; i < ndim; i++) {
      dims.push(view.getUint32(pos, true));
      pos += 4;
    }
    const count = dims.reduce((a, b) => a * b, 1);
    const itemSize = dtypeCode === 1 ? 4 : dtypeCode === 2 ? 8 : 4;
    if (pos + count * itemSize > buf.byteLength) throw new Error('truncated DCTT payload');
    // payload offsets are not 4/8-byte aligned; copy once into a fresh,
    // zero-offset buffer (never Buffer.slice, which aliases the input)
    const bytes = new Uint8Array(buf.subarray(pos, pos + count * itemSize));
    pos += count * itemSize;
    let dtype: DcttTensor['dtype'];
    let data: DcttData;
    switch (dtypeCode) {
      case 0:
        dtype = 'i32';
        data = new Int32Array(bytes.buffer, 0, count);
        break;
      case 1:
        dtype = 'f32';
        data = new Float32Array(bytes.buffer, 0, count);
        break;
      case 2:
        dtype = 'f64';
        data = new Float64Array(bytes.buffer, 0, count);
        break;
      default:
        throw new Error(`unknown DCTT dtype code ${dtypeCode}`);
    }
    tensors.push({ dtype, dims, data });
  }
  return tensors;
}
