// Scoring wire protocol v1. All integers little-endian.
//
// Handshake (unframed):
//   client -> "HSP1" + u32 version
//   server -> "HSP1" + u32 version + u32 c + u32 h + u32 w
//
// Afterwards, length-prefixed frames; frame_len counts opcode + body.

export const MAGIC = Buffer.from("HSP1", "ascii");
export const VERSION = 1;

export const OP_SCORE = 1;
export const OP_SCORES = 2;
export const OP_SET_TARGET = 3;
export const OP_ACK = 4;
export const OP_ERROR = 255;

export const CLIENT_HELLO_LEN = 8;

export interface Shape {
  c: number;
  h: number;
  w: number;
}

export function encodeFrame(opcode: number, body: Buffer = Buffer.alloc(0)): Buffer {
  const head = Buffer.alloc(5);
  head.writeUInt32LE(1 + body.length, 0);
  head.writeUInt8(opcode, 4);
  return Buffer.concat([head, body]);
}

export function serverHello(shape: Shape): Buffer {
  const out = Buffer.alloc(20);
  MAGIC.copy(out, 0);
  out.writeUInt32LE(VERSION, 4);
  out.writeUInt32LE(shape.c, 8);
  out.writeUInt32LE(shape.h, 12);
  out.writeUInt32LE(shape.w, 16);
  return out;
}

export function encodeScores(scores: number[]): Buffer {
  const body = Buffer.alloc(4 + 4 * scores.length);
  body.writeUInt32LE(scores.length, 0);
  scores.forEach((s, k) => body.writeFloatLE(s, 4 + 4 * k));
  return encodeFrame(OP_SCORES, body);
}

export function encodeError(message: string): Buffer {
  const text = Buffer.from(message, "utf-8");
  const body = Buffer.alloc(4 + text.length);
  body.writeUInt32LE(text.length, 0);
  text.copy(body, 4);
  return encodeFrame(OP_ERROR, body);
}

export function readFloats(body: Buffer, offset: number, count: number): Float64Array {
  const out = new Float64Array(count);
  for (let k = 0; k < count; k++) {
    out[k] = body.readFloatLE(offset + 4 * k);
  }
  return out;
}
