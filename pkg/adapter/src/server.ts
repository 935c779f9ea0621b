// Request loop for one scoring connection: handshake, then SCORE /
// SET_TARGET frames. Malformed frames get an ERROR reply and the
// connection stays alive; EOF ends the session cleanly.

import type { ScoringModel } from "./models.js";
import {
  CLIENT_HELLO_LEN,
  MAGIC,
  OP_ACK,
  OP_SCORE,
  OP_SET_TARGET,
  Shape,
  encodeFrame,
  encodeError,
  encodeScores,
  readFloats,
  serverHello,
} from "./protocol.js";

export type WriteFn = (data: Buffer) => void;

export class ScoringSession {
  private buffer: Buffer = Buffer.alloc(0);
  private handshakeDone = false;
  private target = 0;

  constructor(
    private readonly model: ScoringModel,
    private readonly shape: Shape,
    private readonly write: WriteFn,
  ) {}

  /** Feed incoming bytes; replies are pushed through the write callback. */
  feed(data: Buffer): void {
    this.buffer = this.buffer.length === 0 ? data : Buffer.concat([this.buffer, data]);
    for (;;) {
      if (!this.handshakeDone) {
        if (this.buffer.length < CLIENT_HELLO_LEN) return;
        const hello = this.buffer.subarray(0, CLIENT_HELLO_LEN);
        this.buffer = this.buffer.subarray(CLIENT_HELLO_LEN);
        if (!hello.subarray(0, 4).equals(MAGIC)) {
          throw new Error("client handshake has a bad magic");
        }
        this.write(serverHello(this.shape));
        this.handshakeDone = true;
        continue;
      }
      if (this.buffer.length < 4) return;
      const frameLen = this.buffer.readUInt32LE(0);
      if (this.buffer.length < 4 + frameLen) return;
      const payload = this.buffer.subarray(4, 4 + frameLen);
      this.buffer = this.buffer.subarray(4 + frameLen);
      this.handleFrame(payload);
    }
  }

  private handleFrame(payload: Buffer): void {
    if (payload.length < 1) {
      this.write(encodeError("empty frame"));
      return;
    }
    const opcode = payload.readUInt8(0);
    const body = payload.subarray(1);
    try {
      if (opcode === OP_SCORE) {
        this.write(encodeScores(this.scoreBatch(body)));
      } else if (opcode === OP_SET_TARGET) {
        this.setTarget(body);
        this.write(encodeFrame(OP_ACK));
      } else {
        this.write(encodeError(`unknown opcode ${opcode}`));
      }
    } catch (err) {
      this.write(encodeError(err instanceof Error ? err.message : String(err)));
    }
  }

  private scoreBatch(body: Buffer): number[] {
    if (body.length < 4) {
      throw new Error("score frame too short");
    }
    const batch = body.readUInt32LE(0);
    const per = this.shape.c * this.shape.h * this.shape.w;
    if (body.length !== 4 + 4 * batch * per) {
      throw new Error(`score frame holds ${(body.length - 4) / 4} values, expected ${batch * per}`);
    }
    const scores: number[] = [];
    for (let k = 0; k < batch; k++) {
      const values = readFloats(body, 4 + 4 * k * per, per);
      scores.push(this.model.score(values, this.shape, this.target));
    }
    return scores;
  }

  private setTarget(body: Buffer): void {
    if (body.length !== 4) {
      throw new Error("set-target frame must hold one u32");
    }
    const index = body.readUInt32LE(0);
    if (index >= this.model.classCount) {
      throw new Error(`no class ${index}`);
    }
    this.target = index;
  }
}
