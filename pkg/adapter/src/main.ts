#!/usr/bin/env node
// CLI entry: serve a scoring model over stdio or TCP.
//
//   hipe-adapter --transport stdio --model sum --shape 3x224x224
//   hipe-adapter --transport tcp:9009 --model weighted --weights w.hfa --shape 1x64x64

import net from "node:net";
import process from "node:process";

import { resolveModel } from "./models.js";
import type { Shape } from "./protocol.js";
import { ScoringSession } from "./server.js";

interface Args {
  transport: string;
  model: string;
  shape: Shape;
  weights?: string;
}

function parseArgs(argv: string[]): Args {
  const out: Record<string, string> = {};
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--") || i + 1 >= argv.length) {
      usage(`unexpected argument ${arg}`);
    }
    out[arg.slice(2)] = argv[++i];
  }
  const shapeText = out["shape"] ?? "3x224x224";
  const parts = shapeText.split("x").map((v) => parseInt(v, 10));
  if (parts.length !== 3 || parts.some((v) => !Number.isFinite(v) || v < 1)) {
    usage(`bad --shape ${shapeText}; expected CxHxW`);
  }
  return {
    transport: out["transport"] ?? "stdio",
    model: out["model"] ?? "sum",
    shape: { c: parts[0], h: parts[1], w: parts[2] },
    weights: out["weights"],
  };
}

function usage(message: string): never {
  process.stderr.write(
    `${message}\nusage: hipe-adapter --transport stdio|tcp:<port> --model sum|weighted ` +
      `--shape CxHxW [--weights file.hfa]\n`,
  );
  process.exit(2);
}

function main(): void {
  const args = parseArgs(process.argv.slice(2));
  const model = resolveModel(args.model, args.shape, args.weights);

  if (args.transport === "stdio") {
    const session = new ScoringSession(model, args.shape, (data) => {
      process.stdout.write(data);
    });
    process.stdin.on("data", (chunk: Buffer) => {
      try {
        session.feed(chunk);
      } catch (err) {
        process.stderr.write(`fatal: ${err instanceof Error ? err.message : err}\n`);
        process.exit(1);
      }
    });
    process.stdin.on("end", () => process.exit(0));
    return;
  }

  const tcpMatch = /^tcp:(\d+)$/.exec(args.transport);
  if (!tcpMatch) {
    usage(`bad --transport ${args.transport}`);
  }
  const port = parseInt(tcpMatch[1], 10);
  const server = net.createServer((socket) => {
    const session = new ScoringSession(model, args.shape, (data) => socket.write(data));
    socket.on("data", (chunk) => {
      try {
        session.feed(chunk);
      } catch (err) {
        process.stderr.write(`connection error: ${err instanceof Error ? err.message : err}\n`);
        socket.destroy();
      }
    });
    socket.on("error", () => socket.destroy());
  });
  server.maxConnections = 1;
  server.listen(port, "127.0.0.1", () => {
    const addr = server.address();
    const bound = typeof addr === "object" && addr ? addr.port : port;
    process.stderr.write(`listening ${bound}\n`);
  });
}

main();
