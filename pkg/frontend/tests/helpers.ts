/** Test plumbing: spawn the real bridge and talk NDJSON to it. */

import { spawn, type ChildProcess } from "node:child_process";
import net from "node:net";
import path from "node:path";
import { fileURLToPath } from "node:url";

const here = path.dirname(fileURLToPath(import.meta.url));
export const REPO_ROOT = path.resolve(here, "..", "..");

export function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = net.createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error("no port assigned"));
      }
    });
  });
}

export interface Bridge {
  port: number;
  stop(): Promise<void>;
}

export async function spawnBridge(extraArgs: string[] = []): Promise<Bridge> {
  const port = await freePort();
  const proc: ChildProcess = spawn(
    "python3",
    ["-m", "iftt_pin.cli", "serve", "--port", String(port), "--no-http", ...extraArgs],
    {
      cwd: REPO_ROOT,
      env: {
        ...process.env,
        PYTHONPATH: path.join(REPO_ROOT, "src"),
      },
      stdio: ["ignore", "pipe", "pipe"],
    },
  );
  const failure = new Promise<never>((_, reject) => {
    proc.on("exit", (code) => reject(new Error(`bridge exited early (${code})`)));
    proc.on("error", reject);
  });
  await Promise.race([waitForPort(port), failure]);
  proc.removeAllListeners("exit");
  return {
    port,
    stop: () =>
      new Promise((resolve) => {
        proc.once("exit", () => resolve());
        proc.kill("SIGTERM");
      }),
  };
}

async function waitForPort(port: number, timeoutMs = 15000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      await new Promise<void>((resolve, reject) => {
        const sock = net.connect({ port, host: "127.0.0.1" });
        sock.once("connect", () => {
          sock.destroy();
          resolve();
        });
        sock.once("error", reject);
      });
      return;
    } catch {
      if (Date.now() > deadline) throw new Error(`port ${port} never opened`);
      await new Promise((r) => setTimeout(r, 50));
    }
  }
}

/** Newline-delimited JSON client over a raw TCP socket. */
export class NdjsonClient {
  private socket: net.Socket;
  private buffer = "";
  private queue: unknown[] = [];
  private waiters: ((value: unknown) => void)[] = [];

  constructor(port: number) {
    this.socket = net.connect({ port, host: "127.0.0.1" });
    this.socket.setEncoding("utf-8");
    this.socket.on("data", (chunk: string) => {
      this.buffer += chunk;
      let idx = this.buffer.indexOf("\n");
      while (idx >= 0) {
        const line = this.buffer.slice(0, idx).trim();
        this.buffer = this.buffer.slice(idx + 1);
        if (line) {
          const value = JSON.parse(line);
          const waiter = this.waiters.shift();
          if (waiter) waiter(value);
          else this.queue.push(value);
        }
        idx = this.buffer.indexOf("\n");
      }
    });
  }

  send(message: unknown): void {
    this.socket.write(JSON.stringify(message) + "\n");
  }

  read(timeoutMs = 10000): Promise<unknown> {
    const queued = this.queue.shift();
    if (queued !== undefined) return Promise.resolve(queued);
    return new Promise((resolve, reject) => {
      const timer = setTimeout(
        () => reject(new Error("timed out waiting for a server message")),
        timeoutMs,
      );
      this.waiters.push((value) => {
        clearTimeout(timer);
        resolve(value);
      });
    });
  }

  async readMany(count: number): Promise<unknown[]> {
    const out: unknown[] = [];
    for (let i = 0; i < count; i += 1) {
      out.push(await this.read());
    }
    return out;
  }

  close(): void {
    this.socket.destroy();
  }
}
