/**
 * Protocol golden test: the recorded conversation must replay exactly
 * against a live bridge, message for message.
 */

import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { NdjsonClient, spawnBridge, type Bridge } from "./helpers.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const golden = (name: string) =>
  JSON.parse(readFileSync(path.join(here, "..", "golden", name), "utf-8"));

describe("protocol golden replay", () => {
  let bridge: Bridge;

  beforeAll(async () => {
    bridge = await spawnBridge();
  }, 30000);

  afterAll(async () => {
    await bridge.stop();
  });

  it("replays the fixed client script to the recorded server messages", async () => {
    const script: unknown[] = golden("client_script.json");
    const recorded: unknown[] = golden("server_messages.json");

    const client = new NdjsonClient(bridge.port);
    const received: unknown[] = [await client.read()]; // hello
    for (const message of script) {
      client.send(message);
    }
    while (received.length < recorded.length) {
      received.push(await client.read());
    }
    client.close();

    expect(received).toEqual(recorded);
  }, 30000);

  it("greets every connection with hello version 1", async () => {
    const client = new NdjsonClient(bridge.port);
    expect(await client.read()).toEqual({ type: "hello", version: 1 });
    client.close();
  }, 30000);
});
