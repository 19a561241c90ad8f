import { describe, expect, it } from "vitest";

import { SyncHub } from "../src/sync.js";
import type { ViewState } from "../src/viewstate.js";

const START: ViewState = { centerX: 100, centerY: 100, zoom: 1 };

describe("SyncHub", () => {
  it("fans a published state out to every subscriber", () => {
    const hub = new SyncHub(START);
    const seen: ViewState[] = [];
    hub.subscribe((s) => seen.push(s));
    hub.subscribe((s) => seen.push(s));
    const next = { centerX: 200, centerY: 150, zoom: 2 };
    hub.publish("gesture", next);
    expect(seen).toEqual([next, next]);
    expect(hub.state).toEqual(next);
  });

  it("does not re-broadcast publishes made from inside a broadcast", () => {
    const hub = new SyncHub(START);
    let calls = 0;
    hub.subscribe((s) => {
      calls++;
      // a listener that mirrors the state back must not echo forever
      hub.publish("echo", { ...s, centerX: s.centerX + 1 });
    });
    hub.publish("gesture", { centerX: 200, centerY: 100, zoom: 1 });
    expect(calls).toBe(1);
    expect(hub.state.centerX).toBe(200);
  });

  it("drops a publish equal to the current state", () => {
    const hub = new SyncHub(START);
    let calls = 0;
    hub.subscribe(() => calls++);
    hub.publish("gesture", { ...START });
    expect(calls).toBe(0);
  });

  it("is last-writer-wins over a rapid stream", () => {
    const hub = new SyncHub(START);
    const finals: number[] = [];
    hub.subscribe((s) => finals.push(s.centerX));
    for (let i = 1; i <= 50; i++) {
      hub.publish("gesture", { centerX: 100 + i, centerY: 100, zoom: 1 });
    }
    expect(hub.state.centerX).toBe(150);
    expect(finals[finals.length - 1]).toBe(150);
  });

  it("supports unsubscribe", () => {
    const hub = new SyncHub(START);
    let calls = 0;
    const off = hub.subscribe(() => calls++);
    hub.publish("a", { centerX: 1, centerY: 1, zoom: 1 });
    off();
    hub.publish("b", { centerX: 2, centerY: 2, zoom: 1 });
    expect(calls).toBe(1);
  });
});
