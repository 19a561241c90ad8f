/**
 * Single source of truth for the shared view state. Any viewport can
 * publish a gesture result; every registered listener (including the
 * publisher) is told the new state. Listeners apply the state
 * programmatically, and the re-entrancy guard makes sure a listener that
 * publishes from inside its callback does not start a feedback loop.
 */

import type { ViewState } from "./viewstate.js";
import { statesEqual } from "./viewstate.js";

export type ViewStateListener = (state: ViewState, source: unknown) => void;

export class SyncHub {
  private listeners: ViewStateListener[] = [];
  private current: ViewState;
  private broadcasting = false;

  constructor(initial: ViewState) {
    this.current = initial;
  }

  get state(): ViewState {
    return this.current;
  }

  subscribe(listener: ViewStateListener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  /**
   * Adopt a new state and fan it out. Publishes that arrive while a
   * broadcast is running come from listeners reacting to the update; they
   * are dropped, which is what keeps echo loops from forming. Last writer
   * wins across a rapid gesture stream.
   */
  publish(source: unknown, next: ViewState): void {
    if (this.broadcasting) {
      return;
    }
    if (statesEqual(this.current, next)) {
      return;
    }
    this.current = next;
    this.broadcasting = true;
    try {
      for (const listener of [...this.listeners]) {
        listener(next, source);
      }
    } finally {
      this.broadcasting = false;
    }
  }
}
