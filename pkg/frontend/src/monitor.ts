/**
 * Poll-state machine for live monitoring: one-second ticks, a stale-data
 * banner after a network failure, transparent resume on reconnect.
 */

export const POLL_INTERVAL_MS = 1000;

export interface PollState {
  stale: boolean;
  consecutiveFailures: number;
  lastSuccessAt: number | null;
}

export function initialPollState(): PollState {
  return { stale: false, consecutiveFailures: 0, lastSuccessAt: null };
}

export function applyPollSuccess(state: PollState, now: number): PollState {
  return { stale: false, consecutiveFailures: 0, lastSuccessAt: now };
}

export function applyPollFailure(state: PollState): PollState {
  return {
    stale: true,
    consecutiveFailures: state.consecutiveFailures + 1,
    lastSuccessAt: state.lastSuccessAt,
  };
}

export function staleBannerText(state: PollState): string | null {
  if (!state.stale) {
    return null;
  }
  if (state.lastSuccessAt === null) {
    return "No data from the gateway yet; retrying every second.";
  }
  return "Connection lost; showing the last known state. Retrying every second.";
}
