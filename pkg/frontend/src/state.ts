/**
 * View state as a pure reducer over server responses and clicks.
 *
 * Replaying the same event sequence always yields the same states, so
 * rendering is a pure function of (server responses, click log). No
 * state is persisted client-side; the server log is the truth.
 */

import type { Choice, ItemView, NextResponse } from './api.js';

export interface ViewState {
  screen: 'loading' | 'item' | 'done' | 'tally';
  item: ItemView | null;
  judged: number;
  total: number;
  inFlight: boolean; // a submission is outstanding; buttons locked
  lastAck: string | null;
  error: string | null; // retryable error banner text
}

export type Event =
  | { kind: 'next_loaded'; response: NextResponse }
  | { kind: 'next_failed'; message: string }
  | { kind: 'choice_clicked'; choice: Choice }
  | { kind: 'submit_acked'; judged: number; total: number }
  | { kind: 'submit_duplicate' }
  | { kind: 'submit_failed'; message: string }
  | { kind: 'tally_opened' };

export const initialState: ViewState = {
  screen: 'loading',
  item: null,
  judged: 0,
  total: 0,
  inFlight: false,
  lastAck: null,
  error: null,
};

export function reduce(state: ViewState, event: Event): ViewState {
  switch (event.kind) {
    case 'next_loaded': {
      const response = event.response;
      if (response.done) {
        return {
          ...state,
          screen: 'done',
          item: null,
          judged: response.judged,
          total: response.total,
          inFlight: false,
          error: null,
        };
      }
      return {
        ...state,
        screen: 'item',
        item: response.item,
        judged: response.judged,
        total: response.item.total,
        inFlight: false,
        error: null,
      };
    }
    case 'next_failed':
      return { ...state, error: event.message, inFlight: false };
    case 'choice_clicked':
      // ignored unless an item is shown and nothing is in flight
      if (state.screen !== 'item' || state.inFlight || state.item === null) {
        return state;
      }
      return { ...state, inFlight: true, lastAck: null, error: null };
    case 'submit_acked':
      return {
        ...state,
        inFlight: false,
        judged: event.judged,
        total: event.total,
        lastAck: 'recorded',
      };
    case 'submit_duplicate':
      return { ...state, inFlight: false, lastAck: 'already recorded' };
    case 'submit_failed':
      // the displayed item is kept; the annotator can retry
      return { ...state, inFlight: false, error: event.message };
    case 'tally_opened':
      return { ...state, screen: 'tally', error: null };
  }
}

export const CHOICE_LABELS: ReadonlyArray<{ choice: Choice; label: string; key: string }> = [
  { choice: 'LeftWin', label: 'Left better', key: '1' },
  { choice: 'RightWin', label: 'Right better', key: '2' },
  { choice: 'SimilarQuality', label: 'Similar quality', key: '3' },
  { choice: 'NearlyIdentical', label: 'Nearly identical', key: '4' },
];
