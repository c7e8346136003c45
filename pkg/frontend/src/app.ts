/**
 * Controller: wires the API client, the state reducer, and the DOM.
 *
 * Submission flow per item: lock buttons, POST the judgment, then fetch
 * the next item. A duplicate (already recorded server-side) surfaces
 * briefly and auto-advances; a network failure keeps the item on screen
 * behind a retry banner, so nothing is lost locally.
 */

import { DuplicateJudgmentError, EvalApi, type Choice } from './api.js';
import { initialState, reduce, type Event, type ViewState } from './state.js';
import { renderApp, renderTally } from './view.js';

export class App {
  private state: ViewState = initialState;
  private pending: Promise<void> = Promise.resolve();
  private busy = false; // set synchronously on click; cleared after ack+advance

  constructor(
    private readonly api: EvalApi,
    private readonly root: HTMLElement,
    private readonly sessionId: string,
    private readonly annotator: string,
  ) {
    root.addEventListener('click', (event) => this.onClick(event));
    root.ownerDocument.addEventListener('keydown', (event) => this.onKey(event));
  }

  /** Resolves when the UI is idle again (tests await this). */
  idle(): Promise<void> {
    return this.pending;
  }

  start(): Promise<void> {
    return this.enqueue(() => this.fetchNext());
  }

  private enqueue(task: () => Promise<void>): Promise<void> {
    this.pending = this.pending.then(task, task);
    return this.pending;
  }

  private dispatch(event: Event): void {
    this.state = reduce(this.state, event);
    renderApp(this.root, this.state);
  }

  private async fetchNext(): Promise<void> {
    try {
      const response = await this.api.next(this.sessionId, this.annotator);
      this.dispatch({ kind: 'next_loaded', response });
    } catch (err) {
      this.dispatch({ kind: 'next_failed', message: String(err) });
    }
  }

  private async submit(choice: Choice): Promise<void> {
    const item = this.state.item;
    if (this.state.screen !== 'item' || item === null || this.state.inFlight) {
      return;
    }
    this.dispatch({ kind: 'choice_clicked', choice });
    try {
      const ack = await this.api.submit(this.sessionId, item.item_id, choice, this.annotator);
      this.dispatch({ kind: 'submit_acked', judged: ack.judged, total: ack.total });
      await this.fetchNext();
    } catch (err) {
      if (err instanceof DuplicateJudgmentError) {
        this.dispatch({ kind: 'submit_duplicate' });
        await this.fetchNext(); // auto-advance past the already-judged item
      } else {
        this.dispatch({ kind: 'submit_failed', message: String(err) });
      }
    }
  }

  private async openTally(): Promise<void> {
    try {
      const tally = await this.api.tally(this.sessionId);
      this.dispatch({ kind: 'tally_opened' });
      renderTally(this.root, tally);
    } catch (err) {
      this.dispatch({ kind: 'next_failed', message: String(err) });
    }
  }

  choose(choice: Choice): Promise<void> {
    // synchronous guard: a second click in the same tick must not queue a
    // submission that would land on the *next* item after the first ack
    if (this.busy || this.state.screen !== 'item') {
      return this.pending;
    }
    this.busy = true;
    return this.enqueue(async () => {
      try {
        await this.submit(choice);
      } finally {
        this.busy = false;
      }
    });
  }

  private onClick(event: MouseEvent): void {
    const target = event.target as HTMLElement | null;
    if (!target) return;
    const choice = target.getAttribute('data-choice') as Choice | null;
    if (choice) {
      void this.choose(choice);
      return;
    }
    const action = target.getAttribute('data-action');
    if (action === 'retry') {
      void this.enqueue(() => this.fetchNext());
    } else if (action === 'view-tally') {
      void this.enqueue(() => this.openTally());
    }
  }

  private onKey(event: KeyboardEvent): void {
    if (this.state.screen !== 'item') return;
    const found = { '1': 'LeftWin', '2': 'RightWin', '3': 'SimilarQuality', '4': 'NearlyIdentical' }[
      event.key
    ] as Choice | undefined;
    if (found) {
      void this.choose(found);
    }
  }
}
