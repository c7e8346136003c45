/**
 * DOM rendering. Captions are only ever labeled Left/Right; system
 * names appear solely on the aggregate tally screen.
 */

import type { SessionSummary, TallyResponse } from './api.js';
import { CHOICE_LABELS, type ViewState } from './state.js';

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderApp(root: HTMLElement, state: ViewState): void {
  const doc = root.ownerDocument;
  root.textContent = '';

  const header = el(doc, 'header', 'topbar');
  header.appendChild(el(doc, 'h1', 'title', 'Caption comparison'));
  const progress = el(doc, 'div', 'progress');
  progress.setAttribute('data-testid', 'progress');
  progress.textContent = state.total ? `${state.judged}/${state.total}` : '';
  header.appendChild(progress);
  root.appendChild(header);

  if (state.error) {
    const banner = el(doc, 'div', 'banner error', `${state.error} `);
    banner.setAttribute('data-testid', 'error-banner');
    const retry = el(doc, 'button', 'retry', 'Retry');
    retry.setAttribute('data-action', 'retry');
    banner.appendChild(retry);
    root.appendChild(banner);
  }

  if (state.lastAck) {
    const ack = el(doc, 'div', 'banner ack', state.lastAck);
    ack.setAttribute('data-testid', 'ack');
    root.appendChild(ack);
  }

  if (state.screen === 'loading') {
    root.appendChild(el(doc, 'p', 'status', 'Loading…'));
    return;
  }

  if (state.screen === 'done') {
    const done = el(doc, 'section', 'done');
    done.appendChild(el(doc, 'h2', undefined, 'All items judged'));
    done.appendChild(
      el(doc, 'p', undefined, `You judged ${state.judged} of ${state.total} items.`),
    );
    const link = el(doc, 'button', 'primary', 'View results');
    link.setAttribute('data-action', 'view-tally');
    done.appendChild(link);
    root.appendChild(done);
    return;
  }

  if (state.screen !== 'item' || state.item === null) {
    return;
  }

  const item = state.item;
  const context = el(doc, 'section', 'context');
  context.setAttribute('data-testid', 'context');
  const rawBlock = el(doc, 'div', 'context-block');
  rawBlock.appendChild(el(doc, 'h3', undefined, 'Web caption'));
  rawBlock.appendChild(el(doc, 'p', 'caption-text', item.raw));
  const synBlock = el(doc, 'div', 'context-block');
  synBlock.appendChild(el(doc, 'h3', undefined, 'Model caption'));
  synBlock.appendChild(el(doc, 'p', 'caption-text', item.synthetic));
  context.appendChild(rawBlock);
  context.appendChild(synBlock);
  if (item.image_ref) {
    const ref = el(doc, 'p', 'image-ref');
    const anchor = el(doc, 'a', undefined, item.image_ref);
    anchor.setAttribute('href', item.image_ref);
    anchor.setAttribute('rel', 'noreferrer');
    anchor.setAttribute('target', '_blank');
    ref.appendChild(anchor);
    context.appendChild(ref);
  }
  root.appendChild(context);

  const panes = el(doc, 'section', 'panes');
  const leftPane = el(doc, 'div', 'pane');
  leftPane.setAttribute('data-testid', 'left-pane');
  leftPane.appendChild(el(doc, 'h3', undefined, 'Left'));
  leftPane.appendChild(el(doc, 'p', 'caption-text', item.left));
  const rightPane = el(doc, 'div', 'pane');
  rightPane.setAttribute('data-testid', 'right-pane');
  rightPane.appendChild(el(doc, 'h3', undefined, 'Right'));
  rightPane.appendChild(el(doc, 'p', 'caption-text', item.right));
  panes.appendChild(leftPane);
  panes.appendChild(rightPane);
  root.appendChild(panes);

  const buttons = el(doc, 'section', 'choices');
  for (const { choice, label, key } of CHOICE_LABELS) {
    const button = el(doc, 'button', 'choice', `${label} [${key}]`);
    button.setAttribute('data-choice', choice);
    if (state.inFlight) {
      button.disabled = true;
    }
    buttons.appendChild(button);
  }
  root.appendChild(buttons);
}

export function renderTally(root: HTMLElement, tally: TallyResponse): void {
  const doc = root.ownerDocument;
  root.textContent = '';
  const section = el(doc, 'section', 'tally');
  section.appendChild(el(doc, 'h2', undefined, 'Results'));
  section.appendChild(
    el(
      doc,
      'p',
      'tally-meta',
      `${tally.judgments} judgments over ${tally.total_items} items`,
    ),
  );
  const rows: Array<{ label: string; count: number }> = [
    { label: `${tally.system_a} better`, count: tally.a_win },
    { label: `${tally.system_b} better`, count: tally.b_win },
    { label: 'Similar quality', count: tally.similar },
    { label: 'Nearly identical', count: tally.identical },
  ];
  const max = Math.max(1, ...rows.map((row) => row.count));
  for (const row of rows) {
    const line = el(doc, 'div', 'bar-row');
    line.appendChild(el(doc, 'span', 'bar-label', row.label));
    const bar = el(doc, 'div', 'bar');
    bar.setAttribute('data-testid', 'tally-bar');
    bar.setAttribute('data-count', String(row.count));
    bar.style.width = `${(100 * row.count) / max}%`;
    const value = el(doc, 'span', 'bar-count', String(row.count));
    line.appendChild(bar);
    line.appendChild(value);
    section.appendChild(line);
  }
  root.appendChild(section);
}

export function renderSessionPicker(root: HTMLElement, sessions: SessionSummary[]): void {
  const doc = root.ownerDocument;
  root.textContent = '';
  const section = el(doc, 'section', 'picker');
  section.appendChild(el(doc, 'h2', undefined, 'Pick a session'));
  if (!sessions.length) {
    section.appendChild(el(doc, 'p', undefined, 'No sessions on this server yet.'));
  }
  for (const session of sessions) {
    const button = el(
      doc,
      'button',
      'session',
      `${session.session_id} (${session.judgments}/${session.total} judged)`,
    );
    button.setAttribute('data-session', session.session_id);
    section.appendChild(button);
  }
  root.appendChild(section);
}
