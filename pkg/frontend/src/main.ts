/** Bootstrap: session from ?session=, annotator from ?annotator= (or prompt). */

import { EvalApi } from './api.js';
import { App } from './app.js';
import { renderSessionPicker } from './view.js';

function annotatorName(params: URLSearchParams): string {
  const fromQuery = params.get('annotator');
  if (fromQuery) return fromQuery;
  const typed = window.prompt('Annotator name?', 'annotator-1');
  return typed || 'annotator-1';
}

async function boot(): Promise<void> {
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app mount point');
  const params = new URLSearchParams(window.location.search);
  const api = new EvalApi('');
  const sessionId = params.get('session');

  if (!sessionId) {
    const sessions = await api.listSessions();
    renderSessionPicker(root, sessions);
    root.addEventListener('click', (event) => {
      const target = event.target as HTMLElement | null;
      const picked = target?.getAttribute('data-session');
      if (picked) {
        const next = new URL(window.location.href);
        next.searchParams.set('session', picked);
        window.location.href = next.toString();
      }
    });
    return;
  }

  const app = new App(api, root, sessionId, annotatorName(params));
  await app.start();
}

void boot();
