/**
 * Typed client for the evaluation service HTTP API.
 *
 * Every response is schema-checked before it reaches the app. The item
 * parser rejects unexpected keys outright: the blinding contract says
 * no field correlated with side assignment may reach the client, so an
 * unknown field is treated as a protocol error, not ignored.
 */

export type Choice = 'LeftWin' | 'RightWin' | 'SimilarQuality' | 'NearlyIdentical';

export interface ItemView {
  item_id: string;
  index: number;
  total: number;
  raw: string;
  synthetic: string;
  image_ref: string;
  left: string;
  right: string;
}

export type NextResponse =
  | { done: true; judged: number; total: number }
  | { done: false; judged: number; item: ItemView };

export interface SubmitResponse {
  ok: boolean;
  judged: number;
  total: number;
}

export interface TallyResponse {
  a_win: number;
  b_win: number;
  similar: number;
  identical: number;
  judgments: number;
  session_id: string;
  system_a: string;
  system_b: string;
  total_items: number;
}

export interface SessionSummary {
  session_id: string;
  system_a: string;
  system_b: string;
  total: number;
  judgments: number;
}

export class DuplicateJudgmentError extends Error {
  constructor() {
    super('judgment already recorded');
  }
}

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

const ITEM_KEYS = new Set([
  'item_id',
  'index',
  'total',
  'raw',
  'synthetic',
  'image_ref',
  'left',
  'right',
]);

export function parseItem(value: unknown): ItemView {
  if (typeof value !== 'object' || value === null) {
    throw new ApiError('item payload is not an object');
  }
  const record = value as Record<string, unknown>;
  for (const key of Object.keys(record)) {
    if (!ITEM_KEYS.has(key)) {
      throw new ApiError(`unexpected field in item payload: ${key}`);
    }
  }
  for (const key of ['item_id', 'raw', 'synthetic', 'image_ref', 'left', 'right']) {
    if (typeof record[key] !== 'string') {
      throw new ApiError(`item payload field ${key} is not a string`);
    }
  }
  for (const key of ['index', 'total']) {
    if (typeof record[key] !== 'number') {
      throw new ApiError(`item payload field ${key} is not a number`);
    }
  }
  return record as unknown as ItemView;
}

export function parseNext(value: unknown): NextResponse {
  if (typeof value !== 'object' || value === null) {
    throw new ApiError('next payload is not an object');
  }
  const record = value as Record<string, unknown>;
  if (record.done === true) {
    return {
      done: true,
      judged: Number(record.judged ?? 0),
      total: Number(record.total ?? 0),
    };
  }
  if (record.done === false) {
    return {
      done: false,
      judged: Number(record.judged ?? 0),
      item: parseItem(record.item),
    };
  }
  throw new ApiError('next payload has no done flag');
}

export class EvalApi {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async get(path: string): Promise<unknown> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`);
    } catch (err) {
      throw new ApiError(`network failure: ${String(err)}`);
    }
    if (!response.ok) {
      throw new ApiError(`request failed (${response.status})`, response.status);
    }
    return response.json();
  }

  async listSessions(): Promise<SessionSummary[]> {
    const payload = (await this.get('/sessions')) as { sessions?: SessionSummary[] };
    return payload.sessions ?? [];
  }

  async next(sessionId: string, annotator: string): Promise<NextResponse> {
    const query = new URLSearchParams({ annotator });
    return parseNext(
      await this.get(`/sessions/${encodeURIComponent(sessionId)}/next?${query}`),
    );
  }

  async submit(
    sessionId: string,
    itemId: string,
    choice: Choice,
    annotator: string,
  ): Promise<SubmitResponse> {
    let response: Response;
    try {
      response = await this.fetchFn(
        `${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}/judgments`,
        {
          method: 'POST',
          headers: { 'Content-Type': 'application/json' },
          body: JSON.stringify({ item_id: itemId, choice, annotator }),
        },
      );
    } catch (err) {
      throw new ApiError(`network failure: ${String(err)}`);
    }
    if (response.status === 409) {
      throw new DuplicateJudgmentError();
    }
    if (!response.ok) {
      throw new ApiError(`submit failed (${response.status})`, response.status);
    }
    return (await response.json()) as SubmitResponse;
  }

  async tally(sessionId: string): Promise<TallyResponse> {
    return (await this.get(
      `/sessions/${encodeURIComponent(sessionId)}/tally`,
    )) as TallyResponse;
  }
}
