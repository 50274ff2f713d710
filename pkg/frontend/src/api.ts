/**
 * HTTP client for the map service.
 *
 * One base URL, one transport. The transport is a plain function so tests
 * can swap in a canned one without touching fetch. Every non-2xx reply is
 * decoded into an ApiError carrying the server's error envelope.
 */

import {
  MapBody,
  MapRequest,
  ObjectList,
  TreeResponse,
} from './types.js';

export interface HttpReply {
  status: number;
  body: string;
}

export type Transport = (
  method: string,
  url: string,
  body?: string,
) => Promise<HttpReply>;

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly context: Record<string, unknown>;

  constructor(
    status: number,
    code: string,
    message: string,
    context: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = 'ApiError';
    this.status = status;
    this.code = code;
    this.context = context;
  }
}

export function fetchTransport(): Transport {
  return async (method, url, body) => {
    const reply = await fetch(url, {
      method,
      headers:
        body === undefined ? undefined : { 'content-type': 'application/json' },
      body,
    });
    return { status: reply.status, body: await reply.text() };
  };
}

function queryString(params: Record<string, string | number | undefined>): string {
  const parts: string[] = [];
  for (const [key, value] of Object.entries(params)) {
    if (value === undefined) continue;
    parts.push(`${encodeURIComponent(key)}=${encodeURIComponent(String(value))}`);
  }
  return parts.length ? `?${parts.join('&')}` : '';
}

export interface ObjectFilter {
  type?: string;
  limit?: number;
}

export class MapServiceClient {
  private readonly endpoint: string;
  private readonly transport: Transport;

  constructor(endpoint: string, transport: Transport = fetchTransport()) {
    this.endpoint = endpoint.replace(/\/+$/, '');
    this.transport = transport;
  }

  tree(): Promise<TreeResponse> {
    return this.get('/tree');
  }

  createMap(request: MapRequest): Promise<MapBody> {
    return this.post('/maps', request);
  }

  getMap(mapId: string): Promise<MapBody> {
    return this.get(`/maps/${encodeURIComponent(mapId)}`);
  }

  drillDown(mapId: string, concept: string, layer?: number): Promise<MapBody> {
    return this.operate(mapId, 'drill-down', concept, layer);
  }

  rollUp(mapId: string, concept: string, layer?: number): Promise<MapBody> {
    return this.operate(mapId, 'roll-up', concept, layer);
  }

  keepOnly(mapId: string, concept: string, layer?: number): Promise<MapBody> {
    return this.operate(mapId, 'keep-only', concept, layer);
  }

  remove(mapId: string, concept: string, layer?: number): Promise<MapBody> {
    return this.operate(mapId, 'remove', concept, layer);
  }

  conceptObjects(
    mapId: string,
    concept: string,
    filter: ObjectFilter = {},
  ): Promise<ObjectList> {
    const path =
      `/maps/${encodeURIComponent(mapId)}` +
      `/concepts/${encodeURIComponent(concept)}/objects` +
      queryString({ type: filter.type, limit: filter.limit });
    return this.get(path);
  }

  bridgeObjects(
    mapId: string,
    from: string,
    to: string,
    filter: ObjectFilter = {},
  ): Promise<ObjectList> {
    const path =
      `/maps/${encodeURIComponent(mapId)}/bridges/objects` +
      queryString({ from, to, type: filter.type, limit: filter.limit });
    return this.get(path);
  }

  private operate(
    mapId: string,
    op: string,
    concept: string,
    layer?: number,
  ): Promise<MapBody> {
    const body: Record<string, unknown> = { concept };
    if (layer !== undefined) body.layer = layer;
    return this.post(`/maps/${encodeURIComponent(mapId)}/${op}`, body);
  }

  private async get<T>(path: string): Promise<T> {
    return decode<T>(await this.transport('GET', this.endpoint + path));
  }

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const reply = await this.transport(
      'POST',
      this.endpoint + path,
      JSON.stringify(payload),
    );
    return decode<T>(reply);
  }
}

function decode<T>(reply: HttpReply): T {
  let parsed: unknown = null;
  if (reply.body !== '') {
    try {
      parsed = JSON.parse(reply.body);
    } catch {
      parsed = null;
    }
  }
  if (reply.status >= 200 && reply.status < 300) {
    if (parsed === null) {
      throw new ApiError(reply.status, 'bad-payload', 'unparseable response body');
    }
    return parsed as T;
  }
  const envelope = parsed as { error?: { code?: string; message?: string; context?: Record<string, unknown> } } | null;
  const detail = envelope && envelope.error ? envelope.error : undefined;
  throw new ApiError(
    reply.status,
    detail?.code ?? 'http-error',
    detail?.message ?? `request failed with status ${reply.status}`,
    detail?.context ?? {},
  );
}
