// Canned service payloads and a scripted transport. The bodies mirror
// what the service returns for a two-layer procedures/findings map, cut
// down to what the tests need.

import { HttpReply, Transport } from '../src/api.js';
import { MapBody, ObjectList, TreeResponse } from '../src/types.js';

export const MAP_FRESH: MapBody = {
  map_id: 'm1',
  measure: 'interest_factor',
  delta: 1.0,
  scorer: 'hits',
  contingency: 'standard',
  query: ['repair'],
  layers: [
    {
      dimension: 'Health_Procedures',
      source: 'category:1',
      balls: [
        { concept: 'operation', label: 'Operation', relevance: 14, state: 'query-match' },
        { concept: 'implantation', label: 'Implantation', relevance: 6, state: 'normal' },
      ],
    },
    {
      dimension: 'Finding',
      source: 'category:1',
      balls: [
        { concept: 'death', label: 'Death', relevance: 7, state: 'normal' },
        { concept: 'recovery', label: 'Recovery', relevance: 9, state: 'normal' },
        { concept: 'complication', label: 'Complication', relevance: 3, state: 'normal' },
      ],
    },
  ],
  bridges: [
    {
      layer_pair: [0, 1],
      items: [
        { from: 'operation', to: 'death', score: 2.17 },
        { from: 'operation', to: 'recovery', score: 1.42 },
        { from: 'implantation', to: 'recovery', score: 1.08 },
      ],
    },
  ],
};

export const MAP_EXPANDED: MapBody = {
  ...MAP_FRESH,
  layers: [
    {
      dimension: 'Health_Procedures',
      source: 'category:1',
      balls: [
        { concept: 'cardio_ops', label: 'Cardiovascular Operations', relevance: 9, state: 'expanded-child' },
        { concept: 'intubation', label: 'Intubation', relevance: 4, state: 'expanded-child' },
        { concept: 'implantation', label: 'Implantation', relevance: 6, state: 'normal' },
      ],
    },
    MAP_FRESH.layers[1]!,
  ],
  bridges: [
    {
      layer_pair: [0, 1],
      items: [
        { from: 'cardio_ops', to: 'death', score: 2.4 },
        { from: 'cardio_ops', to: 'recovery', score: 1.31 },
        { from: 'implantation', to: 'recovery', score: 1.08 },
      ],
    },
  ],
};

export const MAP_KEPT: MapBody = {
  ...MAP_FRESH,
  layers: [
    {
      dimension: 'Health_Procedures',
      source: 'category:1',
      balls: [
        { concept: 'operation', label: 'Operation', relevance: 14, state: 'query-match' },
      ],
    },
    {
      dimension: 'Finding',
      source: 'category:1',
      balls: [
        { concept: 'death', label: 'Death', relevance: 7, state: 'normal' },
        { concept: 'recovery', label: 'Recovery', relevance: 9, state: 'normal' },
      ],
    },
  ],
  bridges: [
    {
      layer_pair: [0, 1],
      items: [
        { from: 'operation', to: 'death', score: 2.17 },
        { from: 'operation', to: 'recovery', score: 1.42 },
      ],
    },
  ],
};

export const MAP_REMOVED: MapBody = {
  ...MAP_FRESH,
  layers: [
    MAP_FRESH.layers[0]!,
    {
      dimension: 'Finding',
      source: 'category:1',
      balls: [
        { concept: 'death', label: 'Death', relevance: 7, state: 'normal' },
        { concept: 'complication', label: 'Complication', relevance: 3, state: 'normal' },
      ],
    },
  ],
  bridges: [
    {
      layer_pair: [0, 1],
      items: [{ from: 'operation', to: 'death', score: 2.17 }],
    },
  ],
};

export const CONCEPT_OBJECTS: ObjectList = {
  items: [
    { doc_id: 'd01', object_type: 'publication', relevance: 0.91, link: 'https://example.org/pubmed/d01' },
    { doc_id: 'p17', object_type: 'patient_record', relevance: 0.74 },
    { doc_id: 'd04', object_type: 'publication', relevance: 0.55, link: 'https://example.org/pubmed/d04' },
    { doc_id: 'p03', object_type: 'patient_record', relevance: 0.21 },
  ],
};

export const BRIDGE_OBJECTS: ObjectList = {
  items: [
    { doc_id: 'd01', object_type: 'publication', relevance: 0.25 },
    { doc_id: 'd02', object_type: 'publication', relevance: 0.25 },
    { doc_id: 'd03', object_type: 'publication', relevance: 0.2 },
  ],
};

export const TREE: TreeResponse = {
  dimensions: [
    {
      id: 'Health_Procedures',
      name: 'Health_Procedures',
      categories: [
        { index: 0, concepts: [{ id: 'hp_root', label: 'Health Procedures' }] },
        {
          index: 1,
          concepts: [
            { id: 'operation', label: 'Operation' },
            { id: 'implantation', label: 'Implantation' },
          ],
        },
      ],
    },
    {
      id: 'Finding',
      name: 'Finding',
      categories: [
        { index: 0, concepts: [{ id: 'f_root', label: 'Finding' }] },
        {
          index: 1,
          concepts: [
            { id: 'death', label: 'Death' },
            { id: 'recovery', label: 'Recovery' },
            { id: 'complication', label: 'Complication' },
          ],
        },
      ],
    },
  ],
};

type Scripted =
  | unknown
  | { status: number; json: unknown }
  | (() => Promise<unknown | { status: number; json: unknown }>);

/**
 * Transport keyed by "METHOD path". A route value may be a payload, a
 * {status, json} pair, a function returning either (possibly gated on a
 * promise), or an array consumed one call at a time. Every request is
 * appended to calls.
 */
export function scriptedTransport(
  routes: Record<string, Scripted | Scripted[]>,
  calls: string[] = [],
): Transport {
  const reply = (value: unknown): HttpReply => {
    const wrapped = value as { status?: number; json?: unknown };
    if (
      wrapped !== null &&
      typeof wrapped === 'object' &&
      typeof wrapped.status === 'number' &&
      'json' in wrapped
    ) {
      return { status: wrapped.status, body: JSON.stringify(wrapped.json) };
    }
    return { status: 200, body: JSON.stringify(value) };
  };
  return async (method, url, _body) => {
    const path = url.replace(/^https?:\/\/[^/]+/, '');
    const key = `${method} ${path}`;
    calls.push(key);
    let route = routes[key];
    if (Array.isArray(route)) route = route.length > 1 ? route.shift() : route[0];
    if (route === undefined) {
      return {
        status: 404,
        body: JSON.stringify({
          error: { code: 'no-route', message: `no script for ${key}`, context: {} },
        }),
      };
    }
    if (typeof route === 'function') {
      return reply(await (route as () => Promise<unknown>)());
    }
    return reply(route);
  };
}
