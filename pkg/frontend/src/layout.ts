// Placement of balls inside one stratum. The server says nothing about
// where a ball sits, so the only hard requirement on the rule here is
// determinism: the same map body must land every ball on the same spot
// no matter what order the JSON listed them in.
//
// The rule: walk a square-ish grid in id-hash order, then run a single
// nudge pass that pulls each ball toward the mean position of its
// bridge partners in the neighbouring strata. Nudges are clamped well
// below the grid pitch so cells cannot collide.

import { MapBody } from './types.js';

export interface BallSpot {
  x: number;
  z: number;
}

export interface PlaneLayout {
  width: number;
  depth: number;
  spots: Map<string, BallSpot>;
}

export const CELL = 130;
const NUDGE_LIMIT = 0.32 * CELL;

/** FNV-1a, 32 bit. Enough to shuffle ids stably. */
export function hashId(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

function gridPlane(ids: string[]): PlaneLayout {
  const order = [...ids].sort(
    (a, b) => hashId(a) - hashId(b) || (a < b ? -1 : 1),
  );
  const count = Math.max(order.length, 1);
  const cols = Math.ceil(Math.sqrt(count));
  const rows = Math.ceil(count / cols);
  const width = cols * CELL;
  const depth = rows * CELL;
  const spots = new Map<string, BallSpot>();
  order.forEach((id, i) => {
    spots.set(id, {
      x: (i % cols + 0.5) * CELL - width / 2,
      z: (Math.floor(i / cols) + 0.5) * CELL - depth / 2,
    });
  });
  return { width, depth, spots };
}

function clamp(value: number, limit: number): number {
  return Math.min(limit, Math.max(-limit, value));
}

/**
 * Lay out every layer of the map. Grid first, then one bridge-aware
 * nudge pass computed entirely from the grid positions, which keeps the
 * result independent of iteration order.
 */
export function layoutMap(map: MapBody): PlaneLayout[] {
  const planes = map.layers.map((layer) =>
    gridPlane(layer.balls.map((ball) => ball.concept)),
  );

  // partner grid positions per (layer, concept)
  const partners = new Map<string, BallSpot[]>();
  const note = (layer: number, concept: string, spot: BallSpot | undefined) => {
    if (!spot) return;
    const key = `${layer}:${concept}`;
    const bucket = partners.get(key);
    if (bucket) bucket.push(spot);
    else partners.set(key, [spot]);
  };
  for (const group of map.bridges) {
    const [i, j] = group.layer_pair;
    const near = planes[i];
    const far = planes[j];
    if (!near || !far) continue;
    for (const item of group.items) {
      note(i, item.from, far.spots.get(item.to));
      note(j, item.to, near.spots.get(item.from));
    }
  }

  return planes.map((plane, layerIndex) => {
    const spots = new Map<string, BallSpot>();
    for (const [id, spot] of plane.spots) {
      const pull = partners.get(`${layerIndex}:${id}`);
      if (!pull || pull.length === 0) {
        spots.set(id, spot);
        continue;
      }
      let meanX = 0;
      let meanZ = 0;
      for (const p of pull) {
        meanX += p.x;
        meanZ += p.z;
      }
      meanX /= pull.length;
      meanZ /= pull.length;
      spots.set(id, {
        x: spot.x + clamp(meanX - spot.x, NUDGE_LIMIT),
        z: spot.z + clamp(meanZ - spot.z, NUDGE_LIMIT),
      });
    }
    return { width: plane.width, depth: plane.depth, spots };
  });
}
