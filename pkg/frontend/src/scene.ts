/**
 * View model for one paint of the map.
 *
 * buildScene is a pure function of (map body, camera, selection): same
 * inputs, same scene, down to the rounded coordinates. That is what
 * keeps the client stateless. The body the server returned is the only
 * authority; nothing in here feeds back into it.
 */

import { Camera, Point3, project } from './camera.js';
import { layoutMap } from './layout.js';
import { BallState, MapBody } from './types.js';

export const VIEW_WIDTH = 960;
export const VIEW_HEIGHT = 640;

const LAYER_GAP = 300;
const PLANE_MARGIN = 60;
const RADIUS_MIN = 11;
const RADIUS_MAX = 36;

// The three ball states and nothing else. Fill values are the literal
// SVG named colors.
export const BALL_COLORS: Record<BallState, string> = {
  normal: 'blue',
  'expanded-child': 'red',
  'query-match': 'green',
};

const BALL_STROKES: Record<BallState, string> = {
  normal: '#101f66',
  'expanded-child': '#6b0f0f',
  'query-match': '#0c4a1c',
};

export interface SceneBall {
  kind: 'ball';
  concept: string;
  label: string;
  layer: number;
  state: BallState;
  relevance: number;
  x: number;
  y: number;
  r: number;
  fontSize: number;
  fill: string;
  stroke: string;
  selected: boolean;
  depth: number;
}

export interface SceneBridge {
  kind: 'bridge';
  from: string;
  to: string;
  layerPair: [number, number];
  score: number;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  width: number;
  opacity: number;
  depth: number;
}

export interface ScenePlane {
  kind: 'plane';
  layer: number;
  dimension: string;
  source: string;
  points: string;
  labelX: number;
  labelY: number;
  fontSize: number;
  depth: number;
}

export type SceneElement = ScenePlane | SceneBridge | SceneBall;

export interface Scene {
  width: number;
  height: number;
  elements: SceneElement[];
}

export interface Selection {
  concept: string;
  layer: number;
}

function round2(value: number): number {
  const r = Math.round(value * 100) / 100;
  return r === 0 ? 0 : r;
}

function round3(value: number): number {
  const r = Math.round(value * 1000) / 1000;
  return r === 0 ? 0 : r;
}

/**
 * Model radius before any projection. Strictly increasing in relevance
 * within one layer; normalized against the layer maximum so every layer
 * uses the full size range.
 */
export function ballRadius(relevance: number, layerMax: number): number {
  if (layerMax <= 0) return RADIUS_MIN;
  const clamped = Math.min(Math.max(relevance, 0), layerMax);
  return RADIUS_MIN + (RADIUS_MAX - RADIUS_MIN) * Math.sqrt(clamped / layerMax);
}

/** Thickness and opacity both rise with the bridge score. */
export function bridgeStyle(
  score: number,
  minScore: number,
  maxScore: number,
): { width: number; opacity: number } {
  const t = maxScore > minScore ? (score - minScore) / (maxScore - minScore) : 1;
  return {
    width: round2(0.8 + 2.6 * t),
    opacity: round3(0.3 + 0.55 * t),
  };
}

function kindRank(element: SceneElement): number {
  if (element.kind === 'plane') return 0;
  if (element.kind === 'bridge') return 1;
  return 2;
}

function elementKey(element: SceneElement): string {
  if (element.kind === 'plane') return `p${element.layer}`;
  if (element.kind === 'bridge') {
    return `b${element.layerPair[0]}:${element.from}>${element.to}`;
  }
  return `c${element.layer}:${element.concept}`;
}

export function buildScene(
  map: MapBody,
  camera: Camera,
  selection: Selection | null = null,
): Scene {
  const planes = layoutMap(map);
  const layerCount = map.layers.length;
  const elements: SceneElement[] = [];
  const centers = new Map<string, { x: number; y: number; depth: number }>();

  map.layers.forEach((layer, layerIndex) => {
    const plane = planes[layerIndex];
    if (!plane) return;
    const worldY = ((layerCount - 1) / 2 - layerIndex) * LAYER_GAP;
    const halfW = plane.width / 2 + PLANE_MARGIN;
    const halfD = plane.depth / 2 + PLANE_MARGIN;

    const corners: Point3[] = [
      { x: -halfW, y: worldY, z: -halfD },
      { x: halfW, y: worldY, z: -halfD },
      { x: halfW, y: worldY, z: halfD },
      { x: -halfW, y: worldY, z: halfD },
    ];
    const projected = corners.map((c) =>
      project(camera, c, VIEW_WIDTH, VIEW_HEIGHT),
    );
    const center = project(
      camera,
      { x: 0, y: worldY, z: 0 },
      VIEW_WIDTH,
      VIEW_HEIGHT,
    );
    const head = projected[0];
    if (!head) return;
    elements.push({
      kind: 'plane',
      layer: layerIndex,
      dimension: layer.dimension,
      source: layer.source,
      points: projected
        .map((p) => `${round2(p.x)},${round2(p.y)}`)
        .join(' '),
      labelX: round2(head.x),
      labelY: round2(head.y - 8 * center.scale),
      fontSize: round2(Math.min(18, Math.max(10, 15 * center.scale))),
      depth: round2(center.depth),
    });

    // A shared per-plane scale for the radii. Scaling each ball by its
    // own depth would let perspective break the size ordering inside a
    // layer, and the ordering is the one visual rule that matters.
    const layerMax = layer.balls.reduce(
      (acc, ball) => Math.max(acc, ball.relevance),
      0,
    );
    for (const ball of layer.balls) {
      const spot = plane.spots.get(ball.concept);
      if (!spot) continue;
      const p = project(
        camera,
        { x: spot.x, y: worldY, z: spot.z },
        VIEW_WIDTH,
        VIEW_HEIGHT,
      );
      const radius = ballRadius(ball.relevance, layerMax) * center.scale;
      centers.set(`${layerIndex}:${ball.concept}`, {
        x: p.x,
        y: p.y,
        depth: p.depth,
      });
      elements.push({
        kind: 'ball',
        concept: ball.concept,
        label: ball.label,
        layer: layerIndex,
        state: ball.state,
        relevance: ball.relevance,
        x: round2(p.x),
        y: round2(p.y),
        r: round2(radius),
        fontSize: round2(Math.min(15, Math.max(9, 12 * center.scale))),
        fill: BALL_COLORS[ball.state],
        stroke: BALL_STROKES[ball.state],
        selected:
          selection !== null &&
          selection.concept === ball.concept &&
          selection.layer === layerIndex,
        depth: round2(p.depth),
      });
    }
  });

  let minScore = Infinity;
  let maxScore = -Infinity;
  for (const group of map.bridges) {
    for (const item of group.items) {
      minScore = Math.min(minScore, item.score);
      maxScore = Math.max(maxScore, item.score);
    }
  }
  for (const group of map.bridges) {
    const [i, j] = group.layer_pair;
    for (const item of group.items) {
      const a = centers.get(`${i}:${item.from}`);
      const b = centers.get(`${j}:${item.to}`);
      if (!a || !b) continue;
      const style = bridgeStyle(item.score, minScore, maxScore);
      elements.push({
        kind: 'bridge',
        from: item.from,
        to: item.to,
        layerPair: [i, j],
        score: item.score,
        x1: round2(a.x),
        y1: round2(a.y),
        x2: round2(b.x),
        y2: round2(b.y),
        width: style.width,
        opacity: style.opacity,
        depth: round2((a.depth + b.depth) / 2),
      });
    }
  }

  // painter order: far to near, planes under bridges under balls
  elements.sort((a, b) => {
    if (a.depth !== b.depth) return b.depth - a.depth;
    if (kindRank(a) !== kindRank(b)) return kindRank(a) - kindRank(b);
    return elementKey(a) < elementKey(b) ? -1 : 1;
  });

  return { width: VIEW_WIDTH, height: VIEW_HEIGHT, elements };
}
