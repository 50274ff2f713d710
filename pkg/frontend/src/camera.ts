// Camera over the stacked-plane world. The map itself lives in world
// space (x across, y up through the strata, z into the screen); the
// camera contributes yaw around the vertical axis, a fixed-style pitch,
// a zoom factor on the focal length and a screen-space pan. Rotate,
// zoom and shift never touch the map, they only move the viewpoint.

export interface Camera {
  yaw: number;
  pitch: number;
  zoom: number;
  panX: number;
  panY: number;
}

export const DEFAULT_CAMERA: Camera = {
  yaw: -0.5,
  pitch: 0.42,
  zoom: 1,
  panX: 0,
  panY: 0,
};

export const FOCAL = 1500;
export const VIEW_DISTANCE = 1700;

const ZOOM_MIN = 0.4;
const ZOOM_MAX = 3.2;
const PITCH_MIN = 0.05;
const PITCH_MAX = 1.2;

export function rotated(camera: Camera, dYaw: number, dPitch = 0): Camera {
  const pitch = Math.min(PITCH_MAX, Math.max(PITCH_MIN, camera.pitch + dPitch));
  return { ...camera, yaw: camera.yaw + dYaw, pitch };
}

export function zoomed(camera: Camera, factor: number): Camera {
  const zoom = Math.min(ZOOM_MAX, Math.max(ZOOM_MIN, camera.zoom * factor));
  return { ...camera, zoom };
}

export function shifted(camera: Camera, dx: number, dy: number): Camera {
  return { ...camera, panX: camera.panX + dx, panY: camera.panY + dy };
}

export interface Point3 {
  x: number;
  y: number;
  z: number;
}

export interface Projected {
  x: number;
  y: number;
  /** Pixels per world unit at this depth, already including zoom. */
  scale: number;
  depth: number;
}

/**
 * Perspective projection into a viewport of the given size. Yaw first,
 * then pitch, then the perspective divide. World +y points up, so the
 * screen y axis is flipped.
 */
export function project(
  camera: Camera,
  point: Point3,
  viewWidth: number,
  viewHeight: number,
): Projected {
  const cy = Math.cos(camera.yaw);
  const sy = Math.sin(camera.yaw);
  const x1 = point.x * cy + point.z * sy;
  const z1 = -point.x * sy + point.z * cy;

  const cp = Math.cos(camera.pitch);
  const sp = Math.sin(camera.pitch);
  const y2 = point.y * cp - z1 * sp;
  const z2 = point.y * sp + z1 * cp;

  const depth = z2 + VIEW_DISTANCE;
  const scale = (FOCAL * camera.zoom) / depth;
  return {
    x: viewWidth / 2 + x1 * scale + camera.panX,
    y: viewHeight / 2 - y2 * scale + camera.panY,
    scale,
    depth,
  };
}
