// Coordinate helpers for the top-down room editor.

import type { Vec3 } from "./types";

export const WALL_MARGIN_M = 0.1;

/** Clamp a dragged position strictly inside the room, margin per axis. */
export function clampDrag(pos: Vec3, dims: Vec3, margin = WALL_MARGIN_M): Vec3 {
  const clampAxis = (x: number, dim: number) =>
    Math.min(Math.max(x, margin), dim - margin);
  return [clampAxis(pos[0], dims[0]), clampAxis(pos[1], dims[1]), clampAxis(pos[2], dims[2])];
}

export interface Viewport {
  scale: number; // pixels per meter
  offsetX: number; // letterbox origin in canvas pixels
  offsetY: number;
  drawWidth: number;
  drawHeight: number;
}

/** Aspect-preserving letterbox of the room's floor plan into a canvas. */
export function fitViewport(
  dims: Vec3,
  canvasWidth: number,
  canvasHeight: number,
): Viewport {
  if (canvasWidth <= 0 || canvasHeight <= 0) {
    throw new Error("canvas must have nonzero size");
  }
  const scale = Math.min(canvasWidth / dims[0], canvasHeight / dims[1]);
  const drawWidth = dims[0] * scale;
  const drawHeight = dims[1] * scale;
  return {
    scale,
    offsetX: (canvasWidth - drawWidth) / 2,
    offsetY: (canvasHeight - drawHeight) / 2,
    drawWidth,
    drawHeight,
  };
}

/** Room meters -> canvas pixels (top-down; x right, y down). */
export function roomToCanvas(
  pos: Vec3,
  dims: Vec3,
  canvasWidth: number,
  canvasHeight: number,
): [number, number] {
  const vp = fitViewport(dims, canvasWidth, canvasHeight);
  return [vp.offsetX + pos[0] * vp.scale, vp.offsetY + pos[1] * vp.scale];
}

/** Canvas pixels -> room meters on the floor plane; inverse of roomToCanvas. */
export function canvasToRoom(
  px: number,
  py: number,
  dims: Vec3,
  canvasWidth: number,
  canvasHeight: number,
): [number, number] {
  const vp = fitViewport(dims, canvasWidth, canvasHeight);
  return [(px - vp.offsetX) / vp.scale, (py - vp.offsetY) / vp.scale];
}
