import { describe, expect, it } from "vitest";

import { canvasToRoom, clampDrag, fitViewport, roomToCanvas } from "../src/geometry";
import type { Vec3 } from "../src/types";

describe("clampDrag", () => {
  const dims: Vec3 = [6, 6, 3];

  it("leaves interior points unchanged", () => {
    expect(clampDrag([3, 3, 1.5], dims)).toEqual([3, 3, 1.5]);
  });

  it("clamps negative coordinates to the margin", () => {
    expect(clampDrag([-1, 3, 1.5], dims)).toEqual([0.1, 3, 1.5]);
  });

  it("clamps past-the-wall coordinates to dim minus margin", () => {
    const [x, y, z] = clampDrag([6.2, 6.2, 3.2], dims);
    expect(x).toBeCloseTo(5.9, 12);
    expect(y).toBeCloseTo(5.9, 12);
    expect(z).toBeCloseTo(2.9, 12);
  });

  it("always lands inside the margin box", () => {
    let seed = 1;
    const rand = () => {
      // deterministic LCG so failures reproduce
      seed = (seed * 48271) % 2147483647;
      return seed / 2147483647;
    };
    for (let i = 0; i < 500; i++) {
      const roomDims: Vec3 = [1 + rand() * 9, 1 + rand() * 9, 1 + rand() * 4];
      const pos: Vec3 = [rand() * 20 - 5, rand() * 20 - 5, rand() * 10 - 3];
      const clamped = clampDrag(pos, roomDims);
      for (let axis = 0; axis < 3; axis++) {
        expect(clamped[axis]).toBeGreaterThanOrEqual(0.1);
        expect(clamped[axis]).toBeLessThanOrEqual(roomDims[axis] - 0.1);
      }
    }
  });
});

describe("roomToCanvas", () => {
  const dims: Vec3 = [8, 4, 3];

  it("maps the room corner to the letterbox origin", () => {
    const vp = fitViewport(dims, 640, 480);
    expect(roomToCanvas([0, 0, 0], dims, 640, 480)).toEqual([vp.offsetX, vp.offsetY]);
  });

  it("maps the room center to the center of the letterboxed region", () => {
    const [x, y] = roomToCanvas([4, 2, 1.5], dims, 640, 480);
    expect(x).toBeCloseTo(320, 9);
    const vp = fitViewport(dims, 640, 480);
    expect(y).toBeCloseTo(vp.offsetY + vp.drawHeight / 2, 9);
  });

  it("preserves aspect ratio", () => {
    const vp = fitViewport(dims, 640, 480);
    expect(vp.drawWidth / vp.drawHeight).toBeCloseTo(dims[0] / dims[1], 9);
  });

  it("round-trips canvas -> room -> canvas within 0.5 px", () => {
    for (const [px, py] of [
      [100, 100],
      [320, 240],
      [601.25, 33.5],
      [0, 0],
    ] as const) {
      const [rx, ry] = canvasToRoom(px, py, dims, 640, 480);
      const [bx, by] = roomToCanvas([rx, ry, 0], dims, 640, 480);
      expect(Math.hypot(bx - px, by - py)).toBeLessThanOrEqual(0.5);
    }
  });

  it("rejects a zero-size canvas", () => {
    expect(() => fitViewport(dims, 0, 480)).toThrow();
  });
});
