// Energy-decay-curve plotting helpers.

import type { EdcPoint } from "./types";

export const MAX_PLOT_POINTS = 1000;

export interface EdcSeries {
  points: EdcPoint[];
  /** First -60 dB crossing (empirical T60), linearly interpolated. */
  crossing: { seconds: number; db: number } | null;
}

/**
 * Decimate a monotone nonincreasing dB series to at most MAX_PLOT_POINTS,
 * keeping the first and last points, and locate the -60 dB crossing.
 * Subsampling a monotone series stays monotone.
 */
export function renderEdcPlot(edc: EdcPoint[], dropDb = 60): EdcSeries {
  if (edc.length === 0) {
    throw new Error("empty EDC series");
  }
  let points: EdcPoint[];
  if (edc.length <= MAX_PLOT_POINTS) {
    points = edc.slice();
  } else {
    const step = (edc.length - 1) / (MAX_PLOT_POINTS - 1);
    points = [];
    for (let i = 0; i < MAX_PLOT_POINTS; i++) {
      points.push(edc[Math.round(i * step)]);
    }
  }
  return { points, crossing: findCrossing(edc, -dropDb) };
}

export function findCrossing(
  edc: EdcPoint[],
  thresholdDb: number,
): { seconds: number; db: number } | null {
  for (let i = 0; i < edc.length; i++) {
    const [t, db] = edc[i];
    if (db <= thresholdDb) {
      if (i === 0) return { seconds: t, db };
      const [t0, db0] = edc[i - 1];
      const frac = (thresholdDb - db0) / (db - db0);
      return { seconds: t0 + frac * (t - t0), db: thresholdDb };
    }
  }
  return null;
}
