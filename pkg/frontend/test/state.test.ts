import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import {
  deserializeScenario,
  listEntities,
  moveEntity,
  serializeScenario,
} from "../src/state";
import type { ScenarioConfig } from "../src/types";

function sampleScenario(): ScenarioConfig {
  return {
    mode: "room",
    rooms: [
      {
        dims: [6, 4.5, 2.7],
        wall_beta: [0.85, 0.85, 0.85, 0.85, 0.82, 0.85],
        speed_of_sound: 343.0,
        sample_rate: 16000,
      },
    ],
    speaker: {
      id: "speaker",
      role: "speaker",
      position: [2.2, 2.3, 1.5],
      inclusion_prob: 1.0,
      gain_range: [1, 1],
    },
    noise_sources: [
      {
        id: "household",
        role: "noise",
        position: [5.2, 0.8, 0.9],
        inclusion_prob: 0.8,
        gain_range: [0.2, 0.4],
        pool: "household",
      },
    ],
    microphones: [{ id: "mic0", position: [3.4, 2.1, 1.4] }],
    sample_rate: 16000,
    max_rir_seconds: null,
    exclude_clean_speaker: false,
  };
}

describe("editor state", () => {
  it("lists the speaker, noise sources, and microphones", () => {
    expect(listEntities(sampleScenario()).length).toBe(3);
  });

  it("moveEntity clamps drags to the wall margin and never mutates the input", () => {
    const s = sampleScenario();
    const moved = moveEntity(s, { kind: "noise", index: 0 }, [99, -5, 1.0]);
    expect(moved.noise_sources[0].position[0]).toBeCloseTo(6 - 0.1, 12);
    expect(moved.noise_sources[0].position[1]).toBeCloseTo(0.1, 12);
    expect(s.noise_sources[0].position).toEqual([5.2, 0.8, 0.9]);
  });

  it("every drag result satisfies the 0.1 m margin", () => {
    const s = sampleScenario();
    for (const target of [
      [-10, -10, -10],
      [100, 100, 100],
      [3, 2, 1],
      [0, 4.5, 2.7],
    ] as const) {
      const moved = moveEntity(s, { kind: "speaker" }, [...target]);
      moved.speaker.position.forEach((x, axis) => {
        expect(x).toBeGreaterThanOrEqual(0.1);
        expect(x).toBeLessThanOrEqual(s.rooms[0].dims[axis] - 0.1);
      });
    }
  });

  it("serializes and deserializes identically", () => {
    const s = sampleScenario();
    expect(deserializeScenario(serializeScenario(s))).toEqual(s);
  });
});

describe("scenario PUT/GET round trip", () => {
  it("an edited scenario comes back from the service unchanged", async () => {
    // In-memory stand-in for the service scenario endpoint: stores the exact
    // JSON it was sent, like PUT /api/scenario followed by GET /api/scenario.
    let stored = "";
    const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
      if (url.endsWith("/api/scenario") && init?.method === "PUT") {
        stored = init.body as string;
        return new Response(JSON.stringify({ ok: true, issues: [] }), { status: 200 });
      }
      if (url.endsWith("/api/scenario")) {
        return new Response(stored, { status: 200 });
      }
      return new Response("{}", { status: 404 });
    };
    const api = new ApiClient("", fetchImpl);

    let scenario = sampleScenario();
    scenario = moveEntity(scenario, { kind: "mic", index: 0 }, [1.0, 1.0, 1.2]);
    scenario.rooms[0].wall_beta[2] = 0.7;

    const report = await api.putScenario(scenario);
    expect(report.ok).toBe(true);
    const roundTripped = await api.getScenario();
    expect(roundTripped).toEqual(scenario);
  });
});
