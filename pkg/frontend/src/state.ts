// Editor state: the scenario being edited plus selection and preview status.

import { clampDrag } from "./geometry";
import type { Issue, ScenarioConfig, Vec3 } from "./types";

export type EntityRef =
  | { kind: "speaker" }
  | { kind: "noise"; index: number }
  | { kind: "mic"; index: number };

export interface EditorState {
  scenario: ScenarioConfig;
  selected: EntityRef | null;
  dragging: boolean;
  issues: Issue[]; // last validation issues (local or from the service)
  lastPreviewRevision: number;
  displayedT60: number | null;
  activeJobs: string[];
}

export function initialState(scenario: ScenarioConfig): EditorState {
  return {
    scenario,
    selected: null,
    dragging: false,
    issues: [],
    lastPreviewRevision: 0,
    displayedT60: null,
    activeJobs: [],
  };
}

export function entityPosition(s: ScenarioConfig, ref: EntityRef): Vec3 {
  switch (ref.kind) {
    case "speaker":
      return s.speaker.position;
    case "noise":
      return s.noise_sources[ref.index].position;
    case "mic":
      return s.microphones[ref.index].position;
  }
}

export function entityLabel(s: ScenarioConfig, ref: EntityRef): string {
  switch (ref.kind) {
    case "speaker":
      return s.speaker.id;
    case "noise":
      return s.noise_sources[ref.index].id;
    case "mic":
      return s.microphones[ref.index].id;
  }
}

export function listEntities(s: ScenarioConfig): EntityRef[] {
  const refs: EntityRef[] = [{ kind: "speaker" }];
  s.noise_sources.forEach((_src, index) => refs.push({ kind: "noise", index }));
  s.microphones.forEach((_mic, index) => refs.push({ kind: "mic", index }));
  return refs;
}

/**
 * Move an entity, clamping to the room's walls (0.1 m margin). Returns a new
 * scenario; the input is never mutated so stale references cannot leak into
 * the serialized document.
 */
export function moveEntity(s: ScenarioConfig, ref: EntityRef, pos: Vec3): ScenarioConfig {
  const room = s.rooms[0];
  const clamped = room ? clampDrag(pos, room.dims) : pos;
  const next: ScenarioConfig = structuredClone(s);
  switch (ref.kind) {
    case "speaker":
      next.speaker.position = clamped;
      break;
    case "noise":
      next.noise_sources[ref.index].position = clamped;
      break;
    case "mic":
      next.microphones[ref.index].position = clamped;
      break;
  }
  return next;
}

export function setWallBeta(s: ScenarioConfig, wall: number, beta: number): ScenarioConfig {
  const next: ScenarioConfig = structuredClone(s);
  for (const room of next.rooms) {
    room.wall_beta[wall] = beta;
  }
  return next;
}

/** Serialize exactly what the service expects; JSON round-trip safe. */
export function serializeScenario(s: ScenarioConfig): string {
  return JSON.stringify(s);
}

export function deserializeScenario(text: string): ScenarioConfig {
  return JSON.parse(text) as ScenarioConfig;
}
