// Mirrors of the service's scenario JSON schema (snake_case field names
// match the wire format exactly).

export type Vec3 = [number, number, number];

export interface RoomConfig {
  dims: Vec3;
  wall_beta: [number, number, number, number, number, number];
  speed_of_sound: number;
  sample_rate: number;
}

export interface SourceSpec {
  id: string;
  role: "speaker" | "noise";
  position: Vec3;
  inclusion_prob: number;
  gain_range: [number, number];
  pool?: string;
}

export interface MicrophoneSpec {
  id: string;
  position: Vec3;
}

export interface ScenarioConfig {
  mode: "room" | "no_room";
  rooms: RoomConfig[];
  speaker: SourceSpec;
  noise_sources: SourceSpec[];
  microphones: MicrophoneSpec[];
  sample_rate: number;
  max_rir_seconds: number | null;
  exclude_clean_speaker: boolean;
}

export interface Issue {
  severity: "error" | "warning";
  path: string;
  message: string;
}

export interface ValidationReport {
  ok: boolean;
  issues: Issue[];
}

export type EdcPoint = [number, number]; // [seconds, dB]

export interface RirPreviewResponse {
  t60_estimate: number;
  t60_empirical: number | null;
  sample_rate: number;
  n_samples: number;
  rir_base64: string;
  edc: EdcPoint[];
}

export interface JobStatus {
  id: string;
  state: "queued" | "running" | "done" | "failed" | "cancelled";
  processed: number;
  total: number;
  started_at: number | null;
  finished_at: number | null;
  error: string | null;
  out_dir: string;
}
