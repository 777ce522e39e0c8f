// DOM wiring for the room configurator.

import { ApiClient, ApiError } from "./api";
import { renderEdcPlot } from "./edc";
import { canvasToRoom, fitViewport, roomToCanvas } from "./geometry";
import { PreviewScheduler } from "./preview";
import {
  EditorState,
  EntityRef,
  entityLabel,
  entityPosition,
  initialState,
  listEntities,
  moveEntity,
  setWallBeta,
} from "./state";
import type { RirPreviewResponse, ValidationReport } from "./types";

const ENTITY_RADIUS_PX = 9;
const COLORS = { speaker: "#2e7d32", noise: "#ef6c00", mic: "#1565c0" } as const;
const WALL_LABELS = ["x0", "x1", "y0", "y1", "z0", "z1"];

export class App {
  private state!: EditorState;
  private preview: PreviewScheduler<null, RirPreviewResponse>;
  private floor: HTMLCanvasElement;
  private edcCanvas: HTMLCanvasElement;
  private lastEdc: RirPreviewResponse | null = null;

  constructor(
    private readonly root: Document,
    private readonly api: ApiClient,
  ) {
    this.floor = root.getElementById("floorplan") as HTMLCanvasElement;
    this.edcCanvas = root.getElementById("edc-plot") as HTMLCanvasElement;
    this.preview = new PreviewScheduler(
      () => this.sendPreview(),
      (res, revision) => this.applyPreview(res, revision),
      (err) => this.showError(err),
    );
  }

  async start(): Promise<void> {
    this.state = initialState(await this.api.getScenario());
    this.bindCanvas();
    this.bindControls();
    this.renderAll();
    this.schedulePreview();
    setInterval(() => void this.pollJobs(), 1000);
  }

  // ---- preview plumbing ----------------------------------------------------

  private sendPreview(): Promise<RirPreviewResponse> {
    const s = this.state.scenario;
    const room = s.rooms[0];
    return this.api.previewRir(room, s.speaker.position, s.microphones[0].position);
  }

  private applyPreview(res: RirPreviewResponse, revision: number): void {
    this.state.lastPreviewRevision = revision;
    this.state.displayedT60 = res.t60_estimate;
    this.lastEdc = res;
    const t60 = this.root.getElementById("t60-value")!;
    t60.textContent = `${res.t60_estimate.toFixed(3)} s (empirical ${
      res.t60_empirical === null ? "n/a" : res.t60_empirical.toFixed(3) + " s"
    })`;
    this.drawEdc();
  }

  private schedulePreview(): void {
    const s = this.state.scenario;
    if (s.mode !== "room" || s.rooms.length === 0 || s.microphones.length === 0) {
      return;
    }
    this.preview.request(null);
  }

  // ---- floor plan ----------------------------------------------------------

  private bindCanvas(): void {
    this.floor.addEventListener("pointerdown", (ev) => {
      const ref = this.hitTest(ev.offsetX, ev.offsetY);
      this.state.selected = ref;
      this.state.dragging = ref !== null;
      if (ref) this.floor.setPointerCapture(ev.pointerId);
      this.renderAll();
    });
    this.floor.addEventListener("pointermove", (ev) => {
      if (!this.state.dragging || !this.state.selected) return;
      const dims = this.state.scenario.rooms[0].dims;
      const [x, y] = canvasToRoom(ev.offsetX, ev.offsetY, dims, this.floor.width, this.floor.height);
      const z = entityPosition(this.state.scenario, this.state.selected)[2];
      this.state.scenario = moveEntity(this.state.scenario, this.state.selected, [x, y, z]);
      this.renderAll();
      this.schedulePreview();
    });
    this.floor.addEventListener("pointerup", () => {
      this.state.dragging = false;
    });
  }

  private hitTest(px: number, py: number): EntityRef | null {
    const s = this.state.scenario;
    if (s.rooms.length === 0) return null;
    for (const ref of listEntities(s)) {
      const pos = entityPosition(s, ref);
      const [ex, ey] = roomToCanvas(pos, s.rooms[0].dims, this.floor.width, this.floor.height);
      if (Math.hypot(px - ex, py - ey) <= ENTITY_RADIUS_PX + 3) {
        return ref;
      }
    }
    return null;
  }

  private drawFloor(): void {
    const ctx = this.floor.getContext("2d")!;
    const s = this.state.scenario;
    ctx.clearRect(0, 0, this.floor.width, this.floor.height);
    if (s.rooms.length === 0) {
      ctx.fillStyle = "#666";
      ctx.fillText("no_room mode: positions are ignored", 20, 30);
      return;
    }
    const dims = s.rooms[0].dims;
    const vp = fitViewport(dims, this.floor.width, this.floor.height);
    ctx.strokeStyle = "#444";
    ctx.lineWidth = 2;
    ctx.strokeRect(vp.offsetX, vp.offsetY, vp.drawWidth, vp.drawHeight);

    for (const ref of listEntities(s)) {
      const pos = entityPosition(s, ref);
      const [x, y] = roomToCanvas(pos, dims, this.floor.width, this.floor.height);
      ctx.beginPath();
      ctx.arc(x, y, ENTITY_RADIUS_PX, 0, Math.PI * 2);
      ctx.fillStyle = COLORS[ref.kind === "speaker" ? "speaker" : ref.kind === "noise" ? "noise" : "mic"];
      ctx.fill();
      const selected =
        this.state.selected && JSON.stringify(this.state.selected) === JSON.stringify(ref);
      if (selected) {
        ctx.strokeStyle = "#000";
        ctx.lineWidth = 2;
        ctx.stroke();
      }
      ctx.fillStyle = "#222";
      ctx.font = "11px sans-serif";
      ctx.fillText(entityLabel(s, ref), x + ENTITY_RADIUS_PX + 2, y + 3);
    }
  }

  private drawEdc(): void {
    const ctx = this.edcCanvas.getContext("2d")!;
    const w = this.edcCanvas.width;
    const h = this.edcCanvas.height;
    ctx.clearRect(0, 0, w, h);
    if (!this.lastEdc) return;
    const series = renderEdcPlot(this.lastEdc.edc);
    const tMax = series.points[series.points.length - 1][0] || 1e-6;
    const toXY = ([t, db]: [number, number]): [number, number] => [
      (t / tMax) * (w - 20) + 10,
      ((-db / 120) * (h - 20)) + 10,
    ];
    ctx.strokeStyle = "#1565c0";
    ctx.beginPath();
    series.points.forEach((pt, i) => {
      const [x, y] = toXY(pt);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
    if (series.crossing) {
      const [x, y] = toXY([series.crossing.seconds, series.crossing.db]);
      ctx.fillStyle = "#c62828";
      ctx.beginPath();
      ctx.arc(x, y, 4, 0, Math.PI * 2);
      ctx.fill();
      ctx.fillText(`T60 ${series.crossing.seconds.toFixed(3)} s`, x + 6, y - 6);
    }
  }

  // ---- controls ------------------------------------------------------------

  private bindControls(): void {
    const betaBox = this.root.getElementById("beta-sliders")!;
    betaBox.innerHTML = "";
    WALL_LABELS.forEach((label, wall) => {
      const wrap = this.root.createElement("label");
      wrap.textContent = label;
      const slider = this.root.createElement("input");
      slider.type = "range";
      slider.min = "0";
      slider.max = "0.97";
      slider.step = "0.01";
      slider.value = String(this.state.scenario.rooms[0]?.wall_beta[wall] ?? 0.8);
      slider.addEventListener("input", () => {
        this.state.scenario = setWallBeta(this.state.scenario, wall, Number(slider.value));
        this.schedulePreview();
      });
      wrap.appendChild(slider);
      betaBox.appendChild(wrap);
    });

    const height = this.root.getElementById("height-slider") as HTMLInputElement;
    height.addEventListener("input", () => {
      if (!this.state.selected) return;
      const pos = entityPosition(this.state.scenario, this.state.selected);
      this.state.scenario = moveEntity(this.state.scenario, this.state.selected, [
        pos[0],
        pos[1],
        Number(height.value),
      ]);
      this.renderAll();
      this.schedulePreview();
    });

    this.root.getElementById("save-btn")!.addEventListener("click", () => void this.save());
    this.root.getElementById("job-btn")!.addEventListener("click", () => void this.startJob());
  }

  private async save(): Promise<void> {
    try {
      const report = await this.api.putScenario(this.state.scenario);
      this.state.issues = report.issues;
      this.showReport(report);
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        const report = err.body as ValidationReport;
        this.state.issues = report.issues;
        this.showReport(report);
      } else {
        this.showError(err);
      }
    }
  }

  private showReport(report: ValidationReport): void {
    const box = this.root.getElementById("issues")!;
    box.textContent = report.ok
      ? "scenario saved"
      : report.issues.map((i) => `[${i.severity}] ${i.path}: ${i.message}`).join("\n");
  }

  private showError(err: unknown): void {
    this.root.getElementById("issues")!.textContent = String(err);
  }

  // ---- jobs ----------------------------------------------------------------

  private async startJob(): Promise<void> {
    const get = (id: string) => (this.root.getElementById(id) as HTMLInputElement).value;
    try {
      const { job_id } = await this.api.startJob({
        scenario: this.state.scenario,
        clean_root: get("job-clean"),
        noise_root: get("job-noise"),
        out_dir: get("job-out"),
        seed: Number(get("job-seed") || "0"),
      });
      this.state.activeJobs.push(job_id);
    } catch (err) {
      this.showError(err);
    }
  }

  private async pollJobs(): Promise<void> {
    if (this.state.activeJobs.length === 0) return;
    const rows: string[] = [];
    for (const id of this.state.activeJobs) {
      try {
        const st = await this.api.jobStatus(id);
        rows.push(`${id}  ${st.state}  ${st.processed}/${st.total}`);
      } catch {
        rows.push(`${id}  (unknown)`);
      }
    }
    this.root.getElementById("jobs")!.textContent = rows.join("\n");
  }

  private renderAll(): void {
    this.drawFloor();
    this.drawEdc();
  }
}
