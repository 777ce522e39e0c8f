// Debounced preview requests with stale-response rejection.
//
// Every edit bumps a revision counter; requests are debounced so a drag only
// issues one call per pause, and a response is applied only if no newer
// response has been applied already. Out-of-order completions can never
// overwrite fresher data.

export const DEBOUNCE_MS = 150;

export class PreviewScheduler<Req, Res> {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private revision = 0;
  private lastApplied = 0;
  private pending: Req | null = null;

  constructor(
    private readonly send: (req: Req) => Promise<Res>,
    private readonly apply: (res: Res, revision: number) => void,
    private readonly onError: (err: unknown) => void = () => {},
    private readonly debounceMs: number = DEBOUNCE_MS,
  ) {}

  /** Queue a preview for the latest state; returns the assigned revision. */
  request(req: Req): number {
    this.pending = req;
    const revision = ++this.revision;
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      this.fire();
    }, this.debounceMs);
    return revision;
  }

  /** Revision of the last response actually applied. */
  appliedRevision(): number {
    return this.lastApplied;
  }

  latestRevision(): number {
    return this.revision;
  }

  private fire(): void {
    const revision = this.revision;
    const req = this.pending as Req;
    this.send(req).then(
      (res) => {
        if (revision < this.lastApplied) {
          return; // stale: a newer response already landed
        }
        this.lastApplied = revision;
        this.apply(res, revision);
      },
      (err) => this.onError(err),
    );
  }
}
