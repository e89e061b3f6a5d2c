/** Controlled failure: bad inputs, bad configuration, broken invariants. */
export class PipelineError extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'PipelineError';
  }
}
