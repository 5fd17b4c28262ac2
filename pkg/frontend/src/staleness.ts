/**
 * Per-key request generations: a response may only be applied while its
 * token is still the latest one issued for that key.
 */
export class LatestWins {
  private generations = new Map<string, number>();

  begin(key: string): number {
    const next = (this.generations.get(key) ?? 0) + 1;
    this.generations.set(key, next);
    return next;
  }

  isCurrent(key: string, token: number): boolean {
    return this.generations.get(key) === token;
  }

  invalidate(key: string): void {
    this.begin(key);
  }
}
