import type { CandidatePair } from "./types.js";
import { pairKey } from "./types.js";

/**
 * Client-side candidate rotation.
 *
 * The server owns which pairs are still unjudged; this queue only decides
 * what to show next.  A skip moves the pair to the end, a confirmed verdict
 * removes it for good (the server will not send it again either).
 */
export class ReviewQueue {
  private items: CandidatePair[] = [];
  private dropped = new Set<string>();

  get length(): number {
    return this.items.length;
  }

  current(): CandidatePair | undefined {
    return this.items[0];
  }

  /** Merge a fresh server batch, keeping local order and skip rotation. */
  replenish(batch: CandidatePair[]): void {
    const known = new Set(this.items.map((c) => pairKey(c.a, c.b)));
    for (const candidate of batch) {
      const key = pairKey(candidate.a, candidate.b);
      if (!known.has(key) && !this.dropped.has(key)) {
        this.items.push(candidate);
        known.add(key);
      }
    }
  }

  /** Move the current pair to the end of the queue. */
  skip(): void {
    const head = this.items.shift();
    if (head) this.items.push(head);
  }

  /** Remove the pair permanently (after the server confirmed the verdict). */
  drop(candidate: CandidatePair): void {
    const key = pairKey(candidate.a, candidate.b);
    this.dropped.add(key);
    this.items = this.items.filter((c) => pairKey(c.a, c.b) !== key);
  }
}
