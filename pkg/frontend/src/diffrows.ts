import type { FileDiffModel, HunkModel, PatchDetail } from "./types.js";

/**
 * Side-by-side row layout for a candidate pair.
 *
 * Files are paired by equal path, hunks within a paired file by equal
 * heading (first unused match wins); everything unmatched renders
 * one-sided.  The hunk structure comes pre-parsed from the server, so this
 * is pure presentation logic.
 */

export type Side = "left" | "right" | "both";

export interface FilePairRow {
  kind: "file";
  side: Side;
  leftPath?: string;
  rightPath?: string;
}

export interface HunkPairRow {
  kind: "hunk";
  side: Side;
  left?: HunkModel;
  right?: HunkModel;
}

export type DiffRow = FilePairRow | HunkPairRow;

function pairHunks(left: HunkModel[], right: HunkModel[]): HunkPairRow[] {
  const rows: HunkPairRow[] = [];
  const usedRight = new Set<number>();
  for (const hunk of left) {
    const match = right.findIndex(
      (candidate, index) => !usedRight.has(index) && candidate.heading === hunk.heading,
    );
    if (match >= 0) {
      usedRight.add(match);
      rows.push({ kind: "hunk", side: "both", left: hunk, right: right[match] });
    } else {
      rows.push({ kind: "hunk", side: "left", left: hunk });
    }
  }
  right.forEach((hunk, index) => {
    if (!usedRight.has(index)) rows.push({ kind: "hunk", side: "right", right: hunk });
  });
  return rows;
}

export function buildDiffRows(left: PatchDetail, right: PatchDetail): DiffRow[] {
  const rows: DiffRow[] = [];
  const rightByPath = new Map<string, FileDiffModel>();
  for (const file of right.files) rightByPath.set(file.path, file);

  const pairedPaths = new Set<string>();
  for (const file of left.files) {
    const twin = rightByPath.get(file.path);
    if (twin) {
      pairedPaths.add(file.path);
      rows.push({ kind: "file", side: "both", leftPath: file.path, rightPath: twin.path });
      rows.push(...pairHunks(file.hunks, twin.hunks));
    } else {
      rows.push({ kind: "file", side: "left", leftPath: file.path });
      rows.push(...pairHunks(file.hunks, []));
    }
  }
  for (const file of right.files) {
    if (!pairedPaths.has(file.path)) {
      rows.push({ kind: "file", side: "right", rightPath: file.path });
      rows.push(...pairHunks([], file.hunks));
    }
  }
  return rows;
}
