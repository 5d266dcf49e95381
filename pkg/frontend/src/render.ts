import type { DiffRow } from "./diffrows.js";
import type {
  CandidatePair,
  Census,
  ClusterSummary,
  HunkModel,
  PatchDetail,
} from "./types.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function dateLabel(epochSeconds: number): string {
  return new Date(epochSeconds * 1000).toISOString().slice(0, 10);
}

export function renderMessage(patch: PatchDetail): HTMLElement {
  const box = el("div", "message");
  const subject = el("div", "subject", patch.subject);
  box.appendChild(subject);
  const meta = el(
    "div",
    "meta",
    `${patch.kind} · ${patch.id} · ${dateLabel(patch.submission_date)}`,
  );
  box.appendChild(meta);
  const tagLines = new Set(patch.tag_lines);
  const body = el("pre", "body");
  patch.message.forEach((line, index) => {
    const span = el("span", tagLines.has(index) ? "tag-line" : "msg-line", line + "\n");
    body.appendChild(span);
  });
  box.appendChild(body);
  return box;
}

function renderHunk(hunk: HunkModel | undefined): HTMLElement {
  const cell = el("div", "hunk-cell");
  if (!hunk) return cell;
  cell.appendChild(
    el("div", "hunk-heading", `@@ -${hunk.old_start} +${hunk.new_start} @@ ${hunk.heading}`),
  );
  const pre = el("pre", "hunk-lines");
  for (const line of hunk.deletions) pre.appendChild(el("span", "del", `-${line}\n`));
  for (const line of hunk.insertions) pre.appendChild(el("span", "ins", `+${line}\n`));
  cell.appendChild(pre);
  return cell;
}

export function renderDiffRows(rows: DiffRow[]): HTMLElement {
  const grid = el("div", "diff-grid");
  for (const row of rows) {
    if (row.kind === "file") {
      grid.appendChild(el("div", "file-path left", row.leftPath ?? ""));
      grid.appendChild(el("div", "file-path right", row.rightPath ?? ""));
    } else {
      const left = renderHunk(row.left);
      const right = renderHunk(row.right);
      left.classList.add("left");
      right.classList.add("right");
      grid.appendChild(left);
      grid.appendChild(right);
    }
  }
  return grid;
}

export function renderScores(candidate: CandidatePair): HTMLElement {
  const bar = el("div", "scores");
  const entries: [string, string][] = [
    ["message", candidate.r_msg.toFixed(3)],
    ["diff", candidate.r_diff.toFixed(3)],
    ["combined", candidate.combined.toFixed(3)],
  ];
  for (const [label, value] of entries) {
    const chip = el("span", "score-chip");
    chip.appendChild(el("span", "score-label", label));
    chip.appendChild(el("span", "score-value", value));
    bar.appendChild(chip);
  }
  if (candidate.gated) bar.appendChild(el("span", "score-chip gated", "gated"));
  return bar;
}

export function renderCensus(census: Census): HTMLElement {
  const panel = el("div", "census");
  const rows: [string, number][] = [
    ["clusters", census.clusters],
    ["linked to a commit", census.clusters_with_commit],
    [">1 mail", census.clusters_gt1_mail],
    [">2 mails", census.clusters_gt2_mail],
    [">3 mails", census.clusters_gt3_mail],
    ["exactly 1 mail", census.clusters_eq1_mail],
    ["mails", census.mails],
    ["commits", census.commits],
  ];
  for (const [label, value] of rows) {
    const item = el("div", "census-item");
    item.appendChild(el("div", "census-value", String(value)));
    item.appendChild(el("div", "census-label", label));
    panel.appendChild(item);
  }
  return panel;
}

export function renderClusterRow(
  cluster: ClusterSummary,
  onOpen: (id: string) => void,
): HTMLElement {
  const row = el("div", "cluster-row");
  const head = el("div", "cluster-head");
  head.appendChild(el("span", "cluster-id", cluster.id));
  head.appendChild(
    el("span", "cluster-size", `${cluster.mail_count} mail(s), ${cluster.commit_count} commit(s)`),
  );
  if (cluster.commit_count > 0) {
    const commit = cluster.members.find((m) => m.kind === "commit");
    head.appendChild(el("span", "commit-badge", commit ? commit.id.slice(0, 12) : "commit"));
  }
  row.appendChild(head);
  const preview = el("div", "cluster-preview");
  for (const member of cluster.members) {
    preview.appendChild(
      el("div", `member ${member.kind}`, `${dateLabel(member.submission_date)}  ${member.subject}`),
    );
  }
  row.appendChild(preview);
  row.addEventListener("click", () => onOpen(cluster.id));
  return row;
}
