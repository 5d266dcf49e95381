import { ApiClient, ApiError } from "./api.js";
import { buildDiffRows } from "./diffrows.js";
import { ReviewQueue } from "./queue.js";
import {
  el,
  renderCensus,
  renderClusterRow,
  renderDiffRows,
  renderMessage,
  renderScores,
} from "./render.js";
import type { CandidatePair, ClusterPage, Verdict } from "./types.js";

const api = new ApiClient();
const queue = new ReviewQueue();

const main = document.getElementById("main") as HTMLElement;
const banner = document.getElementById("banner") as HTMLElement;

let activeView: "review" | "clusters" = "review";
let clusterPageNumber = 1;
let filterHasCommit = false;
let filterMinMails = 0;
let busy = false;

function showBanner(message: string, retry: () => void): void {
  banner.textContent = "";
  banner.appendChild(el("span", "banner-text", message));
  const button = el("button", "retry", "retry");
  button.addEventListener("click", () => {
    banner.hidden = true;
    retry();
  });
  banner.appendChild(button);
  banner.hidden = false;
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `service error: ${err.message}`;
  return "service unreachable";
}

async function guarded(action: () => Promise<void>, retry: () => void): Promise<void> {
  try {
    await action();
  } catch (err) {
    showBanner(describe(err), retry);
  }
}

// -- review view -------------------------------------------------------

async function loadCandidates(): Promise<void> {
  queue.replenish(await api.candidates(25));
}

async function showReview(): Promise<void> {
  activeView = "review";
  await guarded(async () => {
    if (queue.length === 0) await loadCandidates();
    await renderReview();
  }, showReview);
}

async function renderReview(): Promise<void> {
  const candidate = queue.current();
  main.textContent = "";
  if (!candidate) {
    const done = el("div", "done-state");
    done.appendChild(el("h2", undefined, "all candidates judged"));
    const link = el("a", "export-link", "download the assembled reference clustering");
    link.setAttribute("href", api.groundtruthUrl());
    done.appendChild(link);
    main.appendChild(done);
    return;
  }
  const [left, right] = await Promise.all([api.patch(candidate.a), api.patch(candidate.b)]);

  const view = el("div", "pair-view");
  view.appendChild(renderScores(candidate));

  const messages = el("div", "message-pair");
  messages.appendChild(renderMessage(left));
  messages.appendChild(renderMessage(right));
  view.appendChild(messages);

  view.appendChild(renderDiffRows(buildDiffRows(left, right)));

  const controls = el("div", "controls");
  const same = el("button", "verdict same", "same (s)");
  const different = el("button", "verdict different", "different (d)");
  const skip = el("button", "verdict skip", "skip (k)");
  same.addEventListener("click", () => submit(candidate, "same"));
  different.addEventListener("click", () => submit(candidate, "different"));
  skip.addEventListener("click", () => {
    queue.skip();
    void renderReview();
  });
  controls.append(same, different, skip);
  view.appendChild(controls);
  main.appendChild(view);
}

async function submit(candidate: CandidatePair, verdict: Verdict): Promise<void> {
  if (busy) return;
  busy = true;
  await guarded(
    async () => {
      // The verdict must be server-confirmed before the next pair loads.
      await api.judge(candidate.a, candidate.b, verdict);
      queue.drop(candidate);
      if (queue.length === 0) await loadCandidates();
      await renderReview();
    },
    () => void submit(candidate, verdict),
  );
  busy = false;
}

// -- cluster browser ---------------------------------------------------

function applyFilters(page: ClusterPage) {
  return page.clusters.filter(
    (c) =>
      (!filterHasCommit || c.commit_count > 0) && c.mail_count >= filterMinMails,
  );
}

async function showClusters(): Promise<void> {
  activeView = "clusters";
  await guarded(async () => {
    const [census, page] = await Promise.all([
      api.census(),
      api.clusters(clusterPageNumber, 25),
    ]);
    main.textContent = "";
    main.appendChild(renderCensus(census));

    const bar = el("div", "filter-bar");
    const commitBox = el("label", "filter");
    const checkbox = el("input");
    checkbox.type = "checkbox";
    checkbox.checked = filterHasCommit;
    checkbox.addEventListener("change", () => {
      filterHasCommit = checkbox.checked;
      void showClusters();
    });
    commitBox.append(checkbox, document.createTextNode(" has commit"));
    bar.appendChild(commitBox);

    const mailsBox = el("label", "filter");
    const select = el("select");
    for (const [label, value] of [["any mails", 0], ["≥2 mails", 2], ["≥3 mails", 3]] as const) {
      const option = el("option", undefined, label);
      option.value = String(value);
      if (filterMinMails === value) option.selected = true;
      select.appendChild(option);
    }
    select.addEventListener("change", () => {
      filterMinMails = Number(select.value);
      void showClusters();
    });
    mailsBox.append(select);
    bar.appendChild(mailsBox);
    main.appendChild(bar);

    const list = el("div", "cluster-list");
    const visible = applyFilters(page);
    if (visible.length === 0) {
      list.appendChild(el("div", "empty-state", "no clusters match"));
    }
    for (const cluster of visible) {
      list.appendChild(renderClusterRow(cluster, (id) => void openCluster(id)));
    }
    main.appendChild(list);

    const pager = el("div", "pager");
    const prev = el("button", undefined, "prev");
    const next = el("button", undefined, "next");
    prev.disabled = page.page <= 1;
    next.disabled = page.page >= page.total_pages;
    prev.addEventListener("click", () => {
      clusterPageNumber -= 1;
      void showClusters();
    });
    next.addEventListener("click", () => {
      clusterPageNumber += 1;
      void showClusters();
    });
    pager.append(prev, el("span", "page-label", `page ${page.page} / ${page.total_pages}`), next);
    main.appendChild(pager);
  }, showClusters);
}

async function openCluster(id: string): Promise<void> {
  await guarded(async () => {
    const cluster = await api.cluster(id);
    const details = await Promise.all(cluster.members.map((m) => api.patch(m.id)));
    main.textContent = "";
    const back = el("button", "back", "back to clusters");
    back.addEventListener("click", () => void showClusters());
    main.appendChild(back);
    main.appendChild(el("h2", "cluster-title", `cluster ${cluster.id} (${cluster.size} members)`));
    for (const patch of details) {
      main.appendChild(renderMessage(patch));
      main.appendChild(renderDiffRows(buildDiffRows(patch, patch)));
    }
  }, () => void openCluster(id));
}

// -- wiring ------------------------------------------------------------

function onKey(event: KeyboardEvent): void {
  if (activeView !== "review") return;
  const candidate = queue.current();
  if (!candidate) return;
  if (event.key === "s") void submit(candidate, "same");
  else if (event.key === "d") void submit(candidate, "different");
  else if (event.key === "k") {
    queue.skip();
    void renderReview();
  }
}

export function start(): void {
  document.getElementById("tab-review")?.addEventListener("click", () => void showReview());
  document.getElementById("tab-clusters")?.addEventListener("click", () => void showClusters());
  document.addEventListener("keydown", onKey);
  void showReview();
}

start();
