/** DOM wiring: renders controller snapshots and forwards input events. */

import { ApiClient } from "./api.js";
import {
  Lang,
  SessionController,
  Snapshot,
  categoryDesc,
  categoryName,
  detectLang,
} from "./session.js";

const TEXT = {
  en: {
    missingRater: "Add ?rater=YOUR_ID to the URL to start a session.",
    submitFailed: "Submission failed — your choice is saved locally.",
    retry: "Retry",
    doneTitle: "Session complete",
    done: (n: number) => `You labeled all ${n} items. Thank you!`,
    progress: (done: number, total: number) => `${done} / ${total}`,
  },
  ko: {
    missingRater: "세션을 시작하려면 URL에 ?rater=아이디 를 추가하세요.",
    submitFailed: "전송에 실패했습니다 — 선택은 저장되어 있습니다.",
    retry: "다시 시도",
    doneTitle: "세션 완료",
    done: (n: number) => `${n}개 항목을 모두 라벨링했습니다. 감사합니다!`,
    progress: (done: number, total: number) => `${done} / ${total}`,
  },
} as const;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function renderChoices(ctl: SessionController, snap: Snapshot, lang: Lang): void {
  const box = el<HTMLDivElement>("choices");
  box.replaceChildren();
  snap.categories.forEach((cat, i) => {
    const btn = document.createElement("button");
    btn.className = "choice";
    btn.dataset.token = cat.token;
    btn.title = categoryDesc(cat, lang);
    btn.disabled = snap.phase !== "labeling";
    const key = document.createElement("kbd");
    key.textContent = String(i + 1);
    btn.append(key, ` ${categoryName(cat, lang)}`);
    btn.addEventListener("click", () => void ctl.choose(i));
    box.append(btn);
  });
}

function render(ctl: SessionController, snap: Snapshot, lang: Lang): void {
  const t = TEXT[lang];
  el("loading").hidden = snap.phase !== "loading";
  el("labeling").hidden = !(
    snap.phase === "labeling" ||
    snap.phase === "submitting" ||
    snap.phase === "retry"
  );
  el("completion").hidden = snap.phase !== "done";
  el("fatal").hidden = snap.phase !== "fatal";

  el("rater-badge").textContent = snap.rater;
  el("progress-text").textContent = t.progress(snap.done, snap.total);
  const pct = snap.total > 0 ? (100 * snap.done) / snap.total : 0;
  el<HTMLDivElement>("progress-fill").style.width = `${pct}%`;

  const banner = el<HTMLDivElement>("banner");
  banner.hidden = snap.phase !== "retry";
  if (snap.phase === "retry") {
    el("banner-text").textContent = `${t.submitFailed} (${snap.error ?? ""})`;
  }

  if (snap.item !== null) {
    el<HTMLImageElement>("thumb").src = snap.item.thumbnail_url;
    el("title").textContent = snap.item.title;
  }
  el("guideline").textContent = snap.guideline;
  renderChoices(ctl, snap, lang);

  if (snap.phase === "done") {
    el("completion-title").textContent = t.doneTitle;
    el("completion-text").textContent = t.done(snap.total);
  }
  if (snap.phase === "fatal") {
    el("fatal-text").textContent = snap.error ?? "unrecoverable error";
  }
}

export function boot(): void {
  const lang = detectLang(window.location.search, navigator.language);
  const rater = new URLSearchParams(window.location.search).get("rater");
  if (rater === null || rater === "") {
    el("loading").hidden = true;
    el("fatal").hidden = false;
    el("fatal-text").textContent = TEXT[lang].missingRater;
    return;
  }

  const ctl = new SessionController(new ApiClient(""), rater);
  ctl.subscribe((snap) => render(ctl, snap, lang));

  el<HTMLButtonElement>("retry-btn").textContent = TEXT[lang].retry;
  el<HTMLButtonElement>("retry-btn").addEventListener("click", () => void ctl.retry());

  window.addEventListener("keydown", (ev) => {
    if (ev.key === "r" || ev.key === "Enter") {
      void ctl.retry();
      return;
    }
    const idx = ctl.choiceForKey(ev.key);
    if (idx !== null) void ctl.choose(idx);
  });

  void ctl.start();
}

boot();
