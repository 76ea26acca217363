// DOM wiring for the dialogue console, KB inspector, scene overlay, and
// rules panel.  All state lives on the server; the page only keeps the
// session id and the last loaded artifacts, so a refresh is safe.
import { ApiError, SessionClient } from "./api.js";
import { drawBox, frameExtent, scaleBox } from "./draw.js";
import { activeColumns, badgeClass, formatCell, kbRows } from "./format.js";
import { previewApply } from "./preview.js";
import type {
  KbDocument,
  RulesetPayload,
  SceneFramePayload,
} from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let client: SessionClient;
let lastFrame: SceneFramePayload | null = null;
let lastRuleset: RulesetPayload | null = null;

function say(speaker: "human" | "robot" | "system", text: string): void {
  const log = $<HTMLUListElement>("transcript");
  const li = document.createElement("li");
  li.className = `turn turn-${speaker}`;
  li.textContent = text;
  log.appendChild(li);
  log.scrollTop = log.scrollHeight;
}

async function refreshKb(): Promise<KbDocument> {
  const kb = await client.getKb();
  $<HTMLSpanElement>("revision").textContent = `rev ${kb.revision}`;
  const columns = activeColumns(kb);
  const table = $<HTMLTableElement>("kb-table");
  table.innerHTML = "";
  const head = table.createTHead().insertRow();
  for (const name of ["entity", ...columns]) {
    const th = document.createElement("th");
    th.textContent = name;
    head.appendChild(th);
  }
  const body = table.createTBody();
  for (const row of kbRows(kb, columns)) {
    const tr = body.insertRow();
    tr.insertCell().textContent = row.id;
    row.cells.forEach((cell, i) => {
      const td = tr.insertCell();
      td.textContent = formatCell(cell);
      if (cell) {
        const badge = document.createElement("span");
        badge.className = badgeClass(cell.src);
        badge.textContent = cell.src;
        if (cell.rule) badge.title = cell.rule;
        td.appendChild(badge);
      }
      void i;
    });
  }
  return kb;
}

function drawScene(): void {
  const canvas = $<HTMLCanvasElement>("scene-canvas");
  const ctx = canvas.getContext("2d");
  if (!ctx || !lastFrame) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const extent = frameExtent(lastFrame.detections);
  const palette = ["#e66", "#6a6", "#66d", "#ca3", "#a6c", "#3aa"];
  lastFrame.detections.forEach((det, i) => {
    const rect = scaleBox(det.box, extent.width, extent.height,
      canvas.width, canvas.height);
    const top = det.candidates[0];
    drawBox(ctx, rect, `${top.cat} ${top.conf.toFixed(2)}`,
      palette[i % palette.length]);
  });
}

function renderRules(ruleset: RulesetPayload): void {
  const panel = $<HTMLDivElement>("rules-panel");
  panel.innerHTML = "";
  const title = document.createElement("h3");
  title.textContent = `${ruleset.target.attribute} = ${ruleset.target.value}`;
  panel.appendChild(title);
  if (ruleset.clauses.length === 0) {
    const p = document.createElement("p");
    p.textContent = "(no rule)";
    panel.appendChild(p);
  }
  for (const clause of ruleset.clauses) {
    const line = document.createElement("p");
    line.className = "clause";
    line.textContent =
      `${clause.rendered}  [tp=${clause.stats.tp} fp=${clause.stats.fp}]`;
    panel.appendChild(line);
  }
}

async function renderPending(ruleset: RulesetPayload): Promise<void> {
  const kb = await client.getKb();
  const pending = previewApply(kb, ruleset);
  const list = $<HTMLUListElement>("pending-list");
  list.innerHTML = "";
  for (const p of pending) {
    const li = document.createElement("li");
    li.textContent = `${p.entity}: ${p.attribute} = ${p.value}  (${p.rule})`;
    list.appendChild(li);
  }
  $<HTMLButtonElement>("apply-button").disabled = pending.length === 0;
}

async function onUtterance(event: Event): Promise<void> {
  event.preventDefault();
  const input = $<HTMLInputElement>("utterance-input");
  const text = input.value.trim();
  if (!text) return;
  input.value = "";
  say("human", text);
  try {
    const res = await client.sendUtterance(text);
    say("robot", res.reply);
  } catch (err) {
    say("system", err instanceof ApiError ? err.message : String(err));
  }
  await refreshKb();
}

async function onSceneFile(event: Event): Promise<void> {
  const input = event.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  try {
    lastFrame = JSON.parse(await file.text()) as SceneFramePayload;
    const res = await client.postScene(lastFrame);
    say("system", `scene loaded: ${res.entities.length} entities`);
    drawScene();
  } catch (err) {
    say("system", err instanceof ApiError ? err.message : String(err));
  }
  await refreshKb();
}

async function onInduce(event: Event): Promise<void> {
  event.preventDefault();
  const attribute = $<HTMLInputElement>("induce-attr").value.trim();
  const value = $<HTMLInputElement>("induce-value").value.trim();
  if (!attribute || !value) return;
  try {
    lastRuleset = await client.induce(attribute, value);
    renderRules(lastRuleset);
    await renderPending(lastRuleset);
  } catch (err) {
    say("system", err instanceof ApiError ? err.message : String(err));
  }
}

async function onApply(): Promise<void> {
  if (!lastRuleset) return;
  const { attribute, value } = lastRuleset.target;
  try {
    const res = await client.apply(attribute, value);
    say("system", `applied: ${res.records.length} inferred`);
    await renderPending(lastRuleset);
  } catch (err) {
    say("system", err instanceof ApiError ? err.message : String(err));
  }
  await refreshKb();
}

async function boot(): Promise<void> {
  client = await SessionClient.create("");
  $<HTMLSpanElement>("session-id").textContent = client.sessionId;
  $<HTMLFormElement>("utterance-form").addEventListener("submit", onUtterance);
  $<HTMLInputElement>("scene-file").addEventListener("change", onSceneFile);
  $<HTMLFormElement>("induce-form").addEventListener("submit", onInduce);
  $<HTMLButtonElement>("apply-button").addEventListener("click", onApply);
  await refreshKb();
}

boot().catch((err) => say("system", String(err)));
