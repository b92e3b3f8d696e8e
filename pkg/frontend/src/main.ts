/** Browser wiring: DOM controls around SessionClient, configured via URL
 * query parameters (?session=...&name=...&lang=...&url=ws://...). */

import { drawFrame } from "./render2d.js";
import { SessionClient, MIN_SPEED, MAX_SPEED } from "./client.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

export function start(): void {
  const params = new URLSearchParams(window.location.search);
  const client = new SessionClient({
    url: params.get("url") ?? `ws://${window.location.hostname}:8765/ws`,
    sessionId: params.get("session") ?? "default",
    participantId: params.get("name") ?? `web-${Math.random().toString(36).slice(2, 8)}`,
    displayName: params.get("name") ?? "web user",
    language: params.get("lang") ?? "en",
  });

  const transcriptEl = byId<HTMLElement>("transcript");
  const bannerEl = byId<HTMLElement>("banner");
  const rosterEl = byId<HTMLElement>("roster");
  const input = byId<HTMLInputElement>("utterance");
  const sendBtn = byId<HTMLButtonElement>("send");
  const slider = byId<HTMLInputElement>("speed");
  const speedLabel = byId<HTMLElement>("speed-value");
  const emojiToggle = byId<HTMLInputElement>("emoji");
  const replayBtn = byId<HTMLButtonElement>("replay");
  const canvas = byId<HTMLCanvasElement>("avatar");
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("2d canvas context unavailable");

  slider.min = String(MIN_SPEED);
  slider.max = String(MAX_SPEED);
  slider.step = "0.25";
  slider.value = "1";

  sendBtn.addEventListener("click", () => {
    if (client.sendUtterance(input.value)) input.value = "";
  });
  input.addEventListener("input", () => {
    sendBtn.disabled = !input.value.trim();
  });
  slider.addEventListener("change", () => {
    client.setSpeed(Number(slider.value));
    speedLabel.textContent = `${slider.value}x`;
  });
  emojiToggle.addEventListener("change", () => {
    client.setEmojiEnabled(emojiToggle.checked);
  });
  replayBtn.addEventListener("click", () => {
    const last = client.sequences[client.sequences.length - 1];
    if (last) client.requestReplay(last.sequence_id);
  });

  const redraw = () => {
    const now = Date.now();
    const frame = client.avatar.tick(now);
    if (frame) drawFrame(ctx, frame, canvas.width, canvas.height);

    transcriptEl.textContent = client.transcript.render().join("\n");
    rosterEl.textContent = client.roster.map((p) => p.display_name).join(", ");
    if (client.roomFull) {
      bannerEl.textContent = "Room is full (8 participants max). Try again later.";
    } else if (client.lastError?.code === "QUEUE_FULL") {
      bannerEl.textContent = "The gateway is busy — please retry your message.";
    } else {
      bannerEl.textContent = client.joined ? "" : "Connecting…";
    }
    window.requestAnimationFrame(redraw);
  };
  window.requestAnimationFrame(redraw);
}

start();
