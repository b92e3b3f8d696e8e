/** 2-D orthographic skeleton rendering: bones drawn between landmark
 * index pairs onto a canvas. Coordinates arrive shoulder-centred and
 * shoulder-width normalised, so a fixed scale maps them on screen. */

import type { SignFrame } from "./avatar.js";

// Upper-body subset of the 33-point pose topology
export const POSE_BONES: ReadonlyArray<readonly [number, number]> = [
  [11, 12], // shoulders
  [11, 13], [13, 15], // left arm
  [12, 14], [14, 16], // right arm
  [11, 23], [12, 24], [23, 24], // torso
  [9, 10], // mouth line
];

// 21-point hand topology: thumb, four fingers, palm arc
export const HAND_BONES: ReadonlyArray<readonly [number, number]> = [
  [0, 1], [1, 2], [2, 3], [3, 4],
  [0, 5], [5, 6], [6, 7], [7, 8],
  [9, 10], [10, 11], [11, 12],
  [13, 14], [14, 15], [15, 16],
  [0, 17], [17, 18], [18, 19], [19, 20],
  [5, 9], [9, 13], [13, 17],
];

export interface Canvas2D {
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
}

function drawBones(
  ctx: Canvas2D,
  points: number[][],
  bones: ReadonlyArray<readonly [number, number]>,
  toX: (x: number) => number,
  toY: (y: number) => number,
): number {
  let drawn = 0;
  for (const [a, b] of bones) {
    const pa = points[a];
    const pb = points[b];
    if (!pa || !pb) continue;
    ctx.beginPath();
    ctx.moveTo(toX(pa[0]), toY(pa[1]));
    ctx.lineTo(toX(pb[0]), toY(pb[1]));
    ctx.stroke();
    drawn += 1;
  }
  return drawn;
}

/** Draw one frame; returns the number of bones drawn. */
export function drawFrame(ctx: Canvas2D, frame: SignFrame, width: number, height: number): number {
  ctx.clearRect(0, 0, width, height);
  // the normalised skeleton spans roughly [-1.5, 1.5] around the
  // shoulder midpoint; y grows downward on canvas
  const scale = Math.min(width, height) / 3;
  const toX = (x: number) => width / 2 + x * scale;
  const toY = (y: number) => height / 2 + y * scale;
  let drawn = 0;
  ctx.lineWidth = 3;
  ctx.strokeStyle = "#2c3e50";
  drawn += drawBones(ctx, frame.pose, POSE_BONES, toX, toY);
  ctx.lineWidth = 1.5;
  ctx.strokeStyle = "#2980b9";
  drawn += drawBones(ctx, frame.left_hand, HAND_BONES, toX, toY);
  ctx.strokeStyle = "#c0392b";
  drawn += drawBones(ctx, frame.right_hand, HAND_BONES, toX, toY);
  return drawn;
}
