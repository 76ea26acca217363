// Bounding-box overlay geometry and drawing for the scene panel.
import type { SceneDetection } from "./types.js";

export interface Rect {
  left: number;
  top: number;
  width: number;
  height: number;
}

/** Map a detection box from scene coordinates into canvas coordinates. */
export function scaleBox(
  box: [number, number, number, number],
  sceneWidth: number,
  sceneHeight: number,
  canvasWidth: number,
  canvasHeight: number,
): Rect {
  const sx = canvasWidth / sceneWidth;
  const sy = canvasHeight / sceneHeight;
  const [x0, y0, x1, y1] = box;
  return {
    left: x0 * sx,
    top: y0 * sy,
    width: (x1 - x0) * sx,
    height: (y1 - y0) * sy,
  };
}

/** Extent of all detections, used as the scene coordinate system. */
export function frameExtent(detections: SceneDetection[]): {
  width: number;
  height: number;
} {
  let width = 1;
  let height = 1;
  for (const d of detections) {
    width = Math.max(width, d.box[2]);
    height = Math.max(height, d.box[3]);
  }
  // leave a small margin so edge boxes are not clipped
  return { width: width * 1.05, height: height * 1.05 };
}

export function drawBox(
  ctx: CanvasRenderingContext2D,
  rect: Rect,
  label: string,
  color: string,
): void {
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.strokeRect(rect.left, rect.top, rect.width, rect.height);
  ctx.font = "12px sans-serif";
  ctx.fillStyle = color;
  ctx.fillText(label, rect.left + 2, Math.max(12, rect.top - 4));
}
