// Canvas renderer: top-down view with an ego-following camera.

import type { SceneModel, Sprite } from "./scene.js";
import type { Hud } from "./scene.js";

const MODE_COLORS: Record<string, string> = {
  "cacc-cruise": "#4caf50",
  "consensus-follow": "#2196f3",
  fallback: "#f44336",
  driver: "#ff9800",
};

const SCALE = 3.2; // px per meter
const VEHICLE_LENGTH = 4.5;
const VEHICLE_WIDTH = 2.0;

export function drawScene(ctx: CanvasRenderingContext2D, scene: SceneModel): void {
  const { width, height } = ctx.canvas;
  ctx.fillStyle = "#101418";
  ctx.fillRect(0, 0, width, height);

  const ego = scene.egoId ? scene.sprites.get(scene.egoId) : undefined;
  const cx = ego ? ego.drawX : 0;
  const cy = ego ? ego.drawY : 0;
  const toScreen = (x: number, y: number): [number, number] => [
    width / 2 + (x - cx) * SCALE,
    height / 2 - (y - cy) * SCALE - 60,
  ];

  // V2I communication circle
  if (scene.infra) {
    ctx.strokeStyle = "rgba(120, 180, 255, 0.25)";
    ctx.setLineDash([8, 8]);
    ctx.beginPath();
    const [ix, iy] = toScreen(scene.infra.x, scene.infra.y);
    ctx.arc(ix, iy, scene.infra.range * SCALE, 0, Math.PI * 2);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  // lanes
  for (const path of scene.paths) {
    ctx.strokeStyle = path.kind === "on-ramp" ? "#4a4f57" : "#5a616b";
    ctx.lineWidth = 3.8 * SCALE;
    ctx.lineCap = "round";
    ctx.beginPath();
    path.points.forEach(([x, y], i) => {
      const [sx, sy] = toScreen(x, y);
      if (i === 0) ctx.moveTo(sx, sy);
      else ctx.lineTo(sx, sy);
    });
    ctx.stroke();
  }

  // merge marker
  const [mx, my] = toScreen(scene.mergePoint[0], scene.mergePoint[1]);
  ctx.strokeStyle = "#ffd54f";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(mx, my - 14);
  ctx.lineTo(mx, my + 14);
  ctx.stroke();

  for (const sprite of scene.visibleSprites()) {
    drawVehicle(ctx, toScreen, sprite, sprite.id === scene.egoId, scene);
  }

  drawHud(ctx, scene.hud(), scene);
}

function drawVehicle(
  ctx: CanvasRenderingContext2D,
  toScreen: (x: number, y: number) => [number, number],
  sprite: Sprite,
  isEgo: boolean,
  scene: SceneModel,
): void {
  const [sx, sy] = toScreen(sprite.drawX, sprite.drawY);
  ctx.save();
  ctx.translate(sx, sy);
  ctx.fillStyle = MODE_COLORS[sprite.mode] ?? "#9e9e9e";
  const w = VEHICLE_LENGTH * SCALE;
  const h = VEHICLE_WIDTH * SCALE;
  ctx.fillRect(-w / 2, -h / 2, w, h);
  if (isEgo) {
    ctx.strokeStyle = "#ffffff";
    ctx.lineWidth = 2;
    ctx.strokeRect(-w / 2 - 2, -h / 2 - 2, w + 4, h + 4);
  }
  const flashing = scene.flashes.some((f) => f.id === sprite.id);
  if (flashing) {
    ctx.strokeStyle = "#ffeb3b";
    ctx.lineWidth = 2;
    ctx.strokeRect(-w / 2 - 5, -h / 2 - 5, w + 10, h + 10);
  }
  // sequence badge and speed readout
  ctx.fillStyle = "#ffffff";
  ctx.font = "11px monospace";
  ctx.textAlign = "center";
  const badge = sprite.seq === null ? "" : `#${sprite.seq} `;
  ctx.fillText(`${badge}${sprite.id}`, 0, -h / 2 - 14);
  ctx.fillText(`${sprite.speed.toFixed(1)} m/s`, 0, -h / 2 - 3);
  ctx.restore();
}

function drawHud(ctx: CanvasRenderingContext2D, hud: Hud, scene: SceneModel): void {
  ctx.fillStyle = "rgba(0,0,0,0.55)";
  ctx.fillRect(10, 10, 250, 86);
  ctx.fillStyle = "#e0e0e0";
  ctx.font = "13px monospace";
  ctx.textAlign = "left";
  const fmt = (v: number | null, unit: string, digits = 1) =>
    v === null ? "-" : `${v.toFixed(digits)} ${unit}`;
  ctx.fillText(`ego speed ${fmt(hud.egoSpeed, "m/s")}`, 18, 30);
  ctx.fillText(`gap       ${fmt(hud.gap, "m")}`, 18, 48);
  ctx.fillText(`ttc       ${fmt(hud.ttc, "s")}`, 18, 66);
  ctx.fillText(`elapsed   ${hud.elapsed.toFixed(1)} s`, 18, 84);
  if (scene.banner) {
    ctx.fillStyle = "#b71c1c";
    ctx.fillRect(10, ctx.canvas.height - 40, ctx.canvas.width - 20, 30);
    ctx.fillStyle = "#ffffff";
    ctx.fillText(scene.banner, 20, ctx.canvas.height - 20);
  }
}
