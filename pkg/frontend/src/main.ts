// Browser bootstrap: connect, bind keys, run the render/send loop.

import { CockpitClient } from "./client.js";
import { bindKey } from "./input.js";
import { drawScene } from "./render.js";

function param(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

const url = param("server", `ws://${window.location.hostname || "127.0.0.1"}:8700`);
const role = param("role", "driver") === "spectator" ? "spectator" : "driver";

const canvas = document.getElementById("cockpit") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;

function connect(): CockpitClient {
  const socket = new WebSocket(url);
  const client = new CockpitClient(socket as never, role);
  return client;
}

let client = connect();

window.addEventListener("keydown", (ev) => {
  if (ev.key === "o" || ev.key === "O") {
    client.scene.occlusion = !client.scene.occlusion;
    return;
  }
  if (ev.key === "r" || ev.key === "R") {
    client = connect(); // manual reconnect; scene resyncs from next frame
    return;
  }
  if (bindKey(client.input, ev.key, true)) ev.preventDefault();
});
window.addEventListener("keyup", (ev) => {
  if (bindKey(client.input, ev.key, false)) ev.preventDefault();
});

function pollGamepad(): void {
  const pad = navigator.getGamepads?.()[0];
  if (!pad) {
    client.input.setAxes(null, null);
    return;
  }
  // common layout: trigger axes in [-1, 1], rest position -1
  const throttle = pad.buttons[7]?.value ?? (pad.axes[2] + 1) / 2;
  const brake = pad.buttons[6]?.value ?? (pad.axes[3] + 1) / 2;
  client.input.setAxes(throttle, brake);
}

function loop(): void {
  pollGamepad();
  client.pump();
  drawScene(ctx, client.scene);
  if (client.reconnectPrompt) {
    ctx.fillStyle = "#ffffff";
    ctx.font = "16px monospace";
    ctx.textAlign = "center";
    ctx.fillText("disconnected - press R to reconnect",
                 canvas.width / 2, canvas.height / 2);
  }
  requestAnimationFrame(loop);
}

requestAnimationFrame(loop);
