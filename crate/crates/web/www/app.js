import init, { segment_rates, power_profile, approach } from "./pkg/bearguard_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function frame(canvas, xmin, xmax, ymin, ymax, pad = 40) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  const sx = (x) => pad + ((x - xmin) / (xmax - xmin)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - ymin) / (ymax - ymin)) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  return { ctx, sx, sy, w, h, pad };
}

function polyline(ctx, pts, color, width = 2) {
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.beginPath();
  pts.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
  ctx.stroke();
  ctx.lineWidth = 1;
}

function report(id, fn) {
  try {
    $(id).classList.remove("err");
    fn();
  } catch (e) {
    $(id).classList.add("err");
    $(id).textContent = String(e.message ?? e);
  }
}

function runRates() {
  report("r-out", () => {
    const p = num("r-p");
    const r = JSON.parse(segment_rates(p, num("r-n"), num("r-segs"), num("r-seed")));
    // log10 p on x, rate on y
    const f = frame($("r-canvas"), -4, -1, 0, 1);
    polyline(f.ctx, r.curve.map(([q, s]) => [f.sx(Math.log10(q)), f.sy(s)]), "#2a6");
    for (const e of [-4, -3, -2, -1]) f.ctx.fillText(`1e${e}`, f.sx(e) - 10, f.h - f.pad + 14);
    for (const v of [0, 0.5, 1]) f.ctx.fillText(v.toFixed(1), 8, f.sy(v) + 4);
    if (p > 0) {
      const x = f.sx(Math.log10(p));
      f.ctx.fillStyle = "#c33";
      f.ctx.beginPath();
      f.ctx.arc(x, f.sy(r.monte_carlo), 5, 0, 2 * Math.PI);
      f.ctx.fill();
      f.ctx.strokeStyle = "#c33";
      f.ctx.beginPath();
      f.ctx.moveTo(x, f.sy(r.monte_carlo - 4 * r.standard_error));
      f.ctx.lineTo(x, f.sy(r.monte_carlo + 4 * r.standard_error));
      f.ctx.stroke();
    }
    $("r-out").textContent =
      `closed form ${r.closed_form.toFixed(5)}   simulated ${r.monte_carlo.toFixed(5)} ` +
      `over ${r.segments} segments   (${((r.monte_carlo - r.closed_form) / r.standard_error).toFixed(2)} SE)`;
  });
}

const days = (d) => (d === null ? "unbounded" : `${d.toFixed(2)} days`);

function runPower() {
  report("p-out", () => {
    const horizon = num("p-horizon");
    const r = JSON.parse(power_profile(num("p-duty"), num("p-panel"), num("p-derate"), num("p-day"), horizon));
    const f = frame($("p-canvas"), 0, horizon, 0, r.capacity_wh);
    polyline(f.ctx, r.soc.map(([t, e]) => [f.sx(t), f.sy(e)]), "#36c");
    for (let d = 0; d <= horizon; d += Math.max(1, Math.round(horizon / 10)))
      f.ctx.fillText(`${d}d`, f.sx(d) - 6, f.h - f.pad + 14);
    f.ctx.fillText(`${r.capacity_wh.toFixed(1)} Wh`, 2, f.sy(r.capacity_wh) + 4);
    const rows = r.sweep
      .filter((_, i) => i % 2 === 0)
      .map(([d, rt]) => `  ${d.toFixed(2)}  ${days(rt)}`)
      .join("\n");
    $("p-out").textContent =
      `average draw ${r.average_draw_mw.toFixed(1)} mW\n` +
      `runtime without solar ${days(r.runtime_no_solar)}, with solar ${days(r.runtime_solar)}\n` +
      `simulated: ${r.depleted_day === null ? "survives the horizon" : `empty at day ${r.depleted_day.toFixed(2)}`}\n` +
      `largest duty cycle lasting 30 days: ${r.max_duty_for_30_days === null ? "none" : r.max_duty_for_30_days.toFixed(4)}\n` +
      `duty cycle sweep (with solar):\n${rows}`;
  });
}

function runApproach() {
  report("a-out", () => {
    const human = $("a-human").checked;
    const r = JSON.parse(
      approach(num("a-fov"), num("a-range"), num("a-sx"), num("a-sy"), num("a-ex"), num("a-ey"),
        human ? num("a-hx") : NaN, num("a-hy"), num("a-seed")),
    );
    const canvas = $("a-canvas");
    const ctx = canvas.getContext("2d");
    ctx.clearRect(0, 0, canvas.width, canvas.height);

    // plan view, left half: camera at the origin looking along +x
    const R = Math.max(r.max_detection_range, ...r.bear_path.flat().map(Math.abs)) * 1.05;
    const size = 400, ox = 20, oy = 210;
    const px = (x) => ox + (x / R) * size;
    const py = (y) => oy - (y / R) * (size / 2);
    const half = (r.horizontal_fov / 2) * Math.PI / 180;
    ctx.fillStyle = "rgba(60,160,90,0.12)";
    ctx.beginPath();
    ctx.moveTo(px(0), py(0));
    for (let a = -half; a <= half + 1e-9; a += half / 30)
      ctx.lineTo(px(r.max_detection_range * Math.cos(a)), py(r.max_detection_range * Math.sin(a)));
    ctx.closePath();
    ctx.fill();
    polyline(ctx, r.bear_path.map(([x, y]) => [px(x), py(y)]), "#8a5a2b");
    ctx.fillStyle = "#000";
    ctx.fillRect(px(0) - 4, py(0) - 4, 8, 8);
    if (r.human) {
      ctx.fillStyle = "#c33";
      ctx.beginPath();
      ctx.arc(px(r.human[0]), py(r.human[1]), 5, 0, 2 * Math.PI);
      ctx.fill();
    }

    // timeline, right half
    const t0 = 470, tw = 410, t = (s) => t0 + (s / 60) * tw;
    ctx.fillStyle = "#555";
    ctx.fillText("segments", t0, 60);
    for (const s of r.segments) {
      ctx.fillStyle = s.bear ? "#8a5a2b" : "#ddd";
      ctx.fillRect(t(s.end_time - 0.9), 70, tw / 60 - 1, 30);
    }
    ctx.fillStyle = "#555";
    ctx.fillText("sprays", t0, 130);
    ctx.fillText("inhibited", t0, 190);
    ctx.fillStyle = "#36c";
    for (const s of r.sprays) ctx.fillRect(t(s) - 2, 140, 4, 30);
    ctx.fillStyle = "#c33";
    for (const s of r.inhibits) ctx.fillRect(t(s) - 1, 200, 2, 30);
    ctx.fillStyle = "#555";
    for (let s = 0; s <= 60; s += 10) ctx.fillText(`${s}s`, t(s) - 6, 250);

    const bear = r.segments.filter((s) => s.bear).length;
    $("a-out").textContent =
      `${r.segments.length} segments, ${bear} bear\n` +
      `sprays at ${r.sprays.map((s) => s.toFixed(1)).join(", ") || "none"}\n` +
      `inhibited ${r.inhibits.length} times`;
  });
}

await init();
$("r-run").onclick = runRates;
$("p-run").onclick = runPower;
$("a-run").onclick = runApproach;
runRates();
runPower();
runApproach();
