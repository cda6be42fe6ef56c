import init, { pmf_view, rate_curves, efficiency_curve } from "./pkg/rach_web.js";

const COLORS = ["#3465a4", "#f57900", "#4e9a06", "#cc0000", "#75507b", "#c4a000", "#06989a"];
const PAD = { left: 48, right: 16, top: 12, bottom: 32 };

const num = (id) => Number(document.getElementById(id).value);

function call(fn, statsId) {
  const out = JSON.parse(fn());
  const stats = document.getElementById(statsId);
  if (out.error) {
    stats.textContent = out.error;
    stats.className = "stats error";
    return null;
  }
  stats.className = "stats";
  return out;
}

function axes(ctx, w, h, xLabels, yMax) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.beginPath();
  ctx.moveTo(PAD.left, PAD.top);
  ctx.lineTo(PAD.left, h - PAD.bottom);
  ctx.lineTo(w - PAD.right, h - PAD.bottom);
  ctx.stroke();
  for (let i = 0; i <= 4; i++) {
    const v = (yMax * i) / 4;
    const y = h - PAD.bottom - ((h - PAD.top - PAD.bottom) * i) / 4;
    ctx.fillText(v.toFixed(2), 4, y + 4);
  }
  const step = Math.max(1, Math.ceil(xLabels.length / 30));
  const slot = (w - PAD.left - PAD.right) / xLabels.length;
  xLabels.forEach((label, i) => {
    if (i % step === 0) ctx.fillText(String(label), PAD.left + slot * (i + 0.5) - 4, h - PAD.bottom + 14);
  });
  return slot;
}

function drawBars(canvas, series, yMax) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const n = series[0].length;
  const slot = axes(ctx, w, h, [...Array(n).keys()], yMax);
  const bar = (slot * 0.8) / series.length;
  series.forEach((values, s) => {
    ctx.fillStyle = COLORS[s];
    values.forEach((v, i) => {
      const bh = ((h - PAD.top - PAD.bottom) * v) / yMax;
      ctx.fillRect(PAD.left + slot * i + slot * 0.1 + bar * s, h - PAD.bottom - bh, bar, bh);
    });
  });
}

function drawLines(canvas, xLabels, series, yMax, marker) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const slot = axes(ctx, w, h, xLabels, yMax);
  const y = (v) => h - PAD.bottom - ((h - PAD.top - PAD.bottom) * v) / yMax;
  series.forEach((values, s) => {
    ctx.strokeStyle = COLORS[s % COLORS.length];
    ctx.lineWidth = 2;
    ctx.beginPath();
    values.forEach((v, i) => {
      const x = PAD.left + slot * (i + 0.5);
      i === 0 ? ctx.moveTo(x, y(v)) : ctx.lineTo(x, y(v));
    });
    ctx.stroke();
  });
  if (marker !== undefined) {
    const x = PAD.left + slot * (marker.index + 0.5);
    ctx.fillStyle = "#000";
    ctx.beginPath();
    ctx.arc(x, y(marker.value), 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function updatePmf() {
  const out = call(
    () => pmf_view(num("pmf-m"), num("pmf-k"), num("pmf-t"), num("pmf-n"), num("pmf-seed")),
    "pmf-stats",
  );
  if (!out) return;
  const yMax = Math.max(...out.exact, ...out.simulated, 1e-9);
  drawBars(document.getElementById("pmf-canvas"), [out.exact, out.simulated], yMax * 1.1);
  const rows = out.exact.map(
    (p, d) => `d=${d}  exact ${p.toFixed(6)} (${out.exact_fractions[d]})  simulated ${out.simulated[d].toFixed(6)}`,
  );
  rows.push(
    `E[S_D] = ${out.expected_successes.toFixed(6)}   success rate = ${out.success_rate === null ? "n/a" : out.success_rate.toFixed(6)}` +
      `   efficiency = ${out.efficiency.toFixed(6)}   TV distance = ${out.tv_distance.toFixed(5)}`,
  );
  document.getElementById("pmf-stats").textContent = rows.join("\n");
}

function updateRate() {
  const ks = document
    .getElementById("rate-k")
    .value.split(",")
    .map((s) => parseInt(s.trim(), 10))
    .filter((k) => Number.isInteger(k) && k > 0);
  const out = call(() => rate_curves(num("rate-m"), num("rate-t"), new Uint32Array(ks)), "rate-stats");
  if (!out) return;
  const xs = [...Array(num("rate-t")).keys()].map((i) => i + 1);
  drawLines(document.getElementById("rate-canvas"), xs, out.map((c) => c.success_rate), 1);
  document.getElementById("rate-legend").innerHTML = out
    .map((c, i) => `<span><i class="swatch" style="background:${COLORS[i % COLORS.length]}"></i>K=${c.slots}</span>`)
    .join("");
  document.getElementById("rate-stats").textContent = "x axis: number of users T";
}

function updateEfficiency() {
  const out = call(() => efficiency_curve(num("eff-m"), num("eff-t"), num("eff-k")), "eff-stats");
  if (!out) return;
  const xs = out.efficiency.map((_, i) => i + 1);
  const yMax = Math.max(...out.efficiency, ...out.success_rate, 1e-9) * 1.1;
  drawLines(document.getElementById("eff-canvas"), xs, [out.efficiency, out.success_rate], yMax, {
    index: out.optimal_slots - 1,
    value: out.optimal_efficiency,
  });
  document.getElementById("eff-stats").textContent =
    `blue: efficiency, orange: success rate, x axis: K\n` +
    `best K = ${out.optimal_slots}, efficiency = ${out.optimal_efficiency.toFixed(6)} (${out.optimal_efficiency_fraction})`;
}

await init();
for (const [prefix, update] of [["pmf", updatePmf], ["rate", updateRate], ["eff", updateEfficiency]]) {
  document.querySelectorAll(`#${prefix} input`).forEach((el) => el.addEventListener("change", update));
  update();
}
