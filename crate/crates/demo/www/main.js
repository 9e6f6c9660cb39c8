import init, { deficiency, resolvent, walk } from "./pkg/resistnet_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

// Line plots of one or more series sharing an x axis; bars when opts.bars is set.
function plot(canvas, xs, series, opts = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const all = series.flatMap((s) => s.ys).filter(Number.isFinite);
  const lo = Math.min(0, ...all);
  const hi = Math.max(...all) || 1;
  const x0 = xs[0], x1 = xs[xs.length - 1];
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (y) => h - pad - ((y - lo) / (hi - lo || 1)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, py(0)); ctx.lineTo(w - pad, py(0));
  ctx.moveTo(pad, pad); ctx.lineTo(pad, h - pad);
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.fillText(hi.toPrecision(4), 2, pad);
  ctx.fillText(String(x0), pad, h - pad + 14);
  ctx.fillText(String(x1), w - pad - 20, h - pad + 14);

  series.forEach((s, k) => {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    if (opts.bars) {
      const bw = Math.max(1, (w - 2 * pad) / xs.length - 1);
      xs.forEach((x, i) => ctx.fillRect(px(x) - bw / 2, py(s.ys[i]), bw, py(0) - py(s.ys[i])));
    } else {
      ctx.beginPath();
      xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(s.ys[i])) : ctx.moveTo(px(x), py(s.ys[i]))));
      ctx.stroke();
    }
    ctx.fillText(s.label, w - pad - 160, pad + 14 * k);
  });
}

function guard(out, f) {
  try {
    out.classList.remove("err");
    f();
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e);
  }
}

function runDeficiency() {
  guard($("d-out"), () => {
    const r = JSON.parse(deficiency(num("d-m"), num("d-n")));
    const n = r.energy_partial_sums.length;
    const xs = Array.from({ length: n }, (_, i) => i + 1);
    // ℓ² sums blow up fast; plot them on a log scale next to the energy sums
    plot($("d-plot"), xs, [
      { label: "energy partial sums", ys: r.energy_partial_sums, color: "#1565c0" },
      { label: "log10 ℓ² partial sums", ys: r.l2_partial_sums.slice(0, n).map(Math.log10), color: "#c62828" },
    ]);
    $("d-out").textContent =
      `ξ = ${r.xi}\nenergy: ${r.energy_class}, final partial sum ${r.energy_partial_sums[n - 1].toPrecision(12)}\nℓ²: ${r.l2_verdict}`;
  });
}

function runResolvent() {
  guard($("r-out"), () => {
    const r = JSON.parse(resolvent($("r-model").value, num("r-m"), num("r-n"), num("r-x")));
    plot($("r-plot"), r.positions, [{ label: "u", ys: r.values, color: "#2e7d32" }]);
    $("r-out").textContent =
      `‖u‖₂ = ${r.l2_norm.toPrecision(8)} (contractive: ${r.contractive})\nenergy = ${r.energy.toPrecision(8)}\nresidual = ${r.residual.toExponential(2)}`;
  });
}

function runWalk() {
  guard($("w-out"), () => {
    const trials = num("w-trials");
    const r = JSON.parse(walk($("w-model").value, num("w-m"), num("w-n"), num("w-start"),
      num("w-steps"), trials, BigInt(num("w-seed"))));
    plot($("w-plot"), r.positions, [{ label: "endpoint frequency", ys: r.endpoints.map((c) => c / trials), color: "#6a1b9a" }], { bars: true });
    const mean = r.positions.reduce((s, x, i) => s + x * r.endpoints[i], 0) / trials;
    $("w-out").textContent = `exact first-step probability to the right: ${r.step_right_exact.toPrecision(6)}\nmean endpoint: ${mean.toFixed(3)}`;
  });
}

await init();
$("d-run").onclick = runDeficiency;
$("r-run").onclick = runResolvent;
$("w-run").onclick = runWalk;
runDeficiency();
runResolvent();
runWalk();
