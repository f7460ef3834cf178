import init, { pulse_profile, dd_schedule, ideal_dd_populations } from "./pkg/phonon_dd_web.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"];

function plot(canvas, x, series, { xlabel = "", ylabel = "", ymin, ymax } = {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, L = 60, R = 110, T = 10, B = 30;
  ctx.clearRect(0, 0, W, H);
  const all = series.flatMap(s => s.y);
  const lo = ymin ?? Math.min(...all), hi = ymax ?? Math.max(...all);
  const span = hi - lo || 1;
  const x0 = x[0], x1 = x[x.length - 1];
  const px = v => L + (v - x0) / (x1 - x0 || 1) * (W - L - R);
  const py = v => H - B - (v - lo) / span * (H - T - B);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(L, T, W - L - R, H - T - B);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(hi.toPrecision(4), 4, T + 10);
  ctx.fillText(lo.toPrecision(4), 4, H - B);
  ctx.fillText(x0.toPrecision(3), L, H - 12);
  ctx.fillText(x1.toPrecision(4), W - R - 30, H - 12);
  ctx.fillText(xlabel, (W - R) / 2, H - 12);
  ctx.fillText(ylabel, 4, H / 2);
  series.forEach((s, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    ctx.beginPath();
    s.y.forEach((v, j) => (j ? ctx.lineTo(px(x[j]), py(v)) : ctx.moveTo(px(x[j]), py(v))));
    ctx.stroke();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fillText(s.name, W - R + 8, T + 12 + 14 * i);
  });
}

function report(el, f) {
  try {
    el.classList.remove("err");
    return f();
  } catch (e) {
    el.classList.add("err");
    el.textContent = String(e.message ?? e);
  }
}

function values(form) {
  return Object.fromEntries(new FormData(form).entries());
}

function designPulse(ev) {
  ev?.preventDefault();
  const v = values(document.getElementById("pulse-form"));
  const out = document.getElementById("pulse-out");
  report(out, () => {
    const p = JSON.parse(pulse_profile(+v.tp, +v.tud, +v.sigma, +v.w0, +v.phase));
    out.textContent = `k = ${p.strength.toFixed(5)}   φ = ${p.phase.toFixed(6)} rad   plateau Δω/2π = ${p.excursion_khz.toFixed(1)} kHz`;
    plot(document.getElementById("pulse-plot"), p.t_us, [{ name: "ω/2π [MHz]", y: p.omega_mhz }], { xlabel: "t [µs]" });
  });
}

function drawSchedule(canvas, view, modes) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, L = 60, R = 20;
  ctx.clearRect(0, 0, W, H);
  const row = m => 20 + (modes - 1 - m) * (H - 40) / Math.max(modes - 1, 1);
  ctx.font = "11px sans-serif";
  for (let m = 0; m < modes; m++) {
    ctx.strokeStyle = "#bbb";
    ctx.beginPath();
    ctx.moveTo(L, row(m));
    ctx.lineTo(W - R, row(m));
    ctx.stroke();
    ctx.fillStyle = "#444";
    ctx.fillText(`mode ${m}`, 4, row(m) + 4);
  }
  ctx.fillStyle = "#d62728";
  for (const f of view.flips) {
    for (const m of f.modes) {
      ctx.fillRect(L + f.t * (W - L - R) - 2, row(m) - 7, 4, 14);
    }
  }
}

function synthesise(ev) {
  ev?.preventDefault();
  const v = values(document.getElementById("schedule-form"));
  const out = document.getElementById("schedule-out");
  report(out, () => {
    const view = JSON.parse(dd_schedule(+v.modes, +v.reps, v.protected, v.swaps));
    const bad = view.dwell.filter(d => !d.ok).map(d => `(${d.j},${d.k})`);
    out.textContent = `flips per mode: ${view.pulse_counts.join(", ")}   signed dwell: ${view.passed ? "all pairs cancel" : "fails on " + bad.join(" ")}`;
    drawSchedule(document.getElementById("schedule-plot"), view, +v.modes);
    document.getElementById("schedule-text").textContent = view.text;
  });
}

function populations(ev) {
  ev?.preventDefault();
  const form = document.getElementById("pop-form");
  const v = values(form);
  const out = document.getElementById("pop-out");
  report(out, () => {
    const p = JSON.parse(ideal_dd_populations(+v.modes, +v.d, v.initial, +v.reps, form.decouple.checked));
    out.textContent = `T = ${p.total_time_us.toFixed(2)} µs   ⟨E⟩ = ${p.error.toExponential(3)}   ${p.events} schedule events`;
    const series = p.labels.map((name, i) => ({ name: `|${name}⟩`, y: p.series[i] }));
    plot(document.getElementById("pop-plot"), p.t_us, series, { xlabel: "t [µs]", ymin: 0, ymax: 1 });
  });
}

await init();
document.getElementById("pulse-form").addEventListener("submit", designPulse);
document.getElementById("schedule-form").addEventListener("submit", synthesise);
document.getElementById("pop-form").addEventListener("submit", populations);
designPulse();
synthesise();
populations();
