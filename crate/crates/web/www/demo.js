import init, { kernelCurve, densityDemo, regressionDemo } from "./pkg/fksum_web.js";

const $ = (id) => document.getElementById(id);

function frame(canvas, xr, yr) {
  const ctx = canvas.getContext("2d");
  const pad = 30, w = canvas.width, h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  const sx = (x) => pad + ((x - xr[0]) / (xr[1] - xr[0])) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - yr[0]) / (yr[1] - yr[0])) * (h - 2 * pad);
  ctx.strokeStyle = "#888";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(pad, sy(yr[0]));
  ctx.lineTo(w - pad, sy(yr[0]));
  ctx.stroke();
  ctx.fillStyle = "#666";
  ctx.font = "11px sans-serif";
  ctx.fillText(xr[0].toFixed(1), pad - 8, h - pad + 14);
  ctx.fillText(xr[1].toFixed(1), w - pad - 10, h - pad + 14);
  ctx.fillText(yr[1].toPrecision(3), 2, pad);
  return { ctx, sx, sy };
}

function line(p, xs, ys, color, dash = []) {
  const { ctx, sx, sy } = p;
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.setLineDash(dash);
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(ys[i])) : ctx.moveTo(sx(x), sy(ys[i]))));
  ctx.stroke();
  ctx.setLineDash([]);
}

function points(p, xs, ys, color) {
  const { ctx, sx, sy } = p;
  ctx.fillStyle = color;
  for (let i = 0; i < xs.length; i++) ctx.fillRect(sx(xs[i]) - 1, sy(ys[i]) - 1, 2, 2);
}

function guarded(info, f) {
  try {
    f();
    $(info).classList.remove("err");
  } catch (e) {
    $(info).textContent = e.message ?? String(e);
    $(info).classList.add("err");
  }
}

function drawKernel() {
  guarded("k-info", () => {
    const c = kernelCurve($("k-beta").value, 401);
    const peak = Math.max(...c.y, 0.4);
    const p = frame($("k-plot"), [-5, 5], [0, peak * 1.1]);
    const gauss = Array.from(c.x, (u) => Math.exp(-0.5 * u * u) / Math.sqrt(2 * Math.PI));
    line(p, c.x, gauss, "#999", [5, 4]);
    line(p, c.x, c.y, "#1f77b4");
    $("k-info").textContent = `peak ${peak.toFixed(4)}`;
  });
}

function sliderText(rule, value, out) {
  $(out).textContent = rule === "cv" ? "" : Number(value).toFixed(2);
}

function drawDensity() {
  const rule = $("d-rule").value;
  const value = Number($("d-value").value);
  sliderText(rule, value, "d-value-text");
  $("d-value").disabled = rule === "cv";
  guarded("d-info", () => {
    const d = densityDemo(Number($("d-n").value), Number($("d-seed").value), rule, value, 400);
    const top = Math.max(...d.estimate, ...d.truth) * 1.1;
    const p = frame($("d-plot"), [d.grid[0], d.grid[d.grid.length - 1]], [0, top]);
    line(p, d.grid, d.truth, "#999");
    line(p, d.grid, d.estimate, "#1f77b4");
    $("d-info").textContent = `h = ${d.h.toPrecision(4)}, ${d.sample.length} points, ${d.millis.toFixed(0)} ms including bandwidth selection`;
  });
}

function drawRegression() {
  const rule = $("r-rule").value;
  const value = Number($("r-value").value);
  sliderText(rule, value, "r-value-text");
  $("r-value").disabled = rule === "cv";
  guarded("r-info", () => {
    const r = regressionDemo(Number($("r-n").value), Number($("r-seed").value), rule, value, 300);
    const lo = Math.min(...r.truth) - 10, hi = Math.max(...r.truth) + 10;
    const p = frame($("r-plot"), [0, 10], [lo, hi]);
    points(p, r.xs, r.ys, "rgba(0,0,0,0.25)");
    line(p, r.grid, r.truth, "#999");
    line(p, r.grid, r.nw, "#2ca02c");
    line(p, r.grid, r.loclin, "#d62728");
    $("r-info").textContent = `h = ${r.h.toPrecision(4)}`;
  });
}

await init();
for (const id of ["k-beta"]) $(id).addEventListener("input", drawKernel);
for (const id of ["d-n", "d-seed", "d-rule", "d-value"]) $(id).addEventListener("input", drawDensity);
for (const id of ["r-n", "r-seed", "r-rule", "r-value"]) $(id).addEventListener("input", drawRegression);
drawKernel();
drawDensity();
drawRegression();
