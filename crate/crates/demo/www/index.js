import init, { simulate_spins, hermite_curve, sheet_pairings, pairing_variance } from "../pkg/ckpz_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function fail(canvas, err) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#a00";
  ctx.fillText(String(err), 10, 20);
}

function drawSpins() {
  const canvas = $("spins");
  const frames = 120;
  let spins;
  try {
    spins = simulate_spins(num("eps"), num("gamma"), num("window"), num("horizon"), frames, BigInt(num("seed")));
  } catch (e) {
    return fail(canvas, e);
  }
  const sites = spins.length / frames;
  canvas.width = sites;
  canvas.height = frames;
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(sites, frames);
  spins.forEach((s, k) => {
    const v = s > 0 ? 30 : 235;
    img.data.set([v, v, v, 255], 4 * k);
  });
  ctx.putImageData(img, 0, 0);
  canvas.style.width = "800px";
  canvas.style.height = "240px";
}

function plot(canvas, xs, ys, color, range = [Math.min(0, ...ys), Math.max(0, ...ys)]) {
  const ctx = canvas.getContext("2d");
  const [w, h] = [canvas.width, canvas.height];
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = range;
  const px = (x) => ((x - x0) / (x1 - x0)) * (w - 20) + 10;
  const py = (y) => h - 10 - ((y - y0) / (y1 - y0 || 1)) * (h - 20);
  ctx.strokeStyle = "#ccc";
  ctx.beginPath();
  ctx.moveTo(10, py(0));
  ctx.lineTo(w - 10, py(0));
  ctx.stroke();
  ctx.strokeStyle = color;
  ctx.beginPath();
  xs.forEach((x, k) => (k ? ctx.lineTo(px(x), py(ys[k])) : ctx.moveTo(px(x), py(ys[k]))));
  ctx.stroke();
}

function drawHermite() {
  const canvas = $("hermite");
  const n = num("hn");
  const half = Math.sqrt(2 * n + 1) + 4;
  const points = 801;
  let ys;
  try {
    ys = hermite_curve(n, Number($("hd").value), half, points);
  } catch (e) {
    return fail(canvas, e);
  }
  const xs = Array.from({ length: points }, (_, k) => -half + (2 * half * k) / (points - 1));
  canvas.getContext("2d").clearRect(0, 0, canvas.width, canvas.height);
  plot(canvas, xs, Array.from(ys), "#1f5fbf");
}

function drawSheet() {
  const canvas = $("sheet");
  const [n, t] = [num("sn"), num("st")];
  let draws;
  try {
    draws = sheet_pairings(n, t, num("ss"), 7n);
  } catch (e) {
    return fail(canvas, e);
  }
  const limit = pairing_variance(n, t);
  const sd = Math.sqrt(limit);
  const bins = 40;
  const [lo, hi] = [-4 * sd, 4 * sd];
  const width = (hi - lo) / bins;
  const counts = new Array(bins).fill(0);
  for (const x of draws) {
    const b = Math.floor((x - lo) / width);
    if (b >= 0 && b < bins) counts[b] += 1;
  }
  const centers = counts.map((_, b) => lo + (b + 0.5) * width);
  const density = counts.map((c) => c / (draws.length * width));
  const normal = centers.map((x) => Math.exp((-x * x) / (2 * limit)) / Math.sqrt(2 * Math.PI * limit));
  canvas.getContext("2d").clearRect(0, 0, canvas.width, canvas.height);
  const range = [0, Math.max(...density, ...normal)];
  plot(canvas, centers, density, "#888", range);
  plot(canvas, centers, normal, "#c0392b", range);
  const mean = draws.reduce((a, b) => a + b, 0) / draws.length;
  const variance = draws.reduce((a, x) => a + (x - mean) ** 2, 0) / (draws.length - 1);
  $("sheet-note").textContent =
    `sample variance ${variance.toFixed(4)}, limit 2t|G'|² = ${limit.toFixed(4)} (red curve: limiting Gaussian)`;
}

await init();
$("run-sim").onclick = drawSpins;
$("run-hermite").onclick = drawHermite;
$("run-sheet").onclick = drawSheet;
drawSpins();
drawHermite();
drawSheet();
