import init, { compare, angleProfile, gaussian } from "./pkg/sliced_wasm.js";

const SCALE = 160;
const plane = document.getElementById("plane");
const profile = document.getElementById("profile");
const pts = { mu: [], nu: [] };

const $ = (id) => document.getElementById(id);
const fmt = (x) => x.toPrecision(5);

function toWorld(ev) {
  const r = plane.getBoundingClientRect();
  return [(ev.clientX - r.left - plane.width / 2) / SCALE, (plane.height / 2 - (ev.clientY - r.top)) / SCALE];
}

function drawPlane() {
  const g = plane.getContext("2d");
  g.clearRect(0, 0, plane.width, plane.height);
  g.strokeStyle = "#eee";
  g.beginPath();
  g.moveTo(plane.width / 2, 0); g.lineTo(plane.width / 2, plane.height);
  g.moveTo(0, plane.height / 2); g.lineTo(plane.width, plane.height / 2);
  g.stroke();
  for (const [key, colour] of [["mu", "#1f5fbf"], ["nu", "#d9730d"]]) {
    g.fillStyle = colour;
    for (const [x, y] of pts[key]) {
      g.beginPath();
      g.arc(plane.width / 2 + x * SCALE, plane.height / 2 - y * SCALE, 4, 0, 2 * Math.PI);
      g.fill();
    }
  }
}

function drawProfile(values) {
  const g = profile.getContext("2d");
  g.clearRect(0, 0, profile.width, profile.height);
  if (!values) return;
  const top = Math.max(...values, 1e-12);
  g.strokeStyle = "#333";
  g.beginPath();
  values.forEach((v, i) => {
    const x = (i / (values.length - 1)) * profile.width;
    const y = profile.height - 4 - (v / top) * (profile.height - 8);
    i === 0 ? g.moveTo(x, y) : g.lineTo(x, y);
  });
  g.stroke();
  g.fillStyle = "#666";
  g.fillText(`max ${fmt(top)}`, 4, 12);
  g.fillText("0", 2, profile.height - 2);
  g.fillText("π", profile.width - 10, profile.height - 2);
}

function flat(list) {
  return [Float64Array.from(list.flat()), Float64Array.from(list.map(() => 1))];
}

function recompute() {
  drawPlane();
  if (pts.mu.length === 0 || pts.nu.length === 0) {
    for (const id of ["sw", "w1", "ratio"]) $(id).textContent = "–";
    drawProfile(null);
    return;
  }
  const [a, aw] = flat(pts.mu);
  const [b, bw] = flat(pts.nu);
  try {
    const [sw, se, w1] = compare(a, aw, b, bw, Number($("ndirs").value), Number($("seed").value));
    $("sw").textContent = `${fmt(sw)} ± ${fmt(se)}`;
    $("w1").textContent = fmt(w1);
    $("ratio").textContent = w1 > 0 ? fmt(sw / w1) : "–";
    drawProfile(angleProfile(a, aw, b, bw, 180));
  } catch (e) {
    $("sw").textContent = String(e);
  }
}

function updateGaussian() {
  const eps = 10 ** Number($("eps").value);
  $("epsval").textContent = `ε = ${fmt(eps)}`;
  const [sw, w1] = gaussian(eps);
  $("gsw").textContent = fmt(sw);
  $("gw1").textContent = fmt(w1);
  $("gratio").textContent = fmt(sw / (eps * eps * Math.abs(Math.log(eps))));
}

await init();
plane.addEventListener("click", (ev) => {
  pts[ev.shiftKey ? "nu" : "mu"].push(toWorld(ev));
  recompute();
});
$("clear").addEventListener("click", () => { pts.mu = []; pts.nu = []; recompute(); });
$("ndirs").addEventListener("change", recompute);
$("seed").addEventListener("change", recompute);
$("eps").addEventListener("input", updateGaussian);
recompute();
updateGaussian();
