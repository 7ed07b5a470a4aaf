import init, { Explorer, fixtureSvg, susScore } from "./pkg/audiotact_web.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const GAP_MS = 400;

const $ = (id) => document.getElementById(id);
const svg = $("map");
const logBox = $("log");

let explorer;
let clock0 = performance.now();
let flushTimer;
const nodes = new Map();
// resting fingers pinned with shift-click: contact id -> marker
const pinned = new Map();
let nextPinned = 10;

const now = () => Math.round(performance.now() - clock0);

function log(line) {
  logBox.textContent += line + "\n";
  logBox.scrollTop = logBox.scrollHeight;
}

function say(text) {
  if ($("speak").checked && "speechSynthesis" in window) {
    speechSynthesis.cancel();
    speechSynthesis.speak(new SpeechSynthesisUtterance(text));
  }
}

function el(name, attrs) {
  const n = document.createElementNS(SVG_NS, name);
  for (const [k, v] of Object.entries(attrs)) n.setAttribute(k, v);
  return n;
}

function draw(map) {
  svg.replaceChildren();
  nodes.clear();
  const [x0, y0, x1, y1] = map.bounds;
  svg.setAttribute("viewBox", `${x0} ${y0} ${x1 - x0} ${y1 - y0}`);
  for (const e of map.elements) {
    const g = e.geometry;
    const pts = (g.vertices || []).map((p) => `${p.x},${p.y}`).join(" ");
    let n;
    if (g.type === "point") n = el("circle", { cx: g.x, cy: g.y, r: e.symbol_radius || 5 });
    else if (g.type === "polyline") n = el("polyline", { points: pts });
    else n = el("polygon", { points: pts });
    n.setAttribute("class", e.kind);
    const title = el("title", {});
    title.textContent = e.name;
    n.appendChild(title);
    svg.appendChild(n);
    nodes.set(e.id, n);
  }
}

function toMap(ev) {
  const p = new DOMPoint(ev.clientX, ev.clientY).matrixTransform(svg.getScreenCTM().inverse());
  return [p.x, p.y];
}

function highlight(id) {
  for (const n of nodes.values()) n.classList.remove("selected");
  if (id && nodes.has(id)) nodes.get(id).classList.add("selected");
}

function show(step) {
  const out = JSON.parse(step);
  for (const g of out.gestures) log(`${g.t}\t${g.kind} at ${g.pos.x.toFixed(1)},${g.pos.y.toFixed(1)}`);
  for (const a of out.announcements) {
    log(`${a.t}\t${a.element_id || "-"}\t${a.text}`);
    highlight(a.element_id);
    say(a.text);
  }
}

function feed(id, phase, [x, y]) {
  try {
    show(explorer.touch(now(), id, phase, x, y));
  } catch (e) {
    log(`error: ${e.message || e}`);
  }
  clearTimeout(flushTimer);
  flushTimer = setTimeout(() => show(explorer.flush()), GAP_MS + 50);
}

function start() {
  for (const m of pinned.values()) m.remove();
  pinned.clear();
  explorer = new Explorer(fixtureSvg(), $("mode").value);
  clock0 = performance.now();
  draw(JSON.parse(explorer.mapJson()));
  log(`-- ${$("mode").value}`);
}

function pinToggle(ev) {
  const p = toMap(ev);
  for (const [id, m] of pinned) {
    if (Math.hypot(m.cx.baseVal.value - p[0], m.cy.baseVal.value - p[1]) < 10) {
      feed(id, "up", [m.cx.baseVal.value, m.cy.baseVal.value]);
      m.remove();
      pinned.delete(id);
      return;
    }
  }
  const id = nextPinned++;
  const marker = el("circle", { cx: p[0], cy: p[1], r: 8, class: "finger" });
  svg.appendChild(marker);
  pinned.set(id, marker);
  feed(id, "down", p);
}

svg.addEventListener("pointerdown", (ev) => {
  if (ev.shiftKey) return pinToggle(ev);
  svg.setPointerCapture(ev.pointerId);
  feed(ev.pointerId, "down", toMap(ev));
});
svg.addEventListener("pointermove", (ev) => {
  const p = toMap(ev);
  if (ev.buttons && !ev.shiftKey) feed(ev.pointerId, "move", p);
  hover(p);
});
svg.addEventListener("pointerup", (ev) => {
  if (!ev.shiftKey) feed(ev.pointerId, "up", toMap(ev));
});

function hover([x, y]) {
  const tol = ["street", "poi", "river"].map((k) => Number($(`tol-${k}`).value));
  try {
    const hit = JSON.parse(explorer.hit(x, y, ...tol));
    $("hover").textContent = hit
      ? `${x.toFixed(1)}, ${y.toFixed(1)}: ${hit.name} (${hit.kind}, ${hit.distance.toFixed(2)} away)`
      : `${x.toFixed(1)}, ${y.toFixed(1)}: nothing`;
  } catch (e) {
    $("hover").textContent = e.message || String(e);
  }
}

function susForm() {
  const form = $("sus");
  for (let i = 1; i <= 10; i++) {
    const label = document.createElement("label");
    label.textContent = `Q${i} `;
    const input = document.createElement("input");
    Object.assign(input, { type: "number", min: 1, max: 5, value: 3, name: `q${i}` });
    label.appendChild(input);
    form.appendChild(label);
  }
  const update = () => {
    const answers = Int32Array.from(form.querySelectorAll("input"), (i) => Number(i.value));
    try {
      const r = JSON.parse(susScore(answers));
      $("sus-result").textContent = `score ${r.score}` + (r.adjective ? ` (${r.adjective})` : "");
    } catch (e) {
      $("sus-result").textContent = e.message || String(e);
    }
  };
  form.addEventListener("input", update);
  update();
}

await init();
$("mode").addEventListener("change", start);
start();
susForm();
