import init, { potential_curves, wiener_dichotomy, Simulation } from "./pkg/stokeslab_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const status = (msg) => { $("status").textContent = msg; };

function drawCurves() {
  let rows;
  try {
    rows = potential_curves(num("c-p"), num("c-kappa"), num("c-tmax"), 200);
  } catch (e) {
    return status(e.message);
  }
  status("");
  const cv = $("c-canvas");
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  const n = rows.length / 4;
  let ymax = 0;
  for (let i = 0; i < rows.length; i++) if (i % 4) ymax = Math.max(ymax, rows[i]);
  const tmax = rows[4 * (n - 1)];
  const colors = [null, "#000", "#1f77b4", "#ff7f0e"];
  for (let c = 1; c < 4; c++) {
    ctx.strokeStyle = colors[c];
    ctx.beginPath();
    for (let i = 0; i < n; i++) {
      const x = (rows[4 * i] / tmax) * (cv.width - 10) + 5;
      const y = cv.height - 5 - (rows[4 * i + c] / ymax) * (cv.height - 10);
      i ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
    }
    ctx.stroke();
  }
}

function runDichotomy() {
  status("running…");
  // Let the status repaint before the blocking call.
  setTimeout(() => {
    let rep;
    try {
      rep = wiener_dichotomy(num("w-paths"), num("w-coarse"), num("w-fine"), BigInt(num("w-seed")));
    } catch (e) {
      return status(e.message);
    }
    status("");
    const dts = rep.dts(), phi2 = rep.phi2(), b22 = rep.b22();
    const ratios = rep.phi2_ratios(), growth = rep.b22_growth();
    let html = "<tr><th>dt</th><th>median &Phi;&#8322; sup</th><th>ratio</th><th>median B22</th><th>growth per 4&times;</th></tr>";
    dts.forEach((dt, i) => {
      const r = i > 0 ? ratios[i - 1].toFixed(3) : "";
      const g = i > 1 ? growth[i - 2].toFixed(3) : "";
      html += `<tr><td>2^${Math.log2(dt)}</td><td>${phi2[i].toFixed(4)}</td><td>${r}</td><td>${b22[i].toFixed(4)}</td><td>${g}</td></tr>`;
    });
    $("w-table").innerHTML = html;
    rep.free();
  }, 10);
}

function heat(canvas, values, side, signed) {
  const ctx = canvas.getContext("2d");
  const cell = canvas.width / side;
  let m = 0;
  for (const v of values) m = Math.max(m, Math.abs(v));
  m = m || 1;
  for (let j = 0; j < side; j++) {
    for (let i = 0; i < side; i++) {
      const v = values[j * side + i] / m;
      let r, g, b;
      if (signed) {
        r = v > 0 ? 255 : Math.round(255 * (1 + v));
        b = v < 0 ? 255 : Math.round(255 * (1 - v));
        g = Math.round(255 * (1 - Math.abs(v)));
      } else {
        r = Math.round(255 * v);
        g = Math.round(80 * v);
        b = Math.round(255 * (1 - v));
      }
      ctx.fillStyle = `rgb(${r},${g},${b})`;
      // Row j is y = j·h; draw y upwards.
      ctx.fillRect(i * cell, canvas.height - (j + 1) * cell, cell + 1, cell + 1);
    }
  }
}

let sim = null;
let timer = null;

function stop() {
  if (timer !== null) cancelAnimationFrame(timer);
  timer = null;
}

function start() {
  stop();
  if (sim) sim.free();
  try {
    sim = new Simulation(num("s-n"), num("s-p"), num("s-kappa"), 1 / 1024, num("s-amp"), $("s-grad").checked, 7n);
  } catch (e) {
    sim = null;
    return status(e.message);
  }
  status("");
  const frame = () => {
    try {
      sim.advance(4);
    } catch (e) {
      stop();
      return status(e.message);
    }
    const side = sim.side();
    heat($("s-u"), sim.speed(), side, false);
    heat($("s-k"), sim.k_sto(), side, true);
    $("s-readout").textContent = `t = ${sim.time().toFixed(4)}   J(u) = ${sim.energy().toExponential(3)}`;
    timer = requestAnimationFrame(frame);
  };
  frame();
}

await init();
status("");
$("c-draw").onclick = drawCurves;
$("w-run").onclick = runDichotomy;
$("s-start").onclick = start;
$("s-stop").onclick = stop;
drawCurves();
