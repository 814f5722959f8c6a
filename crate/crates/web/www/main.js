import init, { default_config, monitor_map, euler_curves, episode } from "./pkg/highway_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

const REASON_COLORS = ["#4caf50", "#9e9e9e", "#e53935", "#b71c1c", "#ff9800", "#ffc107"];
const SERIES_COLORS = ["#d32f2f", "#1976d2", "#222", "#7b1fa2", "#388e3c"];

function config() {
  return $("config").value;
}

function report(fn) {
  return () => {
    $("config-error").textContent = "";
    try {
      fn();
    } catch (e) {
      $("config-error").textContent = String(e.message ?? e);
    }
  };
}

// Line chart with axes. `series` is a list of {label, points: [[x, y]], color, dash}.
function plot(canvas, series, opts) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height;
  const m = { l: 55, r: 150, t: 15, b: 35 };
  ctx.clearRect(0, 0, W, H);
  const xs = series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = series.flatMap((s) => s.points.map((p) => p[1]));
  const x0 = opts.xmin ?? Math.min(...xs), x1 = opts.xmax ?? Math.max(...xs);
  const y0 = opts.ymin ?? Math.min(...ys), y1 = opts.ymax ?? Math.max(...ys);
  const sx = (x) => m.l + ((x - x0) / (x1 - x0 || 1)) * (W - m.l - m.r);
  const sy = (y) => H - m.b - ((y - y0) / (y1 - y0 || 1)) * (H - m.t - m.b);

  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  ctx.beginPath();
  ctx.moveTo(m.l, m.t);
  ctx.lineTo(m.l, H - m.b);
  ctx.lineTo(W - m.r, H - m.b);
  ctx.stroke();
  for (let i = 0; i <= 5; i++) {
    const xv = x0 + ((x1 - x0) * i) / 5, yv = y0 + ((y1 - y0) * i) / 5;
    ctx.fillText(xv.toFixed(1), sx(xv) - 10, H - m.b + 15);
    ctx.fillText(yv.toFixed(1), 5, sy(yv) + 4);
  }
  ctx.fillText(opts.xlabel, (W - m.r) / 2, H - 5);
  ctx.save();
  ctx.translate(12, m.t + 10);
  ctx.fillText(opts.ylabel, 0, 0);
  ctx.restore();

  ctx.save();
  ctx.beginPath();
  ctx.rect(m.l, m.t, W - m.l - m.r, H - m.t - m.b);
  ctx.clip();
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash ?? []);
    ctx.lineWidth = s.width ?? 1.5;
    ctx.beginPath();
    s.points.forEach(([x, y], i) => (i ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
    ctx.stroke();
    for (const [x, y] of s.markers ?? []) {
      ctx.fillStyle = s.color;
      ctx.fillRect(sx(x) - 3, sy(y) - 3, 6, 6);
    }
  }
  ctx.restore();
  ctx.setLineDash([]);
  series.forEach((s, i) => {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash ?? []);
    ctx.beginPath();
    ctx.moveTo(W - m.r + 10, m.t + 10 + 18 * i);
    ctx.lineTo(W - m.r + 35, m.t + 10 + 18 * i);
    ctx.stroke();
    ctx.fillStyle = "#333";
    ctx.fillText(s.label, W - m.r + 40, m.t + 14 + 18 * i);
  });
  ctx.setLineDash([]);
}

function drawMonitorMap() {
  const map = JSON.parse(monitor_map(config(), $("mm-action").value, num("mm-vo"), num("mm-gap"), 120));
  const canvas = $("mm-canvas");
  const ctx = canvas.getContext("2d");
  const n = map.gaps.length;
  const m = { l: 45, b: 30 };
  const cw = (canvas.width - m.l) / n, ch = (canvas.height - m.b) / n;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  // speeds grow upwards
  map.verdicts.forEach((row, i) =>
    row.forEach((code, j) => {
      ctx.fillStyle = REASON_COLORS[code];
      ctx.fillRect(m.l + j * cw, canvas.height - m.b - (i + 1) * ch, cw + 0.5, ch + 0.5);
    }),
  );
  ctx.fillStyle = "#000";
  const inv = map.invariant;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const x = m.l + j * cw, y = canvas.height - m.b - (i + 1) * ch;
      if (j + 1 < n && inv[i][j] !== inv[i][j + 1]) ctx.fillRect(x + cw - 1, y, 2, ch + 0.5);
      if (i + 1 < n && inv[i][j] !== inv[i + 1][j]) ctx.fillRect(x, y - 1, cw + 0.5, 2);
    }
  }
  ctx.font = "12px sans-serif";
  ctx.fillText("gap (m)", canvas.width / 2, canvas.height - 5);
  ctx.fillText("0", m.l, canvas.height - m.b + 14);
  ctx.fillText(String(num("mm-gap")), canvas.width - 30, canvas.height - m.b + 14);
  ctx.fillText("v_E", 5, 15);
  // cell centers sit half a cell inside [0, V]
  const vmax = map.speeds.at(-1) + map.speeds[0];
  ctx.fillText(String(Math.round(vmax)), 5, 30);
  ctx.fillText("0", 5, canvas.height - m.b);

  const used = new Set(map.verdicts.flat());
  $("mm-legend").innerHTML = map.legend
    .map((text, k) =>
      used.has(k) ? `<span><span class="swatch" style="background:${REASON_COLORS[k]}"></span>${text}</span>` : "",
    )
    .join("");
}

function drawEuler() {
  const r = JSON.parse(
    euler_curves(config(), num("eu-ve"), num("eu-vo"), num("eu-margin"), num("eu-coarse"), num("eu-fine")),
  );
  const names = Object.keys(r.curves);
  const minGap = Math.min(...names.map((k) => r.curves[k].min_gap));
  const tEnd = Math.max(...names.map((k) => r.curves[k].points.at(-1)[0]));
  const series = names.map((k, i) => ({
    label: k,
    points: r.curves[k].points,
    color: SERIES_COLORS[i],
    dash: k === "exact" ? [5, 3] : [],
  }));
  series.push({ label: "L", points: [[0, r.L], [tEnd, r.L]], color: "#999", dash: [2, 4], width: 1 });
  plot($("eu-canvas"), series, {
    xlabel: "t (s)",
    ylabel: "gap (m), zoomed",
    ymin: Math.max(0, minGap - 2),
    ymax: minGap + 12,
  });
  $("eu-out").textContent =
    `front car starts at ${r.front.x.toFixed(3)} m; start ${r.in_invariant ? "satisfies" : "violates"} the invariant\n` +
    names
      .map((k) => {
        const g = r.curves[k].min_gap;
        return `${k.padEnd(10)} minimum gap ${g.toFixed(4)} m ${g < r.L ? "COLLISION" : "safe"}`;
      })
      .join("\n");
}

function drawEpisode() {
  const r = JSON.parse(
    episode(config(), $("ep-policy").value, $("ep-net").value, $("ep-env").value, $("ep-integ").value, num("ep-seed")),
  );
  const cars = r.rows[0].x.length;
  const series = [];
  for (let k = 1; k < cars; k++) {
    series.push({
      label: `gap to car ${k + 1}`,
      points: r.rows.map((row) => [row.t, row.x[k] - row.x[0]]),
      color: SERIES_COLORS[(k - 1) % SERIES_COLORS.length],
      markers: k === 1 ? r.rows.filter((row) => row.overridden).map((row) => [row.t, row.x[k] - row.x[0]]) : [],
    });
  }
  series.push({
    label: "ego speed (m/s)",
    points: r.rows.map((row) => [row.t, row.v[0]]),
    color: "#388e3c",
    dash: [4, 3],
  });
  series.push({ label: "L", points: [[0, r.L], [r.rows.at(-1).t, r.L]], color: "#999", dash: [2, 4], width: 1 });
  plot($("ep-canvas"), series, { xlabel: "t (s)", ylabel: "m  /  m/s", ymin: 0 });
  const counts = {};
  for (const row of r.rows) if (row.action) counts[row.action] = (counts[row.action] ?? 0) + 1;
  $("ep-out").textContent =
    `${r.policy}: ${r.rows.length - 1} cycles, ${r.crashed ? `CRASH (${r.cause})` : "no collision"}, ` +
    `reward ${r.reward.toFixed(2)}, ${r.overrides} overridden actions (squares on the first gap curve)\n` +
    `actions: ${JSON.stringify(counts)}`;
}

await init();
$("config").value = default_config();
$("mm-run").onclick = report(drawMonitorMap);
$("eu-run").onclick = report(drawEuler);
$("ep-run").onclick = report(drawEpisode);
report(drawMonitorMap)();
report(drawEpisode)();
