// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

import init, { run_algorithm, compare_modes, value_histogram } from "./pkg/colgraph_demo.js";

const $ = (id) => document.getElementById(id);
const output = $("output");

function inputs() {
  const source = $("source").value.trim();
  return {
    edges: $("edges").value,
    directed: $("directed").checked,
    algo: $("algo").value,
    mode: $("mode").value,
    source: source === "" ? undefined : Number(source),
    threshold: Number($("threshold").value) | 0,
    buckets: Math.max(1, Number($("buckets").value) | 0),
  };
}

function el(tag, text) {
  const e = document.createElement(tag);
  if (text !== undefined) e.textContent = String(text);
  return e;
}

function grid(columns, rows) {
  const t = el("table");
  const head = el("tr");
  columns.forEach((c) => head.appendChild(el("th", c)));
  t.appendChild(head);
  rows.forEach((r) => {
    const tr = el("tr");
    r.forEach((v) => tr.appendChild(el("td", v === null ? "" : v)));
    t.appendChild(tr);
  });
  return t;
}

function show(json, render) {
  output.replaceChildren();
  const v = JSON.parse(json);
  if (v.error) {
    const p = el("p", v.error);
    p.className = "error";
    output.appendChild(p);
    return;
  }
  render(v);
}

function onRun() {
  const a = inputs();
  show(run_algorithm(a.edges, a.directed, a.algo, a.mode, a.source, a.threshold), (v) => {
    output.appendChild(el("h2", `${a.algo} (${a.mode})`));
    output.appendChild(grid(v.table.columns, v.table.rows));
    output.appendChild(el("h3", "iterations"));
    const rows = v.report.iterations.map((r) => [
      r.iteration, r.wall_ms.toFixed(3), r.rows_updated, r.bytes_read, r.bytes_written,
    ]);
    output.appendChild(grid(["iteration", "wall_ms", "rows_updated", "bytes_read", "bytes_written"], rows));
  });
}

function onCompare() {
  const a = inputs();
  show(compare_modes(a.edges, a.directed, a.algo, a.source), (v) => {
    output.appendChild(el("h2", `${v.algorithm}: ${v.column} by mode`));
    const rows = v.modes.map((m) => [
      m.mode, m.iterations, m.wall_ms.toFixed(3), m.rows_updated, m.bytes_read, m.bytes_written, m.max_abs_diff,
    ]);
    output.appendChild(grid(
      ["mode", "iterations", "wall_ms", "rows_updated", "bytes_read", "bytes_written", "max |diff| vs sql"],
      rows,
    ));
  });
}

function onHistogram() {
  const a = inputs();
  show(value_histogram(a.edges, a.directed, a.algo, a.source, a.buckets), (v) => {
    output.appendChild(el("h2", `${v.column} histogram`));
    const peak = Math.max(1, ...v.counts);
    const rows = v.counts.map((c, i) => {
      const lo = v.min + i * v.width;
      const bar = el("div");
      bar.className = "bar";
      bar.style.width = `${(20 * c) / peak}rem`;
      return [lo.toPrecision(4), c, bar];
    });
    const t = grid(["from", "count", ""], rows.map((r) => r.slice(0, 2).concat("")));
    rows.forEach((r, i) => t.rows[i + 1].cells[2].appendChild(r[2]));
    output.appendChild(t);
  });
}

await init();
$("run").addEventListener("click", onRun);
$("compare").addEventListener("click", onCompare);
$("histogram").addEventListener("click", onHistogram);
["run", "compare", "histogram"].forEach((id) => ($(id).disabled = false));
