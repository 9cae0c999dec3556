// Generated by `wasm-pack build crates/web --target web --out-dir www/pkg`.
import init, { classify, check, label } from "./pkg/evoclass_web.js";

const $ = (id) => document.getElementById(id);

function fields(form) {
  return Object.fromEntries(new FormData(form).entries());
}

// Runs after the status text has had a chance to paint.
function later(fn) {
  return new Promise((resolve) => setTimeout(() => resolve(fn()), 0));
}

function showError(target, err) {
  target.textContent = `error: ${err.message ?? err}`;
  target.classList.add("error");
}

function renderPartition(report) {
  const body = $("classify-table").querySelector("tbody");
  body.replaceChildren();
  report.classes.forEach((c, i) => {
    const row = document.createElement("tr");
    const members = document.createElement("details");
    const summary = document.createElement("summary");
    summary.textContent = `${c.members.length} algebras`;
    members.append(summary, c.members.join("   "));
    for (const cell of [String(i + 1), c.representative, c.label ?? "", String(c.size)]) {
      const td = document.createElement("td");
      td.textContent = cell;
      row.append(td);
    }
    const td = document.createElement("td");
    td.append(members);
    row.append(td);
    body.append(row);
  });
  $("classify-table").hidden = false;
}

function describeCheck(r) {
  const lines = [`${r.left}  vs  ${r.right}  (${r.relation})`];
  if (r.left_label || r.right_label) {
    lines.push(`labels: ${r.left_label ?? "-"} / ${r.right_label ?? "-"}`);
  }
  if (r.witness) {
    lines.push("related; witness:", `  F = ${r.witness.F}`, `  G = ${r.witness.G}`, `  H = ${r.witness.H}`);
  } else {
    lines.push("not related: no witness exists");
  }
  return lines.join("\n");
}

function describeLabel(r) {
  return [
    `label:            ${r.label}`,
    `isotopism class:  ${r.isotopism_class}`,
    `canonical member: ${r.canonical}`,
    `isomorphism onto it (rows are images of e1, e2): ${r.map}`,
    `annihilator dim ${r.annihilator_dim}, derived dim ${r.derived_dim}`,
  ].join("\n");
}

async function main() {
  await init();

  $("classify-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const { q, relation, method } = fields(ev.target);
    const status = $("classify-status");
    status.classList.remove("error");
    status.textContent = "classifying…";
    try {
      const t0 = performance.now();
      const report = JSON.parse(await later(() => classify(Number(q), relation, method)));
      const ms = Math.round(performance.now() - t0);
      status.textContent = `GF(${report.q}): ${report.class_count} ${report.relation} classes by ${report.method} in ${ms} ms`;
      renderPartition(report);
    } catch (err) {
      $("classify-table").hidden = true;
      showError(status, err);
    }
  });

  $("check-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const { q, left, right, relation } = fields(ev.target);
    const out = $("check-out");
    out.classList.remove("error");
    out.textContent = "searching…";
    try {
      out.textContent = describeCheck(JSON.parse(await later(() => check(Number(q), left, right, relation))));
    } catch (err) {
      showError(out, err);
    }
  });

  $("label-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const { q, algebra } = fields(ev.target);
    const out = $("label-out");
    out.classList.remove("error");
    try {
      out.textContent = describeLabel(JSON.parse(label(Number(q), algebra)));
    } catch (err) {
      showError(out, err);
    }
  });
}

main();
