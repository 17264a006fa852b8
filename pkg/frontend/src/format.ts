// Display formatting for service-provided numbers. Pure string functions,
// exercised directly by the fixture tests.

import type { Assignment, ParamRef } from "./types.js";

export function fmtPercent(x: number): string {
  return `${(100 * x).toFixed(2)}%`;
}

export function fmtNum(x: number, digits = 6): string {
  if (!Number.isFinite(x)) return x > 0 ? "inf" : "-inf";
  if (x === 0) return "0";
  let out = x.toPrecision(digits);
  if (out.includes("e")) return out;
  if (out.includes(".")) {
    out = out.replace(/0+$/, "").replace(/\.$/, "");
  }
  return out;
}

export function fmtSigned(x: number, digits = 6): string {
  const body = fmtNum(Math.abs(x), digits);
  return (x < 0 ? "-" : "+") + body;
}

export function assignmentLabel(a: Assignment): string {
  return Object.entries(a)
    .map(([k, v]) => `${k}=${v}`)
    .join(", ");
}

export function paramLabel(p: ParamRef): string {
  const cond = assignmentLabel(p.parents);
  return cond
    ? `P(${p.variable}=${p.state} | ${cond})`
    : `P(${p.variable}=${p.state})`;
}

export function constraintLabel(c: {
  target: Assignment;
  evidence: Assignment;
  direction: "at_least" | "at_most";
  threshold: number;
}): string {
  const op = c.direction === "at_least" ? ">=" : "<=";
  const cond = Object.keys(c.evidence).length
    ? ` | ${assignmentLabel(c.evidence)}`
    : "";
  return `Pr(${assignmentLabel(c.target)}${cond}) ${op} ${fmtNum(c.threshold)}`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
