import { describe, expect, it } from "vitest";

import {
  assignmentLabel,
  constraintLabel,
  escapeHtml,
  fmtNum,
  fmtPercent,
  fmtSigned,
  paramLabel,
} from "../src/format.js";

describe("number formatting", () => {
  it("renders percentages with two decimals", () => {
    expect(fmtPercent(0.028707680428439505)).toBe("2.87%");
    expect(fmtPercent(0.8)).toBe("80.00%");
    expect(fmtPercent(0.10977355053369997)).toBe("10.98%");
  });

  it("renders six significant digits without trailing zeros", () => {
    expect(fmtNum(0.7614517165885921)).toBe("0.761452");
    expect(fmtNum(0.01)).toBe("0.01");
    expect(fmtNum(0)).toBe("0");
    expect(fmtNum(8.109662529253844)).toBe("8.10966");
    expect(fmtNum(Infinity)).toBe("inf");
  });

  it("signs deltas explicitly", () => {
    expect(fmtSigned(-0.005305095591530182)).toBe("-0.0053051");
    expect(fmtSigned(0.0056)).toBe("+0.0056");
  });
});

describe("labels", () => {
  it("formats parameter references", () => {
    expect(paramLabel({ variable: "Fire", state: "t", parents: {} })).toBe("P(Fire=t)");
    expect(
      paramLabel({ variable: "Alarm", state: "t", parents: { Tampering: "t", Fire: "f" } }),
    ).toBe("P(Alarm=t | Tampering=t, Fire=f)");
  });

  it("formats constraints", () => {
    expect(
      constraintLabel({
        target: { Fire: "t" },
        evidence: { Leaving: "t", Smoke: "f" },
        direction: "at_most",
        threshold: 0.025,
      }),
    ).toBe("Pr(Fire=t | Leaving=t, Smoke=f) <= 0.025");
  });

  it("joins assignments in insertion order", () => {
    expect(assignmentLabel({ Smoke: "t", Leaving: "t" })).toBe("Smoke=t, Leaving=t");
  });

  it("escapes markup", () => {
    expect(escapeHtml(`<a b="c">&`)).toBe("&lt;a b=&quot;c&quot;&gt;&amp;");
  });
});
