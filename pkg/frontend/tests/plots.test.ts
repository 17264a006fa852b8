import { describe, expect, it } from "vitest";

import { boundBandSvg, classifyDelta, polylinePath, scaleLinear, solutionSpaceSvg } from "../src/plots.js";
import { fixture } from "./helpers.js";

describe("feasible-region classification", () => {
  it("matches the service's membership evaluation on the recorded grid", () => {
    const space = fixture("solution_space");
    for (const sample of space.membership_samples) {
      expect(classifyDelta(space, sample.d1, sample.d2)).toBe(sample.member);
    }
    expect(space.membership_samples.length).toBe(121);
  });
});

describe("boundary polyline", () => {
  it("moves through every recorded boundary point in order", () => {
    const space = fixture("solution_space");
    const sx = scaleLinear([-0.02, 0.02], [0, 100]);
    const sy = scaleLinear([-0.05, 0.25], [100, 0]);
    const path = polylinePath(space.boundary.points, sx, sy);
    expect(path.startsWith("M")).toBe(true);
    expect(path.split("L").length).toBe(space.boundary.points.length);
  });
});

describe("solution-space svg", () => {
  it("contains shading, axes, boundary, and the optimal marker", () => {
    const space = fixture("solution_space");
    const svg = solutionSpaceSvg(space, { optimal: { d1: -0.0053, d2: 0 } });
    expect(svg).toContain(`class="feasible"`);
    expect(svg).toContain(`class="axis"`);
    expect(svg).toContain(`class="boundary"`);
    expect(svg).toContain(`class="optimal"`);
  });

  it("shades exactly the cells the inequality accepts", () => {
    const space = fixture("solution_space");
    const cells = (solutionSpaceSvg(space, { shadingCells: 8 }).match(/class="feasible"/g) ?? []).length;
    // recount independently on the same 8x8 grid
    const pts = space.boundary.points as [number, number][];
    const pad = 0.08;
    const lo1 = Math.min(...pts.map((p) => p[0]), 0), hi1 = Math.max(...pts.map((p) => p[0]), 0);
    const lo2 = Math.min(...pts.map((p) => p[1]), 0), hi2 = Math.max(...pts.map((p) => p[1]), 0);
    const dom1 = [lo1 - pad * (hi1 - lo1), hi1 + pad * (hi1 - lo1)];
    const dom2 = [lo2 - pad * (hi2 - lo2), hi2 + pad * (hi2 - lo2)];
    let expected = 0;
    for (let i = 0; i < 8; i++) {
      for (let j = 0; j < 8; j++) {
        const d1 = dom1[0] + ((i + 0.5) / 8) * (dom1[1] - dom1[0]);
        const d2 = dom2[0] + ((j + 0.5) / 8) * (dom2[1] - dom2[0]);
        if (classifyDelta(space, d1, d2)) expected += 1;
      }
    }
    expect(cells).toBe(expected);
    expect(expected).toBeGreaterThan(0);
    expect(expected).toBeLessThan(64);
  });
});

describe("bound band svg", () => {
  it("builds a closed band through the recorded curve", () => {
    const curve = fixture("bounds");
    const svg = boundBandSvg(curve, 220, 120, 0.0287);
    expect(svg).toContain(`class="band-fill"`);
    expect(svg).toContain(`class="diagonal"`);
    expect(svg).toContain(`class="marker"`);
    expect(svg).toContain(" Z");
  });
});
