import { describe, expect, it } from "vitest";

import { layerOf, layoutDag } from "../src/dag.js";
import { fixture } from "./helpers.js";

describe("dag layout", () => {
  const summary = fixture("session").network;

  it("layers the fire network by longest path", () => {
    const layers = layerOf(summary);
    expect(layers.get("Tampering")).toBe(0);
    expect(layers.get("Fire")).toBe(0);
    expect(layers.get("Alarm")).toBe(1);
    expect(layers.get("Smoke")).toBe(1);
    expect(layers.get("Leaving")).toBe(2);
    expect(layers.get("Report")).toBe(3);
  });

  it("positions every node and edge", () => {
    const layout = layoutDag(summary);
    expect(layout.nodes).toHaveLength(6);
    expect(layout.edges).toHaveLength(summary.edges.length);
    for (const e of layout.edges) {
      expect(e.from.y).toBeLessThan(e.to.y); // edges always point downward
    }
  });
});
