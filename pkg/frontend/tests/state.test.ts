// Apply/undo flows round-trip through recorded service confirmations.

import { describe, expect, it } from "vitest";

import { renderPosteriorBadge } from "../src/render.js";
import {
  afterApplyConfirmed,
  afterUndoConfirmed,
  initialState,
  withEvidence,
  withPosterior,
  withRelevance,
  withSession,
  withSuggestion,
} from "../src/state.js";
import { fixture } from "./helpers.js";

describe("session bootstrap", () => {
  it("adopts the uploaded network and defaults the constraint target", () => {
    const state = withSession(initialState(), fixture("session"));
    expect(state.network!.variables.map((v: any) => v.name)).toEqual([
      "Tampering", "Fire", "Alarm", "Smoke", "Leaving", "Report",
    ]);
    expect(state.draft.targetVariable).toBe("Tampering");
    expect(state.canUndo).toBe(false);
  });
});

describe("apply then undo", () => {
  it("restores the displayed posterior byte for byte", () => {
    const round = fixture("apply_undo");
    let state = withSession(initialState(), fixture("session"));

    state = withPosterior(state, round.before);
    const badgeBefore = renderPosteriorBadge(state.posterior!);

    state = afterApplyConfirmed(state, round.apply);
    expect(state.canUndo).toBe(true);
    expect(state.posterior).toBeNull(); // stale values dropped, not guessed

    state = withPosterior(state, round.after_apply);
    const badgeChanged = renderPosteriorBadge(state.posterior!);
    expect(badgeChanged).not.toBe(badgeBefore);

    state = afterUndoConfirmed(state, round.undo);
    state = withPosterior(state, round.after_undo);
    expect(renderPosteriorBadge(state.posterior!)).toBe(badgeBefore);
    expect(round.after_undo.posterior).toBe(round.before.posterior);
  });

  it("tracks undo availability from the service, not locally", () => {
    const round = fixture("apply_undo");
    let state = withSession(initialState(), fixture("session"));
    state = afterApplyConfirmed(state, round.apply);
    expect(state.canUndo).toBe(round.apply.can_undo);
    state = afterUndoConfirmed(state, round.undo);
    expect(state.canUndo).toBe(round.undo.can_undo);
  });
});

describe("evidence changes invalidate cached analysis", () => {
  it("drops marginals, suggestions, and rankings", () => {
    let state = withSession(initialState(), fixture("session"));
    state = withRelevance(state, fixture("relevance"));
    state = withSuggestion(state, {
      kind: "two-cpt",
      label: "CPTs of Fire and Tampering",
      response: fixture("suggest_two_cpt"),
      boundCurve: null,
    });
    expect(state.suggestions).toHaveLength(1);
    state = withEvidence(state, { Alarm: "t" });
    expect(state.suggestions).toHaveLength(0);
    expect(state.relevance).toBeNull();
    expect(state.evidence).toEqual({ Alarm: "t" });
  });
});
