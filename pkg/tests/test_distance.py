import math

import numpy as np
import pytest

from conftest import random_network

from bnsense.distance import (
    OverlappingFamiliesError,
    StructureMismatchError,
    bound_curve,
    combined_distance,
    cpt_distance,
    families_disjoint,
    global_distance_brute,
    query_bounds,
)
from bnsense.engine import joint_probability, posterior
from bnsense.model import (
    BayesianNetwork,
    Cpt,
    ModelError,
    ParameterDelta,
    ParameterRef,
    Variable,
    apply_deltas,
)


def test_cpt_distance_tiny2_equal_logodds(tiny2):
    deltas = [
        ParameterDelta(tiny2.param("Y", "t", {"X": "t"}), 0.1),
        ParameterDelta(tiny2.param("Y", "t", {"X": "f"}), -0.1),
    ]
    assert cpt_distance(tiny2, "Y", deltas) == pytest.approx(math.log(9 / 4), abs=1e-12)


def test_cpt_distance_zero_deltas(tiny2):
    assert cpt_distance(tiny2, "Y", []) == 0.0
    assert cpt_distance(tiny2, "Y", [ParameterDelta(tiny2.param("Y", "t", {"X": "t"}), 0.0)]) == 0.0


def test_cpt_distance_fire_single_parameter(fire):
    ref = fire.param("Alarm", "t", {"Tampering": "t", "Fire": "f"})
    assert cpt_distance(fire, "Alarm", [ParameterDelta(ref, 0.677 - 0.85)]) == pytest.approx(
        0.995, abs=0.01
    )


def test_cpt_distance_to_boundary_is_infinite(tiny2):
    ref = tiny2.param("Y", "t", {"X": "t"})
    assert cpt_distance(tiny2, "Y", [ParameterDelta(ref, 0.2)]) == math.inf


def test_cpt_distance_duplicate_row_rejected(tiny2):
    ref = tiny2.param("Y", "t", {"X": "t"})
    comp = tiny2.complement_ref(ref)
    with pytest.raises(ModelError):
        cpt_distance(tiny2, "Y", [ParameterDelta(ref, 0.05), ParameterDelta(comp, 0.05)])


def test_cpt_distance_skips_impossible_rows():
    u = Variable("U", ("t", "f"))
    x = Variable("X", ("t", "f"))
    net = BayesianNetwork(
        (u, x),
        (Cpt(u, (), [1.0, 0.0]), Cpt(x, (u,), [[0.5, 0.5], [0.5, 0.5]])),
    )
    dead_row = ParameterDelta(net.param("X", "t", {"U": "f"}), 0.3)
    assert cpt_distance(net, "X", [dead_row]) == 0.0


def test_combined_distance_disjoint(fire):
    d1 = ParameterDelta(fire.param("Fire", "t"), -0.004)
    d2 = ParameterDelta(fire.param("Tampering", "t"), 0.006)
    total = combined_distance(fire, [d1, d2])
    assert total == pytest.approx(
        cpt_distance(fire, "Fire", [d1]) + cpt_distance(fire, "Tampering", [d2]), abs=1e-12
    )
    assert combined_distance(fire, [d1]) == pytest.approx(cpt_distance(fire, "Fire", [d1]), abs=1e-15)


def test_combined_distance_of_reference_prior_shifts(fire):
    # lowering the fire prior to 0.61% and raising tampering to 2.56%
    # costs 0.745 in summed log-odds distance
    deltas = [
        ParameterDelta(fire.param("Fire", "t"), -0.0039),
        ParameterDelta(fire.param("Tampering", "t"), 0.0056),
    ]
    assert combined_distance(fire, deltas) == pytest.approx(0.745, abs=0.01)


def test_combined_distance_overlap_refused(fire):
    assert not families_disjoint(fire, "Fire", "Smoke")
    with pytest.raises(OverlappingFamiliesError):
        combined_distance(
            fire,
            [
                ParameterDelta(fire.param("Fire", "t"), 0.001),
                ParameterDelta(fire.param("Smoke", "t", {"Fire": "t"}), 0.01),
            ],
        )


def test_two_isolated_roots_equal_shifts():
    a, b = Variable("A", ("t", "f")), Variable("B", ("t", "f"))
    net = BayesianNetwork((a, b), (Cpt(a, (), [0.3, 0.7]), Cpt(b, (), [0.6, 0.4])))
    delta = math.log(2)  # log-odds shift of each prior
    new_a = 0.6 / (0.6 + 0.7)  # odds 3/7 * 2
    new_b = 3.0 / 4.0          # odds 1.5 * 2
    total = combined_distance(
        net,
        [
            ParameterDelta(net.param("A", "t"), new_a - 0.3),
            ParameterDelta(net.param("B", "t"), new_b - 0.6),
        ],
    )
    assert total == pytest.approx(2 * delta, abs=1e-12)


def test_global_distance_identical_networks(fire):
    assert global_distance_brute(fire, fire) == 0.0


def test_global_distance_structure_mismatch(fire, tiny2):
    with pytest.raises(StructureMismatchError):
        global_distance_brute(fire, tiny2)


def test_global_distance_symmetry():
    rng = np.random.default_rng(5)
    for _ in range(10):
        net = random_network(rng, n_vars=6, min_prob=0.05)
        name = str(rng.choice([v.name for v in net.variables]))
        cpt = net.cpt(name)
        ref = ParameterRef(name, "t", cpt.instantiation(int(rng.integers(cpt.n_instantiations))))
        theta = net.theta(ref)
        moved = apply_deltas(net, [ParameterDelta(ref, float(rng.uniform(-theta, 1 - theta)) * 0.8)])
        assert global_distance_brute(net, moved) == pytest.approx(
            global_distance_brute(moved, net), abs=1e-12
        )


def test_single_row_change_matches_cpt_distance():
    rng = np.random.default_rng(6)
    for _ in range(25):
        net = random_network(rng, n_vars=7, min_prob=0.05)
        name = str(rng.choice([v.name for v in net.variables]))
        cpt = net.cpt(name)
        ref = ParameterRef(name, "t", cpt.instantiation(int(rng.integers(cpt.n_instantiations))))
        theta = net.theta(ref)
        d = float(rng.uniform(-theta, 1 - theta)) * 0.8
        if d == 0.0:
            continue
        delta = ParameterDelta(ref, d)
        moved = apply_deltas(net, [delta])
        assert global_distance_brute(net, moved) == pytest.approx(
            cpt_distance(net, name, [delta]), abs=1e-9
        )


def test_multi_row_change_global_at_least_rowwise():
    # The row-wise measure is what the suggestion machinery reports; the
    # whole-distribution distance can only be larger for multi-row changes.
    u, x = Variable("U", ("t", "f")), Variable("X", ("t", "f"))
    net = BayesianNetwork(
        (u, x), (Cpt(u, (), [0.5, 0.5]), Cpt(x, (u,), [[0.5, 0.5], [0.1, 0.9]]))
    )
    deltas = [
        ParameterDelta(net.param("X", "t", {"U": "t"}), 0.3),
        ParameterDelta(net.param("X", "t", {"U": "f"}), 4 / 13 - 0.1),
    ]
    moved = apply_deltas(net, deltas)
    rowwise = cpt_distance(net, "X", deltas)
    glob = global_distance_brute(net, moved)
    assert rowwise == pytest.approx(math.log(4), abs=1e-12)
    assert glob > rowwise + 0.1


def test_disjoint_two_cpt_additivity_against_oracle():
    rng = np.random.default_rng(8)
    done = 0
    while done < 15:
        net = random_network(rng, n_vars=7, min_prob=0.05)
        names = [v.name for v in net.variables]
        x_var, y_var = (str(n) for n in rng.choice(names, 2, replace=False))
        if not families_disjoint(net, x_var, y_var):
            continue
        deltas = []
        for name in (x_var, y_var):
            cpt = net.cpt(name)
            ref = ParameterRef(name, "t", cpt.instantiation(int(rng.integers(cpt.n_instantiations))))
            theta = net.theta(ref)
            deltas.append(ParameterDelta(ref, float(rng.uniform(-theta, 1 - theta)) * 0.8))
        moved = apply_deltas(net, deltas)
        assert global_distance_brute(net, moved) == pytest.approx(
            combined_distance(net, deltas), abs=1e-9
        )
        done += 1


def test_query_bounds_identity_at_zero():
    for p in (0.0, 0.1, 0.5, 0.9, 1.0):
        assert query_bounds(p, 0.0) == (pytest.approx(p), pytest.approx(p))


def test_query_bounds_closed_form():
    lo, hi = query_bounds(0.5, math.log(9 / 4))
    assert lo == pytest.approx(4 / 13, abs=1e-12)
    assert hi == pytest.approx(9 / 13, abs=1e-12)


def test_query_bounds_infinite_distance():
    assert query_bounds(0.5, math.inf) == (0.0, 1.0)
    assert query_bounds(0.0, math.inf) == (0.0, 0.0)
    assert query_bounds(1.0, math.inf) == (1.0, 1.0)


def test_query_bounds_monotone_widening():
    for p in (0.05, 0.3, 0.7):
        prev = (p, p)
        for d in (0.1, 0.5, 1.0, 3.0, 10.0):
            lo, hi = query_bounds(p, d)
            assert lo < prev[0] and hi > prev[1]
            prev = (lo, hi)


def test_bound_curves_nest_for_smaller_distance():
    wide = dict((p, (lo, hi)) for p, lo, hi in bound_curve(0.995))
    narrow = dict((p, (lo, hi)) for p, lo, hi in bound_curve(0.445))
    for p, (lo_n, hi_n) in narrow.items():
        lo_w, hi_w = wide[p]
        if 0.0 < p < 1.0:
            assert lo_w < lo_n and hi_n < hi_w


def test_bound_soundness_random_single_row_changes():
    rng = np.random.default_rng(9)
    checked = 0
    while checked < 60:
        net = random_network(rng, n_vars=6, min_prob=0.05)
        name = str(rng.choice([v.name for v in net.variables]))
        cpt = net.cpt(name)
        ref = ParameterRef(name, "t", cpt.instantiation(int(rng.integers(cpt.n_instantiations))))
        theta = net.theta(ref)
        d = float(rng.uniform(-theta, 1 - theta)) * 0.9
        delta = ParameterDelta(ref, d)
        moved = apply_deltas(net, [delta])
        others = [v.name for v in net.variables]
        z = {str(rng.choice(others)): "t"}
        e = {str(rng.choice(others)): "f"}
        if set(z) & set(e) or joint_probability(net, e) <= 1e-9 or joint_probability(moved, e) <= 1e-9:
            continue
        before = posterior(net, z, e)
        after = posterior(moved, z, e)
        lo, hi = query_bounds(before, cpt_distance(net, name, [delta]))
        assert lo - 1e-12 <= after <= hi + 1e-12
        checked += 1
