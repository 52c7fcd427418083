"""Extremal searches against full-enumeration oracles and counting bounds."""

import csv
import io
import math

import pytest

import oracles
from diffsets.core_sets import (
    BoundsLedger,
    GroupSpec,
    trivial_bounds,
    verify_certificate,
)
from diffsets.solver import (
    ExtremalResult,
    SearchConfig,
    alpha_exact,
    beta_exact,
    eta_exact,
    gamma_exact,
    ratio_report,
)


# --- eta: minimum g-difference sets for [N] ---------------------------------


def test_eta_frozen_values():
    # values and lex-min witnesses frozen from oracles.naive_eta
    expected_g1 = {
        1: (2, (0, 1)),
        2: (3, (0, 1, 2)),
        3: (3, (0, 1, 3)),
        4: (4, (0, 1, 2, 4)),
        5: (4, (0, 1, 2, 5)),
        6: (4, (0, 1, 4, 6)),
    }
    for N, (value, witness) in expected_g1.items():
        r = eta_exact(1, N)
        assert r.value == value
        assert r.witness.elements == witness
        assert r.exhaustive
    expected_g2 = {
        1: (3, (0, 1, 2)),
        2: (4, (0, 1, 2, 3)),
        3: (5, (0, 1, 2, 3, 4)),
        4: (5, (0, 1, 2, 4, 5)),
        5: (6, (0, 1, 2, 3, 5, 6)),
    }
    for N, (value, witness) in expected_g2.items():
        r = eta_exact(2, N)
        assert (r.value, r.witness.elements) == (value, witness)


def test_eta_oracle_agreement():
    # the naive search uses the same universe [0, 2N] as the default window
    for g in (1, 2):
        for N in range(1, 7):
            size, cand = oracles.naive_eta(g, N)
            r = eta_exact(g, N)
            assert r.value == size
            assert r.witness.elements == cand
            assert r.exhaustive


def test_eta_witnesses_verify():
    for g, N in ((1, 6), (2, 5), (3, 4)):
        r = eta_exact(g, N)
        v = verify_certificate(r.witness, g=g, N=N, mode="difference")
        assert v.passed


def test_eta_known_ratios():
    assert eta_exact(1, 1).ratio() == pytest.approx(2.0)
    assert eta_exact(1, 3).ratio() == pytest.approx(math.sqrt(3))


def test_eta_monotone_in_N_and_g():
    vals = [eta_exact(1, N).value for N in range(1, 9)]
    assert vals == sorted(vals)
    at4 = [eta_exact(g, 4).value for g in (1, 2, 3)]
    assert at4 == sorted(at4)


def test_eta_window_options():
    r = eta_exact(1, 6, SearchConfig(window=6))
    assert r.value == 4 and r.witness.elements == (0, 1, 4, 6)
    assert max(r.witness.elements) <= 6
    with pytest.raises(ValueError):
        eta_exact(1, 6, SearchConfig(window=5))
    quick = eta_exact(1, 6, SearchConfig(confirm_window=False))
    full = eta_exact(1, 6)
    assert quick.value == full.value and quick.exhaustive
    assert quick.nodes <= full.nodes


def test_eta_budget_partial_is_valid_cover():
    exact = eta_exact(1, 12)
    assert exact.value == 6
    partial = eta_exact(1, 12, SearchConfig(node_budget=10))
    assert not partial.exhaustive
    assert partial.value >= exact.value
    assert verify_certificate(partial.witness, g=1, N=12, mode="difference").passed
    starved = eta_exact(1, 6, SearchConfig(node_budget=0))
    assert not starved.exhaustive
    assert verify_certificate(starved.witness, g=1, N=6, mode="difference").passed


def test_eta_unpinned_search_matches():
    pinned = eta_exact(2, 5)
    free = eta_exact(2, 5, SearchConfig(translation_fix=False))
    assert (free.value, free.witness.elements) == (pinned.value, pinned.witness.elements)
    assert free.nodes >= pinned.nodes


def test_eta_rejects_bad_parameters():
    with pytest.raises(ValueError):
        eta_exact(0, 3)
    with pytest.raises(ValueError):
        eta_exact(1, 0)


# --- gamma: minimum g-difference subsets of a group -------------------------


def test_gamma_frozen_values():
    r = gamma_exact(1, GroupSpec((7,)))
    assert r.value == 3 and r.witness.elements == ((0,), (1,), (3,))
    assert r.exhaustive
    assert gamma_exact(1, GroupSpec((2,))).value == 2
    assert gamma_exact(2, GroupSpec((5,))).value == 4
    r = gamma_exact(1, GroupSpec((2, 4)))
    assert r.value == 4
    assert r.witness.elements == ((0, 0), (0, 1), (0, 2), (1, 0))
    # g = |G| forces the whole group
    assert gamma_exact(3, GroupSpec((3,))).value == 3


def test_gamma_oracle_agreement():
    for factors in ((2,), (3,), (4,), (5,), (2, 2), (6,), (7,), (2, 4)):
        order = math.prod(factors)
        for g in range(1, min(3, order) + 1):
            size, cand = oracles.naive_gamma(factors, g)
            r = gamma_exact(g, GroupSpec(factors))
            assert r.value == size
            assert r.witness.elements == cand
            assert r.exhaustive


def test_gamma_respects_cover_bounds():
    for factors, g in (((7,), 1), ((5,), 2), ((2, 4), 1), ((13,), 2)):
        spec = GroupSpec(factors)
        r = gamma_exact(g, spec)
        tb = trivial_bounds(g, group=spec)
        assert r.value >= tb.min_cover_lower
        assert r.value >= tb.sharper_cover_lower


def test_gamma_budget_partial_is_valid():
    r = gamma_exact(1, GroupSpec((7,)), SearchConfig(node_budget=1))
    assert not r.exhaustive
    assert r.witness.size == 7  # falls back to the full group
    assert verify_certificate(r.witness, g=1, mode="difference").passed


def test_gamma_unpinned_search_matches():
    pinned = gamma_exact(2, GroupSpec((5,)))
    free = gamma_exact(2, GroupSpec((5,)), SearchConfig(translation_fix=False))
    assert (free.value, free.witness.elements) == (pinned.value, pinned.witness.elements)


def test_gamma_rejects_bad_g():
    with pytest.raises(ValueError):
        gamma_exact(0, GroupSpec((5,)))
    with pytest.raises(ValueError):
        gamma_exact(6, GroupSpec((5,)))


# --- beta: maximum g-Sidon subsets of [1, N] --------------------------------


def test_beta_frozen_values():
    r = beta_exact(2, 5)
    assert r.value == 3 and r.witness.elements == (1, 2, 4)
    assert r.exhaustive
    # any two distinct elements already collide at g = 1
    assert beta_exact(1, 6).value == 1
    assert beta_exact(1, 6).witness.elements == (1,)
    assert beta_exact(2, 1).value == 1
    # g >= 2N admits the whole interval
    assert beta_exact(4, 2).value == 2


def test_beta_oracle_agreement():
    for g in (1, 2, 3):
        for N in range(1, 9):
            size, cand = oracles.naive_beta(g, N)
            r = beta_exact(g, N)
            assert r.value == size
            assert r.witness.elements == cand
            assert r.exhaustive


def test_beta_respects_packing_bound():
    for g, N in ((1, 10), (2, 24), (3, 15), (4, 8)):
        r = beta_exact(g, N)
        tb = trivial_bounds(g, N=N)
        assert r.value <= tb.max_packing_upper
        assert r.value <= math.isqrt(g * (2 * N - 1))
        assert verify_certificate(r.witness, g=g, N=N, mode="sidon").passed


def test_beta_budget_partial_is_valid_packing():
    exact = beta_exact(2, 24)
    assert exact.value == 6
    partial = beta_exact(2, 24, SearchConfig(node_budget=5))
    assert not partial.exhaustive
    assert 1 <= partial.value <= exact.value
    assert verify_certificate(partial.witness, g=2, N=24, mode="sidon").passed
    starved = beta_exact(2, 24, SearchConfig(node_budget=0))
    assert starved.value == 1 and starved.witness.elements == (1,)


def test_beta_rejects_bad_parameters():
    with pytest.raises(ValueError):
        beta_exact(0, 3)
    with pytest.raises(ValueError):
        beta_exact(1, 0)


# --- alpha: maximum g-Sidon subsets of a group ------------------------------


def test_alpha_frozen_values():
    assert alpha_exact(1, GroupSpec((7,))).value == 1
    r = alpha_exact(2, GroupSpec((6,)))
    assert r.value == 3 and r.witness.elements == ((0,), (1,), (3,))
    assert r.exhaustive
    assert alpha_exact(1, GroupSpec((2, 2))).value == 1
    # q is |G| everywhere on the full group, so g = |G| admits all of it
    assert alpha_exact(6, GroupSpec((6,))).value == 6


def test_alpha_oracle_agreement():
    for factors in ((2,), (3,), (4,), (2, 2), (5,), (6,)):
        for g in (1, 2, 3):
            size, cand = oracles.naive_alpha(factors, g)
            r = alpha_exact(g, GroupSpec(factors))
            assert r.value == size
            assert r.witness.elements == cand
            assert r.exhaustive


def test_alpha_respects_packing_bound():
    for factors, g in (((7,), 2), ((4, 4), 2), ((6,), 3)):
        spec = GroupSpec(factors)
        r = alpha_exact(g, spec)
        tb = trivial_bounds(g, group=spec)
        assert r.value <= tb.max_packing_upper
        assert verify_certificate(r.witness, g=g, mode="sidon").passed


def test_alpha_budget_partial_is_valid():
    partial = alpha_exact(2, GroupSpec((4, 4)), SearchConfig(node_budget=3))
    assert not partial.exhaustive
    assert partial.value >= 1
    assert verify_certificate(partial.witness, g=2, mode="sidon").passed
    starved = alpha_exact(2, GroupSpec((4, 4)), SearchConfig(node_budget=0))
    assert starved.value == 1 and starved.witness.elements == ((0, 0),)


def test_alpha_unpinned_search_matches():
    pinned = alpha_exact(2, GroupSpec((6,)))
    free = alpha_exact(2, GroupSpec((6,)), SearchConfig(translation_fix=False))
    assert (free.value, free.witness.elements) == (pinned.value, pinned.witness.elements)


def test_alpha_rejects_bad_g():
    with pytest.raises(ValueError):
        alpha_exact(0, GroupSpec((5,)))


# --- result records and the ratio table -------------------------------------


def test_results_deterministic():
    for make in (
        lambda: eta_exact(2, 5),
        lambda: gamma_exact(1, GroupSpec((7,))),
        lambda: beta_exact(2, 5),
        lambda: alpha_exact(2, GroupSpec((6,))),
    ):
        a, b = make(), make()
        assert a == b
        assert a.to_json() == b.to_json()


def test_result_json_shapes():
    r = eta_exact(1, 3)
    j = r.to_json()
    assert j == {
        "quantity": "eta",
        "g": 1,
        "value": 3,
        "exhaustive": True,
        "nodes": j["nodes"],
        "N": 3,
        "witness": [0, 1, 3],
    }
    j = gamma_exact(1, GroupSpec((7,))).to_json()
    assert j["group"] == [7]
    assert j["witness"] == [[0], [1], [3]]
    assert "N" not in j


def test_ratio_report_known_rows():
    results = [
        eta_exact(1, 1),
        eta_exact(1, 3),
        gamma_exact(1, GroupSpec((7,))),
        beta_exact(2, 5),
        alpha_exact(2, GroupSpec((6,))),
    ]
    table = ratio_report(results)
    assert table.endswith("\n")
    rows = list(csv.reader(io.StringIO(table)))
    assert rows[0] == ["quantity", "g", "size-param", "value", "ratio", "bound-flag"]
    assert rows[1] == ["eta", "1", "1", "2", "2.000", "ok"]
    assert rows[2] == ["eta", "1", "3", "3", "1.732", "ok"]
    assert rows[3] == ["gamma", "1", "7", "3", "1.134", "ok"]
    assert all(len(row) == 6 for row in rows)
    assert all(row[5] == "ok" for row in rows[1:])
    # the printed ratio is the record's own ratio
    for row, r in zip(rows[1:], results):
        assert row[4] == f"{r.ratio():.3f}"


def test_ratio_report_fatal_flag():
    # an exhaustive eta below the published covering ratio is impossible;
    # fabricate one to check the tripwire
    fake = ExtremalResult("eta", 1, 100, None, 10, None, True, 0)
    table = ratio_report([fake])
    assert "eta,1,100,10,1.000,FATAL" in table
    unconfirmed = ExtremalResult("eta", 1, 100, None, 10, None, False, 0)
    assert "FATAL" not in ratio_report([unconfirmed])
    fine = ExtremalResult("eta", 1, 100, None, 16, None, True, 0)
    assert "FATAL" not in ratio_report([fine])
    assert BoundsLedger().eta_ratio_ok(16, 1, 100)
    assert not BoundsLedger().eta_ratio_ok(10, 1, 100)


def test_solved_values_respect_trivial_bounds():
    for g, N in ((1, 6), (2, 8), (3, 5)):
        assert eta_exact(g, N).value >= trivial_bounds(g, N=N).min_cover_lower
        assert beta_exact(g, N).value <= trivial_bounds(g, N=N).max_packing_upper
    for factors, g in (((7,), 1), ((6,), 2), ((2, 4), 1)):
        spec = GroupSpec(factors)
        tb = trivial_bounds(g, group=spec)
        assert gamma_exact(g, spec).value >= tb.sharper_cover_lower
        assert alpha_exact(g, spec).value <= tb.max_packing_upper
