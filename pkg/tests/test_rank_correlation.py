import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mqmkit.rank_correlation import (
    CorrelationResult,
    DegenerateInput,
    LengthMismatch,
    SampleTooSmall,
    agreement_report,
    correlation_matrix,
    kendall_tau,
    pair_counts,
    tau_significance,
)


def oracle_counts(x, y):
    """Exhaustive O(n^2) pair classification."""
    n = len(x)
    concordant = discordant = tied_x = tied_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            if dx == 0:
                tied_x += 1
            if dy == 0:
                tied_y += 1
            if dx == 0 or dy == 0:
                continue
            if (dx > 0) == (dy > 0):
                concordant += 1
            else:
                discordant += 1
    return concordant, discordant, tied_x, tied_y, n * (n - 1) // 2


def oracle_tau(x, y, variant):
    c, d, tx, ty, n0 = oracle_counts(x, y)
    if variant == "eq5":
        return (c - d) / (c + d)
    return (c - d) / math.sqrt((n0 - tx) * (n0 - ty))


def test_perfect_agreement():
    result = kendall_tau([1, 2, 3, 4], [1, 2, 3, 4])
    assert result.tau == 1.0
    assert result.discordant == 0


def test_hand_counted_example():
    result = kendall_tau([1, 2, 3, 4], [2, 1, 3, 4])
    assert (result.concordant, result.discordant) == (5, 1)
    assert result.tau == pytest.approx(4 / 6)


def test_tie_handling_both_variants():
    eq5 = kendall_tau([1, 1, 2], [1, 2, 3], variant="eq5")
    assert eq5.tau == 1.0
    assert eq5.tied_x == 1
    taub = kendall_tau([1, 1, 2], [1, 2, 3], variant="tau_b")
    assert taub.tau == pytest.approx(2 / math.sqrt(6))


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        kendall_tau([1, 2], [1, 2, 3])


def test_degenerate_all_tied_eq5():
    with pytest.raises(DegenerateInput):
        kendall_tau([1, 1, 1], [1, 2, 3], variant="eq5")


def test_degenerate_constant_tau_b():
    with pytest.raises(DegenerateInput):
        kendall_tau([1, 1, 1], [1, 2, 3], variant="tau_b")


def test_oracle_equivalence_heavy_ties():
    rng = random.Random(42)
    for case in range(500):
        n = rng.randint(2, 200)
        low = rng.choice([2, 3, 5, 10, 50])
        x = [rng.randint(0, low) for _ in range(n)]
        y = [rng.randint(0, low) for _ in range(n)]
        got = pair_counts(x, y)
        assert got == oracle_counts(x, y), (case, n, low)
        for variant in ("eq5", "tau_b"):
            try:
                expected = oracle_tau(x, y, variant)
            except ZeroDivisionError:
                expected = None
            except ValueError:
                expected = None
            try:
                result = kendall_tau(x, y, variant=variant)
            except DegenerateInput:
                assert expected is None or math.isnan(expected) or expected == 0
                continue
            assert result.tau == expected, (case, variant)


def test_antisymmetry_and_monotone_invariance():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(2, 60)
        x = [rng.randint(0, 8) for _ in range(n)]
        y = [rng.randint(0, 8) for _ in range(n)]
        for variant in ("eq5", "tau_b"):
            try:
                base = kendall_tau(x, y, variant=variant)
            except DegenerateInput:
                continue
            negated = kendall_tau(x, [-v for v in y], variant=variant)
            assert negated.tau == -base.tau
            # strictly increasing transforms leave tau untouched
            fx = [3 * v + 1 for v in x]
            fy = [math.exp(v / 4) for v in y]
            assert kendall_tau(fx, fy, variant=variant).tau == base.tau


@given(
    st.lists(st.integers(0, 6), min_size=2, max_size=80),
    st.data(),
)
@settings(max_examples=150)
def test_oracle_equivalence_property(x, data):
    y = data.draw(st.lists(st.integers(0, 6), min_size=len(x), max_size=len(x)))
    assert pair_counts(x, y) == oracle_counts(x, y)


def test_significance_table_pattern():
    strong = tau_significance(
        CorrelationResult(0.17, 0, 0, 0, 0, n=1200, variant="eq5")
    )
    assert strong.stars == "***"
    z = 3 * 0.17 * math.sqrt(1200 * 1199) / math.sqrt(2 * 2405)
    assert z == pytest.approx(8.82, abs=0.01)

    weak = tau_significance(CorrelationResult(0.01, 0, 0, 0, 0, n=1200, variant="eq5"))
    assert weak.stars == ""
    assert weak.p_value > 0.05


def test_significance_null_tau():
    result = tau_significance(CorrelationResult(0.0, 0, 0, 0, 0, n=50, variant="eq5"))
    assert result.p_value == pytest.approx(1.0)
    assert result.stars == ""


def test_significance_small_sample():
    with pytest.raises(SampleTooSmall):
        tau_significance(CorrelationResult(0.5, 0, 0, 0, 0, n=9, variant="eq5"))


def test_star_partition():
    rng = random.Random(1)
    for _ in range(200):
        tau = rng.uniform(-1, 1)
        n = rng.randint(10, 2000)
        result = tau_significance(CorrelationResult(tau, 0, 0, 0, 0, n=n, variant="eq5"))
        assert result.stars in ("", "*", "**", "***")
        if result.p_value < 0.001:
            assert result.stars == "***"
        elif result.p_value < 0.01:
            assert result.stars == "**"
        elif result.p_value < 0.05:
            assert result.stars == "*"
        else:
            assert result.stars == ""


def test_matrix_identical_columns():
    matrix = correlation_matrix({"a": [1, 2, 3, 4], "b": [1, 2, 3, 4]})
    assert matrix["a"]["b"].tau == 1.0
    assert matrix["a"]["a"].tau == 1.0
    assert matrix["b"]["a"] == matrix["a"]["b"]


def test_matrix_negated_column():
    matrix = correlation_matrix({"a": [1, 2, 3, 4], "b": [4, 3, 2, 1]})
    assert matrix["a"]["b"].tau == -1.0


def test_matrix_inverse_flag_negates_tau():
    columns = {"mqm": [5.0, 1.0, 3.0, 2.0], "bleu": [0.2, 0.9, 0.4, 0.8]}
    plain = correlation_matrix(columns)
    inverted = correlation_matrix(columns, inverse=["bleu"])
    for variant_cell, inverted_cell in ((plain, inverted),):
        assert inverted_cell["mqm"]["bleu"].tau == -variant_cell["mqm"]["bleu"].tau


def test_matrix_matches_oracle_on_four_columns():
    rng = random.Random(13)
    columns = {
        name: [rng.randint(0, 12) for _ in range(40)] for name in ("a", "f", "s", "bleu")
    }
    for variant in ("eq5", "tau_b"):
        matrix = correlation_matrix(columns, variant=variant)
        names = list(columns)
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                expected = oracle_tau(columns[a], columns[b], variant)
                assert abs(matrix[a][b].tau - expected) < 1e-12


def test_agreement_identical_validators():
    primary = {"accuracy": {"u1": 1.0, "u2": 2.0, "u3": 3.0}}
    report = agreement_report(primary, [primary, primary])
    assert report["accuracy"].tau == 1.0


def test_agreement_reversed():
    primary = {"style": {"u1": 1.0, "u2": 2.0, "u3": 3.0}}
    validator = {"style": {"u1": 3.0, "u2": 2.0, "u3": 1.0}}
    report = agreement_report(primary, [validator])
    assert report["style"].tau == -1.0


def test_agreement_averages_validators_and_matches_oracle():
    rng = random.Random(55)
    ids = [f"u{i}" for i in range(100)]
    gold = {uid: rng.randint(0, 30) for uid in ids}

    def noisy(scale):
        return {uid: gold[uid] + rng.gauss(0, scale) for uid in ids}

    primary = {"accuracy": {uid: float(gold[uid]) for uid in ids}}
    validators = [{"accuracy": noisy(6.0)}, {"accuracy": noisy(6.0)}]
    report = agreement_report(primary, validators)

    averaged = [
        (validators[0]["accuracy"][uid] + validators[1]["accuracy"][uid]) / 2 for uid in sorted(ids)
    ]
    expected = oracle_tau([primary["accuracy"][uid] for uid in sorted(ids)], averaged, "eq5")
    assert report["accuracy"].tau == expected
    assert 0.3 < report["accuracy"].tau < 0.9


def test_agreement_misaligned_ids():
    primary = {"accuracy": {"u1": 1.0, "u2": 2.0}}
    validator = {"accuracy": {"u1": 1.0, "u3": 2.0}}
    with pytest.raises(ValueError):
        agreement_report(primary, [validator])
