"""Exhaustive pattern classification and the exact polynomials."""

from fractions import Fraction

import pytest

from c4distill.enumeration import (
    N_PATTERNS,
    PUBLISHED_ACCEPTANCE,
    PUBLISHED_EITHER,
    PUBLISHED_MARGINAL,
    DenseClassifier,
    classification_report,
    derive_polynomials,
    exact_verdicts,
)


def test_polynomials_match_published_exactly(polyset):
    assert polyset.acceptance.as_integers() == list(PUBLISHED_ACCEPTANCE)
    assert polyset.marginal.as_integers() == list(PUBLISHED_MARGINAL)
    assert polyset.either.as_integers() == list(PUBLISHED_EITHER)


def test_all_errors_pattern_is_accepted(polyset):
    # a(1) = 1: the weight-10 pattern passes every check.
    assert polyset.acceptance(Fraction(1)) == 1
    assert sum(PUBLISHED_ACCEPTANCE) == 1
    v = exact_verdicts()[N_PATTERNS - 1]
    assert float(v.accept) == pytest.approx(1.0)


def test_noiseless_pattern_clean():
    v = exact_verdicts()[0]
    assert float(v.accept) == 1.0
    assert float(v.either) == 0.0


def test_every_single_error_rejected():
    verdicts = exact_verdicts()
    for loc in range(10):
        assert float(verdicts[1 << loc].accept) == 0.0, loc


def test_odd_weight_gate_only_patterns_rejected():
    verdicts = exact_verdicts()
    for gate_bits in range(256):
        if bin(gate_bits).count("1") % 2 == 1:
            assert float(verdicts[gate_bits << 2].accept) == 0.0, gate_bits


def test_dense_and_frame_agree_on_all_patterns():
    dense = DenseClassifier()
    verdicts = exact_verdicts()
    worst = 0.0
    for bits in range(N_PATTERNS):
        dv = dense.classify(bits)
        ev = verdicts[bits].as_floats()
        for got, want in zip((dv.accept, dv.err1, dv.err2, dv.both, dv.either), ev):
            worst = max(worst, abs(got - want))
    assert worst < 1e-10


def test_output_fidelity_classes(polyset):
    # Conditional output fidelities only ever take the values 0 and 1 here;
    # the enumeration reports whether any 1/2-fidelity residual occurs, and
    # none does (consistent with the integer coefficient lists).
    assert polyset.pattern_counts["half_fidelity"] == 0
    dense = DenseClassifier()
    for bits in (0, 3, 0b1010000000, 0b0001100000):
        dv = dense.classify(bits)
        if dv.accept > 0 and dv.joint is not None:
            for row in dv.joint:
                for q in row:
                    assert min(abs(q - t) for t in (0.0, 0.5, 1.0)) < 1e-10


def test_positivity_and_ordering(polyset):
    e, e2 = polyset.conditional_errors()
    p = 0.0
    while p <= 1.0:
        a = float(polyset.acceptance(p))
        u = float(polyset.marginal(p))
        u2 = float(polyset.either(p))
        assert -1e-12 <= u <= u2 + 1e-12 <= a + 1e-12 <= 1 + 1e-12, p
        p += 1e-3 * 10  # coarse outer grid; the fine grid runs below 0.089
    p = 1e-3
    while p <= 0.089:
        ev = e(p)
        e2v = e2(p)
        assert e2v <= 2 * ev - ev * ev + 1e-15, p
        p += 1e-3


def test_acceptance_positive_below_half(polyset):
    p = 0.0
    while p < 0.5:
        assert float(polyset.acceptance(p)) > 0.0
        p += 1e-2


def test_conditional_error_values(polyset):
    e, e2 = polyset.conditional_errors()
    assert e(0.0) == 0.0
    # Two significant figures at p = 0.01.
    assert e(0.01) == pytest.approx(9.3e-4, abs=0.05e-4)
    # Both-error leading coefficient: 2*9 - 13 = 5.
    both_coeffs = polyset.both.as_integers()
    assert both_coeffs[2] == 5
    assert 2 * PUBLISHED_MARGINAL[2] - PUBLISHED_EITHER[2] == 5


def test_division_by_zero_guard(polyset):
    e, _ = polyset.conditional_errors()
    # a(p) vanishes nowhere on [0, 1/2); a synthetic zero denominator raises.
    from c4distill.exactalg import ExactPolynomial, RationalFunction

    bad = RationalFunction(ExactPolynomial.make([1]), ExactPolynomial.make([0, 1]))
    with pytest.raises(ZeroDivisionError):
        bad(0.0)


def test_accept_weight_per_class(polyset):
    assert [int(q) for q in polyset.accept_by_weight] == [1, 0, 13, 32, 50, 64, 50, 32, 13, 0, 1]


def test_symmetry_between_outputs():
    # derive_polynomials itself asserts u_out1 == u_out2; spot-check a few
    # mirrored patterns too (swap the two data bits and the gadget pairs
    # targeting the same wire across blocks).
    verdicts = exact_verdicts()
    total_err1 = sum(float(v.err1) for v in verdicts)
    total_err2 = sum(float(v.err2) for v in verdicts)
    assert total_err1 == pytest.approx(total_err2, abs=1e-9)


def test_classification_report_shape():
    report = classification_report()
    assert report["a"] == list(PUBLISHED_ACCEPTANCE)
    counts = report["patterns"]
    n_error = sum(counts["error"].values())
    assert counts["rejected"] + counts["clean"] + n_error == N_PATTERNS
    assert counts["half_fidelity"] == 0
    # Mixed-flip (fractionally accepted) patterns are reported separately.
    assert counts["error"]["partial"] == counts["fractional_accept"] == 256
    assert counts["error"]["both_outputs"] == 32


def test_partial_patterns_are_correlated_half_flips():
    # Patterns whose accepted branch carries an X/Z-type logical residual:
    # acceptance weight 1/2, each output marginally flipped with probability
    # 1/2, and the flips perfectly correlated -- either anticorrelated
    # (exactly one output flipped, 128 patterns) or jointly flipped/clean
    # (128 patterns).  The integer coefficient lists absorb these halves.
    verdicts = exact_verdicts()
    partials = [v for v in verdicts if v.error_class() == "partial"]
    assert len(partials) == 256
    both_kinds = {0.0: 0, 0.5: 0}
    for v in partials:
        acc = float(v.accept)
        assert acc == pytest.approx(0.5, abs=1e-12)
        assert float(v.err1) / acc == pytest.approx(0.5, abs=1e-12)
        assert float(v.err2) / acc == pytest.approx(0.5, abs=1e-12)
        both_kinds[round(float(v.both) / acc, 12)] += 1
    assert both_kinds == {0.0: 128, 0.5: 128}


def test_coefficient_mismatch_reports_diff(monkeypatch):
    import c4distill.enumeration as en

    monkeypatch.setattr(en, "PUBLISHED_MARGINAL", (0, 0, 8, -56, 160, -256, 240, -128, 32))
    with pytest.raises(en.CoefficientMismatch) as err:
        en.derive_polynomials()
    assert "degree 2" in str(err.value)
    assert "weight" in str(err.value)
