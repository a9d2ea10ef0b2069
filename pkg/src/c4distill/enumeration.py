"""Exhaustive classification of the 2^10 error patterns of the routine.

Two classifiers cover every pattern:

* ``DenseClassifier`` inserts the pattern's Paulis into the 5-wire circuit
  and runs the state-vector oracle, post-selecting the noiseless reference
  outcomes.
* ``FrameClassifier`` never touches amplitudes on the full register.  Gate
  errors are conjugated (exactly, with phases) through the Clifford block to
  a common reference point, checked against the stabilizers, and reduced to
  logical operators; the accepted-branch Kraus operator of the encoded
  measurement is then assembled in a 4-dimensional exact algebra over
  Q(i, sqrt2).  Acceptance and per-output error weights come out as exact
  rationals, which is what makes the polynomial coefficients exact.

Both classifiers must agree on all 1024 patterns; the derived acceptance and
undetected-error polynomials must equal the published integer coefficient
lists, or ``CoefficientMismatch`` reports a per-degree and per-weight diff.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .circuits import (
    CODE,
    DistillationLayout,
    build_distillation_circuit,
    distillation_layout,
    insert_pattern,
    reference_outcomes,
)
from .exactalg import (
    Exact,
    ExactPolynomial,
    HBasisState,
    QS_ZERO,
    QSqrt2,
    RationalFunction,
)
from .pauli import PauliString, conjugate_through

N_LOCATIONS = 10
N_PATTERNS = 1 << N_LOCATIONS

# Coefficient lists (by ascending degree) that the enumeration must
# reproduce exactly: acceptance, marginal undetected error of one output,
# and undetected error on at least one output.
PUBLISHED_ACCEPTANCE = (1, -10, 58, -192, 400, -544, 480, -256, 64)
PUBLISHED_MARGINAL = (0, 0, 9, -56, 160, -256, 240, -128, 32)
PUBLISHED_EITHER = (0, 0, 13, -80, 228, -368, 352, -192, 48)


class CoefficientMismatch(RuntimeError):
    """Derived polynomials disagree with the published coefficients."""


@dataclass(frozen=True)
class ExactVerdict:
    """Unconditional weights (probabilities given the pattern) as exact
    values: acceptance, per-output error, both-error and either-error."""

    accept: QSqrt2
    err1: QSqrt2
    err2: QSqrt2
    both: QSqrt2
    either: QSqrt2

    def as_floats(self) -> tuple[float, float, float, float, float]:
        return tuple(float(v) for v in (self.accept, self.err1, self.err2, self.both, self.either))

    def error_class(self) -> str:
        """Conditional classification of a pattern's accepted branch."""
        acc = float(self.accept)
        if acc == 0.0:
            return "rejected"
        e1 = float(self.err1) / acc
        e2 = float(self.err2) / acc

        def near(x, t):
            return abs(x - t) < 1e-12

        if near(e1, 0) and near(e2, 0):
            return "clean"
        if near(e1, 1) and near(e2, 1):
            return "both_outputs"
        if near(e1, 1) and near(e2, 0):
            return "first_output"
        if near(e1, 0) and near(e2, 1):
            return "second_output"
        return "partial"


@dataclass(frozen=True)
class DenseVerdict:
    accept: float
    err1: float
    err2: float
    both: float
    either: float
    joint: Optional[tuple[tuple[float, float], tuple[float, float]]] = None


_REJECTED = ExactVerdict(QS_ZERO, QS_ZERO, QS_ZERO, QS_ZERO, QS_ZERO)


def _embed_code(p: PauliString) -> PauliString:
    """Lift a 4-wire code Pauli onto the 5-wire register (ancilla = wire 0)."""
    return PauliString(5, p.x << 1, p.z << 1, p.phase)


class FrameClassifier:
    """Exact Pauli-propagation classifier for 10-bit error patterns.

    Gate errors commute past sibling controlled-H gates (their ancilla part
    is diagonal), so each propagates through ordinary Cliffords only.  An
    error that reaches the reference point off the code's normalizer flips a
    check in every measurement branch and is rejected outright; normalizer
    elements act as logical Paulis whose interference in the encoded
    measurement is evaluated exactly.
    """

    def __init__(self, layout: Optional[DistillationLayout] = None):
        ly = layout or distillation_layout()
        self.layout = ly
        n = ly.width
        self.sx = _embed_code(CODE.stabilizers[0])
        self.sz = _embed_code(CODE.stabilizers[1])
        self.lx = tuple(_embed_code(p) for p in CODE.logical_x)
        self.lz = tuple(_embed_code(p) for p in CODE.logical_z)
        a = ly.ancilla
        w_mask = 1 << ly.code_wires[0]
        middle = list(ly.middle)
        self.concentrated: dict[int, PauliString] = {}
        self.block2: dict[int, PauliString] = {}
        loc_id = 2
        for block, ch_specs in (("first", ly.first_block), ("second", ly.second_block)):
            for _, (ctl, tgt) in ch_specs:
                first = PauliString.single(n, a, "Z") * PauliString.single(n, tgt, "Y")
                second = PauliString.single(n, tgt, "Y")
                for form in (first, second):
                    if block == "first":
                        form = conjugate_through(form, middle, n)
                        if form.x & (1 << a) or (form.x | form.z) & w_mask:
                            raise AssertionError("concentrated form leaves frame assumptions")
                        self.concentrated[loc_id] = form
                    else:
                        self.block2[loc_id] = form
                    loc_id += 1
        # Conjugation by H on every code wire except the one the eliminated
        # controlled-H pair targeted (the third code wire).
        w1, w2, w3, w4 = ly.code_wires
        self._hless = [("h", (w1,)), ("h", (w2,)), ("h", (w4,))]

    def _split_ancilla(self, p: PauliString) -> tuple[int, PauliString]:
        a = self.layout.ancilla
        if p.x >> a & 1:
            raise AssertionError("ancilla picked up a non-diagonal component")
        s = p.z >> a & 1
        mask = ((1 << p.n) - 1) ^ (1 << a)
        return s, PauliString(p.n, p.x & mask, p.z & mask, p.phase)

    def _logical_term(self, p: PauliString) -> Optional[tuple[int, tuple[int, int, int, int]]]:
        """Decompose a (5-wire, ancilla-free) Pauli over the code: None when
        a stabilizer detects it, else (i-power, X1,Z1,X2,Z2 exponents)."""
        if not p.commutes(self.sx) or not p.commutes(self.sz):
            return None
        a1 = 0 if p.commutes(self.lz[0]) else 1
        b1 = 0 if p.commutes(self.lx[0]) else 1
        a2 = 0 if p.commutes(self.lz[1]) else 1
        b2 = 0 if p.commutes(self.lx[1]) else 1
        canon = PauliString.identity(p.n)
        for power, gen in ((a1, self.lx[0]), (b1, self.lz[0]), (a2, self.lx[1]), (b2, self.lz[1])):
            if power:
                canon = canon * gen
        resid_x = p.x ^ canon.x
        resid_z = p.z ^ canon.z
        if resid_x not in (0, self.sx.x):
            raise AssertionError("residual is not a stabilizer element")
        if resid_z not in (0, self.sz.z):
            raise AssertionError("residual is not a stabilizer element")
        if resid_x:
            canon = canon * self.sx
        if resid_z:
            canon = canon * self.sz
        if canon.x != p.x or canon.z != p.z:
            raise AssertionError("decomposition failed")
        omega = (p.phase - canon.phase) & 3
        return omega, (a1, b1, a2, b2)

    def classify(self, bits: int) -> ExactVerdict:
        ly = self.layout
        n = ly.width
        d1 = bits & 1
        d2 = bits >> 1 & 1
        mid_total = PauliString.identity(n)
        late_total = PauliString.identity(n)
        for loc_id in range(2, 6):
            if bits >> loc_id & 1:
                mid_total = self.concentrated[loc_id] * mid_total
        for loc_id in range(6, 10):
            if bits >> loc_id & 1:
                late_total = self.block2[loc_id] * late_total
        s1, mid_code = self._split_ancilla(mid_total)
        s2, late_code = self._split_ancilla(late_total)
        sign = (s1 + s2) & 1

        term1 = self._logical_term(late_code * mid_code)
        flipped = conjugate_through(mid_code, self._hless, n)
        term2 = self._logical_term(late_code * flipped)
        if term1 is None and term2 is None:
            return _REJECTED

        base = HBasisState.basis((d1 << 1) | d2)
        if d1:
            base = base.scaled(Exact.i_power(1))
        if d2:
            base = base.scaled(Exact.i_power(1))
        half = Exact.rational(Fraction(1, 2))
        acc = HBasisState([Exact(), Exact(), Exact(), Exact()])
        if term1 is not None:
            om, (a1, b1, a2, b2) = term1
            t = base.apply_1q("H", 1)
            t = t.apply_xz(a2, b2, 1)
            t = t.apply_xz(a1, b1, 0)
            acc = acc + t.scaled(Exact.i_power(om) * half)
        if term2 is not None:
            om, (a1, b1, a2, b2) = term2
            t = base.apply_1q("H", 0)
            t = t.apply_xz(a2, b2, 1)
            t = t.apply_xz(a1, b1, 0)
            acc = acc + t.scaled(Exact.i_power(om + 2 * sign) * half)
        w = acc.weights()
        norm = acc.norm2()
        return ExactVerdict(
            accept=norm,
            err1=w[2] + w[3],
            err2=w[1] + w[3],
            both=w[3],
            either=norm - w[0],
        )


class DenseClassifier:
    """State-vector classification against the noiseless reference run."""

    def __init__(self):
        self.circuit, self.locations = build_distillation_circuit()
        self.reference = reference_outcomes(self.circuit)
        self.out1 = self.circuit.labels["out1"]
        self.out2 = self.circuit.labels["out2"]

    def classify(self, bits: int) -> DenseVerdict:
        from .statevec import h_basis_joint, run

        circ = insert_pattern(self.circuit, self.locations, bits)
        branches = run(circ, postselect=self.reference)
        if not branches:
            return DenseVerdict(0.0, 0.0, 0.0, 0.0, 0.0)
        (br,) = branches
        w = br.prob
        joint = h_basis_joint(br.state, self.out1, self.out2)
        return DenseVerdict(
            accept=w,
            err1=w * float(joint[1, 0] + joint[1, 1]),
            err2=w * float(joint[0, 1] + joint[1, 1]),
            both=w * float(joint[1, 1]),
            either=w * float(1.0 - joint[0, 0]),
            joint=((float(joint[0, 0]), float(joint[0, 1])), (float(joint[1, 0]), float(joint[1, 1]))),
        )


@dataclass(frozen=True)
class PolynomialSet:
    """The routine's exact polynomials plus enumeration bookkeeping."""

    acceptance: ExactPolynomial
    marginal: ExactPolynomial
    either: ExactPolynomial
    both: ExactPolynomial
    accept_by_weight: tuple[Fraction, ...]
    pattern_counts: dict[str, int]

    def conditional_errors(self) -> tuple[RationalFunction, RationalFunction]:
        return (
            RationalFunction(self.marginal, self.acceptance),
            RationalFunction(self.either, self.acceptance),
        )


def _rationalize(v: QSqrt2, what: str) -> Fraction:
    try:
        return v.as_fraction()
    except ValueError as exc:
        raise AssertionError(f"{what} came out irrational: {v}") from exc


@lru_cache(maxsize=1)
def _cached_verdicts() -> tuple[ExactVerdict, ...]:
    fc = FrameClassifier()
    return tuple(fc.classify(bits) for bits in range(N_PATTERNS))


def exact_verdicts() -> tuple[ExactVerdict, ...]:
    """Exact verdicts for all 1024 patterns, cached."""
    return _cached_verdicts()


def derive_polynomials(validate: bool = True) -> PolynomialSet:
    """Sum the per-pattern weights into exact polynomials in p.

    Patterns reduce by Hamming weight; the reduction is a plain sum, so any
    enumeration order (or parallel fan-out) gives identical results.
    """
    verdicts = exact_verdicts()
    acc_w = [QS_ZERO] * (N_LOCATIONS + 1)
    err_w = [QS_ZERO] * (N_LOCATIONS + 1)
    err2_w = [QS_ZERO] * (N_LOCATIONS + 1)
    both_w = [QS_ZERO] * (N_LOCATIONS + 1)
    any_w = [QS_ZERO] * (N_LOCATIONS + 1)
    counts = {"rejected": 0, "clean": 0, "error": 0, "fractional_accept": 0, "half_fidelity": 0}
    for bits, v in enumerate(verdicts):
        w = bits.bit_count()
        acc_w[w] += v.accept
        err_w[w] += v.err1
        err2_w[w] += v.err2
        both_w[w] += v.both
        any_w[w] += v.either
        accept = float(v.accept)
        if accept == 0.0:
            counts["rejected"] += 1
        else:
            counts["error" if float(v.either) > 0 else "clean"] += 1
            if abs(accept - 1.0) > 1e-12:
                counts["fractional_accept"] += 1
            for errv in (v.err1, v.err2):
                cond = float(errv) / accept
                if min(abs(cond - t) for t in (0.0, 0.5, 1.0)) > 1e-12:
                    counts["half_fidelity"] += 1
    accept_by_weight = tuple(_rationalize(x, f"accept weight class {w}") for w, x in enumerate(acc_w))
    poly = {}
    for name, tallies in (("a", acc_w), ("u", err_w), ("u_second", err2_w), ("u2", any_w), ("both", both_w)):
        total = ExactPolynomial.zero()
        for w, tally in enumerate(tallies):
            q = _rationalize(tally, f"{name} weight class {w}")
            if q:
                total = total + ExactPolynomial.binomial_term(w, N_LOCATIONS).scaled(q)
        poly[name] = total
    if poly["u"].coefficients != poly["u_second"].coefficients:
        raise AssertionError("marginal error polynomials differ between outputs")
    result = PolynomialSet(
        acceptance=poly["a"],
        marginal=poly["u"],
        either=poly["u2"],
        both=poly["both"],
        accept_by_weight=accept_by_weight,
        pattern_counts=counts,
    )
    if validate:
        _validate(result)
    return result


def _validate(ps: PolynomialSet):
    problems = []
    for name, got, want in (
        ("acceptance", ps.acceptance, PUBLISHED_ACCEPTANCE),
        ("marginal", ps.marginal, PUBLISHED_MARGINAL),
        ("either", ps.either, PUBLISHED_EITHER),
    ):
        got_ints = got.as_integers()
        want_list = list(want)
        if got_ints != want_list:
            degrees = range(max(len(got_ints), len(want_list)))
            diff = [
                f"  degree {d}: derived {got_ints[d] if d < len(got_ints) else 0}"
                f" != published {want_list[d] if d < len(want_list) else 0}"
                for d in degrees
                if (got_ints[d] if d < len(got_ints) else 0) != (want_list[d] if d < len(want_list) else 0)
            ]
            problems.append(f"{name} polynomial differs:\n" + "\n".join(diff))
    if problems:
        weights = ", ".join(f"w={w}: {q}" for w, q in enumerate(ps.accept_by_weight))
        raise CoefficientMismatch(
            "\n".join(problems) + f"\nacceptance weight per pattern class: {weights}"
        )


def classification_report() -> dict:
    """JSON-ready summary: coefficient lists plus pattern tallies."""
    ps = derive_polynomials()
    by_class: dict[str, int] = {}
    for v in exact_verdicts():
        cls = v.error_class()
        by_class[cls] = by_class.get(cls, 0) + 1
    rejected = by_class.pop("rejected", 0)
    clean = by_class.pop("clean", 0)
    return {
        "a": ps.acceptance.as_integers(),
        "u": ps.marginal.as_integers(),
        "u2": ps.either.as_integers(),
        "both": ps.both.as_integers(),
        "patterns": {
            "rejected": rejected,
            "clean": clean,
            "error": by_class,
            "fractional_accept": ps.pattern_counts["fractional_accept"],
            "half_fidelity": ps.pattern_counts["half_fidelity"],
        },
        "accept_weight_by_pattern_weight": [str(q) for q in ps.accept_by_weight],
    }
