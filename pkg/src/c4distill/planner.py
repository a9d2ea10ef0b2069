"""Multi-round distillation planning: cost/error recursion, thresholds,
optimal sequences, asymptotic exponents, and curve/table exports.

A sequence is evaluated by the recursion p_l = e_l(p_{l-1}) and
c_l = m_l / (n_l * a_l(p_{l-1})) * c_{l-1} with c_0 = 1.  Output errors of
deep sequences reach 1e-29, far below what double precision can carry
through the polynomial evaluations, so the recursion runs under mpmath with
60 significant digits; numerators and denominators are evaluated separately
and divided once (the exact polynomial forms make this cancellation-free).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import log
from typing import Optional, Sequence

from mpmath import mp, mpf, workdps

from .routines import RoutineModel, builtin_models

PLANNER_DPS = 60
THRESHOLD_TOL = 1e-6
THRESHOLD_BRACKET = (1e-6, 0.25)

# The sequence set of the published comparison table, in cost order.
# Leftmost letter is the first round applied.
TABLE_SEQUENCES = ("A", "B", "AA", "BA", "AAA", "BB", "BAA", "AAAA", "BBA", "BAAA")


@dataclass(frozen=True)
class RoundResult:
    routine: str
    p_in: float
    p_out: float
    acceptance: float
    cost: float  # cumulative cost after this round


@dataclass(frozen=True)
class DistillationPlan:
    sequence: tuple[str, ...]
    p0: float
    rounds: tuple[RoundResult, ...]
    final_error: float
    final_cost: float
    diverged: bool

    @property
    def name(self) -> str:
        return "".join(self.sequence) or "(none)"

    def as_dict(self) -> dict:
        return {
            "sequence": self.name,
            "p0": self.p0,
            "final_error": self.final_error,
            "final_cost": self.final_cost,
            "diverged": self.diverged,
            "rounds": [
                {
                    "routine": r.routine,
                    "p_in": r.p_in,
                    "p_out": r.p_out,
                    "acceptance": r.acceptance,
                    "cost": r.cost,
                }
                for r in self.rounds
            ],
        }


@dataclass(frozen=True)
class PlannerGoal:
    """Target for the sequence search.

    ``e_g`` may be given directly or derived from a computation size R as
    1/(10 R); the union-bound requirement is only "much less than 1/R", so
    the factor 10 is a documented, overridable default.
    """

    p0: float
    e_g: Optional[float] = None
    R: Optional[float] = None
    r_margin: float = 10.0
    max_rounds: int = 6

    def goal_error(self) -> float:
        if self.e_g is not None:
            return self.e_g
        if self.R is not None:
            return 1.0 / (self.r_margin * self.R)
        raise ValueError("goal needs e_g or R")

    def validate(self):
        eg = self.goal_error()
        if not 0 < eg < self.p0 < 0.5:
            raise ValueError(f"need 0 < e_g < p0 < 1/2, got e_g={eg}, p0={self.p0}")


def parse_sequence(
    text: str, available: Optional[dict[str, RoutineModel]] = None
) -> list[RoutineModel]:
    models = available or builtin_models()
    out = []
    for ch in text:
        if ch not in models:
            raise KeyError(f"unknown routine {ch!r}")
        out.append(models[ch])
    return out


def evaluate_sequence(
    seq: Sequence[RoutineModel], p0: float, dps: int = PLANNER_DPS
) -> DistillationPlan:
    """Run the cost/error recursion for one round sequence."""
    rounds = []
    diverged = False
    with workdps(dps):
        p = mpf(p0)
        cost = mpf(1)
        for model in seq:
            thr = threshold(model)
            if thr is not None and p >= thr:
                diverged = True
            a = model.acceptance(p)
            p_next = model.output_error(p)
            cost = cost * mpf(model.m) / (model.n * a)
            rounds.append(
                RoundResult(model.name, float(p), float(p_next), float(a), float(cost))
            )
            p = p_next
        final_error = float(p)
        final_cost = float(cost)
    return DistillationPlan(
        sequence=tuple(m.name for m in seq),
        p0=p0,
        rounds=tuple(rounds),
        final_error=final_error,
        final_cost=final_cost,
        diverged=diverged,
    )


_threshold_cache: dict[tuple, Optional[float]] = {}


def threshold(model: RoutineModel, tol: float = THRESHOLD_TOL) -> Optional[float]:
    """Smallest fixed point of e(p) = p in the bracket, by bisection.

    Returns None when e(p) - p has no sign change on the bracket (a routine
    that improves everywhere, or never does).
    """
    key = (model.name, model.m, model.n, model.error_fn)
    if key in _threshold_cache:
        return _threshold_cache[key]

    def f(p: float) -> float:
        return float(model.output_error(p)) - p

    lo, hi = THRESHOLD_BRACKET
    flo, fhi = f(lo), f(hi)
    result: Optional[float]
    if flo == 0:
        result = lo
    elif flo * fhi > 0:
        result = None
    else:
        while hi - lo > tol / 4:
            mid = (lo + hi) / 2
            if flo * f(mid) <= 0:
                hi = mid
            else:
                lo = mid
        result = (lo + hi) / 2
    _threshold_cache[key] = result
    return result


@dataclass(frozen=True)
class SearchResult:
    plan: Optional[DistillationPlan]  # cheapest plan meeting the goal
    closest: Optional[DistillationPlan]  # best error achieved when none does


def best_sequence(
    goal: PlannerGoal, available: Optional[dict[str, RoutineModel]] = None
) -> SearchResult:
    """Exhaustive search over routine sequences up to ``max_rounds``.

    Ties are broken by fewer rounds and then by sequence name.
    """
    goal.validate()
    models = available or builtin_models()
    eg = goal.goal_error()
    names = sorted(models)
    feasible: list[DistillationPlan] = []
    closest: Optional[DistillationPlan] = None
    for length in range(1, goal.max_rounds + 1):
        for combo in itertools.product(names, repeat=length):
            plan = evaluate_sequence([models[c] for c in combo], goal.p0)
            if plan.diverged:
                continue
            if closest is None or plan.final_error < closest.final_error:
                closest = plan
            if plan.final_error <= eg:
                feasible.append(plan)
    if not feasible:
        return SearchResult(plan=None, closest=closest)
    best = min(feasible, key=lambda pl: (pl.final_cost, len(pl.rounds), pl.name))
    return SearchResult(plan=best, closest=best)


def shortest_b_only(
    target_error: float,
    p0: float,
    available: Optional[dict[str, RoutineModel]] = None,
    max_rounds: int = 16,
) -> Optional[DistillationPlan]:
    """Shortest sequence using only the 15-to-1 routine with an equal or
    better final error."""
    models = available or builtin_models()
    b = models["B"]
    for length in range(1, max_rounds + 1):
        plan = evaluate_sequence([b] * length, p0)
        if plan.diverged:
            return None
        if plan.final_error <= target_error:
            return plan
    return None


def improvement_factor(
    plan: DistillationPlan, available: Optional[dict[str, RoutineModel]] = None
) -> float:
    """Cost of the shortest B-only sequence achieving the plan's error or
    better, relative to the plan's cost."""
    ref = shortest_b_only(plan.final_error, plan.p0, available)
    if ref is None:
        raise ValueError("no 15-to-1-only sequence reaches the plan's error")
    return ref.final_cost / plan.final_cost


def improvement_for_goal(
    goal: PlannerGoal, available: Optional[dict[str, RoutineModel]] = None
) -> float:
    result = best_sequence(goal, available)
    if result.plan is None:
        raise ValueError("goal unreachable within max_rounds")
    return improvement_factor(result.plan, available)


def asymptotic_exponent(model: RoutineModel) -> Optional[float]:
    """Exponent xi in the error-vs-resources law err ~ (const * p)^(k^xi).

    For a routine with small-p error kappa * p^d and per-round resource
    ratio m/n, xi = log(d) / log(m/n).  Returns None when d <= 1.
    """
    d, _ = model.leading_order()
    if d <= 1:
        return None
    return log(d) / log(model.m / model.n)


def iterate_closed_form(model: RoutineModel, p0: float, rounds: int, dps: int = PLANNER_DPS):
    """Small-p closed form for the error after ``rounds`` rounds:
    kappa^(-1/(d-1)) * (kappa^(1/(d-1)) * p0)^(d^rounds)."""
    d, kappa = model.leading_order()
    if d <= 1:
        raise ValueError("needs an error of order p^2 or higher")
    with workdps(dps):
        scale = mpf(kappa.numerator) / mpf(kappa.denominator)
        scale = scale ** (mpf(1) / (d - 1))
        return float((scale * p0) ** (d**rounds) / scale)


@dataclass(frozen=True)
class TableRow:
    sequence: str
    cost: float
    error: float
    improvement: float


def table_rows(
    p0: float = 0.01,
    sequences: Sequence[str] = TABLE_SEQUENCES,
    available: Optional[dict[str, RoutineModel]] = None,
) -> list[TableRow]:
    """Cost, output error and improvement factor for the standard sequence
    set at the given input error."""
    models = available or builtin_models()
    rows = []
    for name in sequences:
        plan = evaluate_sequence(parse_sequence(name, models), p0)
        rows.append(
            TableRow(
                sequence=name,
                cost=plan.final_cost,
                error=plan.final_error,
                improvement=improvement_factor(plan, models),
            )
        )
    return rows


def error_curves(
    sequences: Sequence[str],
    grid: Sequence[float],
    available: Optional[dict[str, RoutineModel]] = None,
) -> list[list[float]]:
    """Rows (p, error per sequence) over the grid."""
    models = available or builtin_models()
    parsed = {name: parse_sequence(name, models) for name in sequences}
    rows = []
    for p in grid:
        row = [p]
        for name in sequences:
            row.append(evaluate_sequence(parsed[name], p).final_error)
        rows.append(row)
    return rows


def step_cost_curve(
    p0: float,
    eg_grid: Sequence[float],
    available: Optional[dict[str, RoutineModel]] = None,
    max_rounds: int = 6,
) -> list[tuple[float, float, str, float, str]]:
    """Rows (e_g, best cost, best sequence, B-only cost, B-only sequence)."""
    models = available or builtin_models()
    rows = []
    for eg in eg_grid:
        goal = PlannerGoal(p0=p0, e_g=eg, max_rounds=max_rounds)
        res = best_sequence(goal, models)
        if res.plan is None:
            continue
        ref = shortest_b_only(eg, p0, models)
        rows.append(
            (
                eg,
                res.plan.final_cost,
                res.plan.name,
                ref.final_cost if ref else float("nan"),
                ref.name if ref else "",
            )
        )
    return rows


def curve_crossings(
    sequences: Sequence[str],
    grid: Sequence[float],
    available: Optional[dict[str, RoutineModel]] = None,
) -> list[tuple[str, str, float]]:
    """Crossing points between consecutive sequence curves on the grid.

    Consecutive means adjacent in the given order (the standard set is cost
    ordered); the returned p values bound the preference regions.
    """
    models = available or builtin_models()
    out = []
    for name_a, name_b in zip(sequences, sequences[1:]):
        seq_a = parse_sequence(name_a, models)
        seq_b = parse_sequence(name_b, models)

        def gap(p: float) -> float:
            ea = evaluate_sequence(seq_a, p).final_error
            eb = evaluate_sequence(seq_b, p).final_error
            return log(ea) - log(eb)

        prev_p = None
        prev_g = None
        for p in grid:
            g = gap(p)
            if prev_g is not None and prev_g * g < 0:
                lo, hi = prev_p, p
                for _ in range(60):
                    mid = (lo + hi) / 2
                    if gap(lo) * gap(mid) <= 0:
                        hi = mid
                    else:
                        lo = mid
                out.append((name_a, name_b, (lo + hi) / 2))
            prev_p, prev_g = p, g
    return out
