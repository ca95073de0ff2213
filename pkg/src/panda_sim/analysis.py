"""Cost-efficiency analysis over sweep outputs.

Covers Pareto frontier extraction over the three objectives (carbon footprint
minimized, habitat quality and gross economic benefits maximized), quartile
performance labels, the four surrogate model forms fitted to the direct
benefits (reverted area X1, electricity consumption X2), budget and
indifference curves over the (X1, X2) plane, and posterior selection under a
budget cap, a minimum reverted-area target, and preference weights.

All operations are pure over immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq, curve_fit

from .demography import DomainError
from .engine import SweepTable
from .policy import PolicyScenario

LABELS = ("--", "-", "+", "++")


class FitError(RuntimeError):
    """Surrogate fitting failed (insufficient or singular data)."""


@dataclass(frozen=True)
class ObjectiveTriple:
    carbon_kg: float              # minimized
    habitat_index: float          # maximized
    gross_economic_benefits: float  # maximized

    def goodness(self) -> tuple[float, float, float]:
        """Orientation-normalized copy: higher is better on every axis."""
        return (-self.carbon_kg, self.habitat_index, self.gross_economic_benefits)


@dataclass(frozen=True)
class ParetoPoint:
    scenario: PolicyScenario
    objectives: ObjectiveTriple
    reverted_area_mu: float       # direct benefit X1
    electricity_kwh: float        # direct benefit X2
    financial_burden: float


def points_from_sweep(table: SweepTable, year: int | None = None) -> list[ParetoPoint]:
    """Reference-year objective triples for every scenario in a sweep."""
    ref = table.reference_year() if year is None else year
    points = []
    for sc in table.scenarios:
        row = table.means[(sc, ref)]
        points.append(ParetoPoint(
            scenario=sc,
            objectives=ObjectiveTriple(
                carbon_kg=row["carbon_kg"],
                habitat_index=row["habitat_index"],
                gross_economic_benefits=row["gross_economic_benefits"],
            ),
            reverted_area_mu=row["reverted_area_mu"],
            electricity_kwh=row["electricity_kwh"],
            financial_burden=row["financial_burden"],
        ))
    return points


def pareto_frontier(points: list[ParetoPoint]) -> list[ParetoPoint]:
    """Non-dominated subset, input order preserved.

    p dominates q when p is at least as good on all three objectives and
    strictly better on at least one; duplicate triples are all retained.
    """
    if not points:
        raise DomainError("pareto_frontier requires a non-empty point list")
    good = np.array([p.objectives.goodness() for p in points])
    # vectorized pairwise dominance: q is dominated if some p >= q everywhere
    # with at least one strict improvement
    ge = (good[:, None, :] >= good[None, :, :]).all(axis=2)
    gt = (good[:, None, :] > good[None, :, :]).any(axis=2)
    dominated = (ge & gt).any(axis=0)
    return [p for p, d in zip(points, dominated) if not d]


def _goodness_fraction(values: np.ndarray, maximize: bool) -> np.ndarray:
    lo, hi = float(values.min()), float(values.max())
    if hi - lo <= 0.0:
        return np.ones_like(values, dtype=float)
    g = (values - lo) / (hi - lo)
    return g if maximize else 1.0 - g


def quartile_labels(frontier: list[ParetoPoint]) -> list[dict[str, str]]:
    """Per-point {economy, carbon, habitat} labels in '--' .. '++'.

    Each objective's frontier range splits into four equal-width bins oriented
    so '++' is the best quarter; a degenerate (constant) range labels all
    points '++'.
    """
    if not frontier:
        raise DomainError("quartile_labels requires a non-empty frontier")
    econ = np.array([p.objectives.gross_economic_benefits for p in frontier])
    carbon = np.array([p.objectives.carbon_kg for p in frontier])
    habitat = np.array([p.objectives.habitat_index for p in frontier])
    out: list[dict[str, str]] = []
    fractions = {
        "economy": _goodness_fraction(econ, maximize=True),
        "carbon": _goodness_fraction(carbon, maximize=False),
        "habitat": _goodness_fraction(habitat, maximize=True),
    }
    for i in range(len(frontier)):
        labels = {}
        for key, frac in fractions.items():
            bin_index = min(3, int(frac[i] * 4.0))
            labels[key] = LABELS[bin_index]
        out.append(labels)
    return out


# ---------------------------------------------------------------------------
# Surrogate models (direct benefits X1 = reverted Mu, X2 = electricity kWh)


class SurrogateForm(str, Enum):
    G2G_BUDGET = "g2g_budget"        # Y = a*exp(b*X1) + c
    F2E_BUDGET = "f2e_budget"        # Y = a*X2^2 + b*X1 + c (printed form)
    HABITAT_CUBIC = "habitat_cubic"  # full bivariate cubic, 10 coefficients
    ECON_QUADRATIC = "econ_quadratic"  # full bivariate quadratic, 6 coefficients


N_COEFFICIENTS = {
    SurrogateForm.G2G_BUDGET: 3,
    SurrogateForm.F2E_BUDGET: 3,
    SurrogateForm.HABITAT_CUBIC: 10,
    SurrogateForm.ECON_QUADRATIC: 6,
}


@dataclass
class FittedSurrogate:
    form: SurrogateForm
    coefficients: list[float]
    train_r2: float = float("nan")
    test_r2: float = float("nan")
    # internal standardization applied before evaluating polynomial terms;
    # 1.0 reproduces the printed functional forms verbatim
    x1_scale: float = 1.0
    x2_scale: float = 1.0
    x2_linear: bool = False        # F2E variant: b multiplies X2 instead of X1

    def __post_init__(self):
        expected = N_COEFFICIENTS[SurrogateForm(self.form)]
        if len(self.coefficients) != expected:
            raise FitError(
                f"{self.form} expects {expected} coefficients, got {len(self.coefficients)}")


def _cubic_terms(u1, u2):
    return [np.ones_like(u1), u1, u2, u1 ** 2, u1 * u2, u2 ** 2,
            u1 ** 3, u1 ** 2 * u2, u1 * u2 ** 2, u2 ** 3]


def _quadratic_terms(u1, u2):
    return [np.ones_like(u1), u1, u2, u1 ** 2, u1 * u2, u2 ** 2]


def eval_surrogate(model: FittedSurrogate, x1, x2):
    """Evaluate the fitted form at (x1, x2); accepts scalars or arrays."""
    u1 = np.asarray(x1, dtype=float) / model.x1_scale
    u2 = np.asarray(x2, dtype=float) / model.x2_scale
    c = model.coefficients
    form = SurrogateForm(model.form)
    if form is SurrogateForm.G2G_BUDGET:
        a, b, const = c
        out = a * np.exp(np.minimum(b * u1, 700.0)) + const
    elif form is SurrogateForm.F2E_BUDGET:
        a, b, const = c
        linear = u2 if model.x2_linear else u1
        out = a * u2 ** 2 + b * linear + const
    elif form is SurrogateForm.HABITAT_CUBIC:
        out = sum(coef * term for coef, term in zip(c, _cubic_terms(u1, u2)))
    else:
        out = sum(coef * term for coef, term in zip(c, _quadratic_terms(u1, u2)))
    if np.isscalar(x1) and np.isscalar(x2):
        return float(out)
    return out


def r_squared(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """1 - SSres/SStot; a constant target defines R^2 = 0."""
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0.0:
        return 0.0
    ss_res = float(np.sum((y_true - y_pred) ** 2))
    return 1.0 - ss_res / ss_tot


def _train_test_split(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_test = max(1, n // 5)
    return perm[n_test:], perm[:n_test]


def fit_surrogate(samples, form: SurrogateForm, seed: int = 0,
                  x2_linear: bool = False) -> FittedSurrogate:
    """Least-squares fit of one surrogate form to (x1, x2, y) samples.

    Polynomial forms solve a linear system on internally standardized inputs;
    the exponential budget form runs nonlinear least squares with a
    multi-start on b in {0.001, 0.005, 0.01}. Train/test R^2 come from a
    seeded 80/20 shuffle split.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise FitError("samples must be an iterable of (x1, x2, y)")
    n = len(arr)
    n_coef = N_COEFFICIENTS[SurrogateForm(form)]
    if n < 2 * n_coef:
        raise FitError(f"need at least {2 * n_coef} samples for {form}, got {n}")
    x1, x2, y = arr[:, 0], arr[:, 1], arr[:, 2]
    train, test = _train_test_split(n, seed)

    form = SurrogateForm(form)
    if form is SurrogateForm.G2G_BUDGET:
        model = _fit_exponential(x1[train], y[train])
    else:
        # standardize to keep cubic terms conditioned
        s1 = max(1.0, float(np.abs(x1).max()))
        s2 = max(1.0, float(np.abs(x2).max()))
        u1, u2 = x1 / s1, x2 / s2
        if form is SurrogateForm.F2E_BUDGET:
            linear = u2 if x2_linear else u1
            columns = [u2 ** 2, linear, np.ones_like(u1)]
        elif form is SurrogateForm.HABITAT_CUBIC:
            columns = _cubic_terms(u1, u2)
        else:
            columns = _quadratic_terms(u1, u2)
        design = np.column_stack(columns)[train]
        coefs, _, rank, _ = np.linalg.lstsq(design, y[train], rcond=None)
        if rank < design.shape[1]:
            raise FitError(f"singular design matrix for {form}")
        model = FittedSurrogate(form=form, coefficients=[float(v) for v in coefs],
                                x1_scale=s1, x2_scale=s2, x2_linear=x2_linear)

    pred_train = eval_surrogate(model, x1[train], x2[train])
    pred_test = eval_surrogate(model, x1[test], x2[test])
    model.train_r2 = r_squared(y[train], np.asarray(pred_train))
    model.test_r2 = r_squared(y[test], np.asarray(pred_test))
    return model


_EXP_B_STARTS = (0.001, 0.005, 0.01)


def _fit_exponential(x1: np.ndarray, y: np.ndarray) -> FittedSurrogate:
    import warnings

    from scipy.optimize import OptimizeWarning

    def fn(x, a, b, c):
        return a * np.exp(np.minimum(b * x, 700.0)) + c

    best = None
    spread = float(y.max() - y.min())
    for b0 in _EXP_B_STARTS:
        growth = math.expm1(min(b0 * float(x1.max()), 700.0))
        a0 = spread / growth if growth > 0 else 1.0
        try:
            with warnings.catch_warnings():
                # non-exponential data makes the covariance singular; the fit
                # itself is still ranked by SSE across the starts
                warnings.simplefilter("ignore", OptimizeWarning)
                popt, _ = curve_fit(fn, x1, y, p0=[a0 or 1.0, b0, float(y.min())],
                                    maxfev=20000)
        except (RuntimeError, ValueError):
            continue
        sse = float(np.sum((fn(x1, *popt) - y) ** 2))
        if not math.isfinite(sse):
            continue
        if best is None or sse < best[0]:
            best = (sse, popt)
    if best is None:
        raise FitError("exponential fit failed from every start")
    a, b, c = best[1]
    return FittedSurrogate(form=SurrogateForm.G2G_BUDGET,
                           coefficients=[float(a), float(b), float(c)])


# ---------------------------------------------------------------------------
# Budget and indifference curves


def budget_line(total_budget: float, g2g_model: FittedSurrogate,
                f2e_model: FittedSurrogate, x2_grid, x1_max: float,
                ) -> list[tuple[float, float]]:
    """Locus of (x1, x2) whose combined program cost equals the budget.

    Solves B_G2G(x1) + B_F2E(x1, x2) = budget per grid point by bracketed
    bisection on [0, x1_max]; points without a sign change are omitted, and
    every returned point satisfies the equation to 1e-6 relative.
    """
    if total_budget <= 0:
        raise DomainError("total_budget must be positive")
    curve = []
    for x2 in np.asarray(x2_grid, dtype=float):
        def f(x1, _x2=float(x2)):
            return (eval_surrogate(g2g_model, x1, 0.0)
                    + eval_surrogate(f2e_model, x1, _x2) - total_budget)

        lo, hi = f(0.0), f(x1_max)
        if lo == 0.0:
            root = 0.0
        elif hi == 0.0:
            root = x1_max
        elif (lo < 0) == (hi < 0):
            continue
        else:
            root = brentq(f, 0.0, x1_max, xtol=1e-10, rtol=1e-14)
        if abs(f(root)) <= 1e-6 * abs(total_budget):
            curve.append((float(root), float(x2)))
    return curve


def _poly_in_x1(model: FittedSurrogate, level: float, x2: float) -> np.ndarray:
    """Coefficients (highest degree first) of the form minus `level` as a
    polynomial in u1 = x1/x1_scale at fixed x2."""
    c = model.coefficients
    u2 = x2 / model.x2_scale
    form = SurrogateForm(model.form)
    if form is SurrogateForm.HABITAT_CUBIC:
        b0, b1, b2, b3, b4, b5, b6, b7, b8, b9 = c
        return np.array([
            b6,
            b3 + b7 * u2,
            b1 + b4 * u2 + b8 * u2 ** 2,
            b0 + b2 * u2 + b5 * u2 ** 2 + b9 * u2 ** 3 - level,
        ])
    if form is SurrogateForm.ECON_QUADRATIC:
        b0, b1, b2, b3, b4, b5 = c
        return np.array([
            b3,
            b1 + b4 * u2,
            b0 + b2 * u2 + b5 * u2 ** 2 - level,
        ])
    raise DomainError(f"indifference curves are defined for polynomial forms, not {form}")


def indifference_curve(model: FittedSurrogate, level: float, x2_grid,
                       x1_max: float) -> list[tuple[float, float]]:
    """Level set of a fitted outcome surface over the direct-benefit plane.

    All real roots in [0, x1_max] are retained (branches included); each point
    plugs back to within 1e-6 * max(1, |level|).
    """
    tol = 1e-6 * max(1.0, abs(level))
    curve = []
    for x2 in np.asarray(x2_grid, dtype=float):
        poly = _poly_in_x1(model, level, float(x2))
        lead = np.flatnonzero(np.abs(poly[:-1]) > 0)
        if len(lead) == 0:
            continue  # no x1 dependence at this x2
        roots = np.roots(poly[lead[0]:])
        for root in roots:
            if abs(root.imag) > 1e-9:
                continue
            x1 = float(root.real) * model.x1_scale
            if not 0.0 <= x1 <= x1_max:
                continue
            if abs(eval_surrogate(model, x1, float(x2)) - level) <= tol:
                curve.append((x1, float(x2)))
    return curve


# ---------------------------------------------------------------------------
# Posterior selection


@dataclass
class PosteriorQuery:
    budget_cap: float
    min_reverted_area_mu: float
    weight_carbon: float
    weight_habitat: float
    weight_economy: float

    def validate(self) -> None:
        if not self.budget_cap > 0:
            raise DomainError("budget_cap must be positive")
        if self.min_reverted_area_mu < 0:
            raise DomainError("min_reverted_area_mu must be non-negative")
        weights = (self.weight_carbon, self.weight_habitat, self.weight_economy)
        if min(weights) < 0 or abs(sum(weights) - 1.0) > 1e-9:
            raise DomainError("preference weights must be a simplex point")


@dataclass
class RankedPoint:
    point: ParetoPoint
    score: float
    normalized: dict[str, float] = field(default_factory=dict)


def posterior_select(frontier: list[ParetoPoint],
                     surrogates: dict[str, FittedSurrogate] | None,
                     query: PosteriorQuery) -> list[RankedPoint]:
    """Filter the frontier by budget and target, then rank survivors.

    Survivors satisfy financial_burden <= budget_cap and reverted area >=
    the target. Each objective is min-max normalized over the survivors
    (carbon inverted) and combined by the preference weights; ties break
    toward lower burden, then lexicographic scenario. Surrogates are carried
    for curve overlays only and do not affect feasibility. An empty result
    signals an infeasible query.
    """
    if not frontier:
        raise DomainError("posterior_select requires a non-empty frontier")
    query.validate()
    survivors = [p for p in frontier
                 if p.financial_burden <= query.budget_cap
                 and p.reverted_area_mu >= query.min_reverted_area_mu]
    if not survivors:
        return []
    carbon = np.array([p.objectives.carbon_kg for p in survivors])
    habitat = np.array([p.objectives.habitat_index for p in survivors])
    econ = np.array([p.objectives.gross_economic_benefits for p in survivors])
    g_carbon = _goodness_fraction(carbon, maximize=False)
    g_habitat = _goodness_fraction(habitat, maximize=True)
    g_econ = _goodness_fraction(econ, maximize=True)
    ranked = []
    for i, p in enumerate(survivors):
        score = (query.weight_carbon * g_carbon[i]
                 + query.weight_habitat * g_habitat[i]
                 + query.weight_economy * g_econ[i])
        ranked.append(RankedPoint(point=p, score=float(score), normalized={
            "carbon": float(g_carbon[i]),
            "habitat": float(g_habitat[i]),
            "economy": float(g_econ[i]),
        }))
    ranked.sort(key=lambda r: (
        -r.score, r.point.financial_burden,
        r.point.scenario.g2g_compensation, r.point.scenario.f2e_price,
    ))
    return ranked
