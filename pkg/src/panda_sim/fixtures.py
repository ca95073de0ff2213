"""Deterministic reference fixtures for the posterior-selection pipeline.

The 18-scenario reference frontier encodes a published quartile-label table as
synthetic objective values: each label maps to its bin midpoint on a [0, 1]
goodness axis, with a -0.001 * row-index drift on the carbon and habitat axes
and +0.001 * row-index on the economy axis. The drift keeps all 18 points
mutually non-dominated (bin midpoints alone create dominated duplicates) while
every value stays inside its label's bin, so recomputing the quartile labels
reproduces the source table exactly - the label table is its own oracle.

Direct benefits use documented affine maps of the scenario:
    reverted_area_mu = 1600 + 1.5 * g2g_compensation
    electricity_kwh  = 2e6 + 6e6 * (0.65 - f2e_price)
    financial_burden = g2g * area + (0.65 - price) * electricity
Under the reference query (budget 5e6, area >= 2500, weights 0.4/0.4/0.2) the
feasible set is {(900, 0.35), (600, 0.25)} with (900, 0.35) ranked first.
"""

from __future__ import annotations

from .analysis import ObjectiveTriple, ParetoPoint, PosteriorQuery
from .config import STANDARD_ELECTRICITY_PRICE
from .policy import PolicyScenario, scenario_grid

# (f2e_price, g2g_compensation, economy, carbon, habitat)
REFERENCE_LABEL_TABLE = [
    (0.35, 900, "--", "++", "+"),
    (0.25, 600, "--", "++", "-"),
    (0.20, 1800, "--", "++", "++"),
    (0.55, 400, "-", "++", "--"),
    (0.55, 1700, "-", "+", "++"),
    (0.25, 1700, "-", "++", "++"),
    (0.60, 1800, "-", "++", "+"),
    (0.65, 2000, "+", "++", "--"),
    (0.55, 1800, "+", "++", "+"),
    (0.65, 1900, "+", "+", "++"),
    (0.55, 100, "+", "+", "--"),
    (0.40, 1900, "+", "+", "++"),
    (0.55, 200, "+", "+", "--"),
    (0.35, 2000, "+", "-", "++"),
    (0.20, 0, "++", "+", "--"),
    (0.35, 0, "++", "+", "--"),
    (0.35, 100, "++", "--", "--"),
    (0.65, 0, "++", "--", "--"),
]

_BIN_MID = {"--": 0.125, "-": 0.375, "+": 0.625, "++": 0.875}
_DRIFT = 0.001


def fixture_direct_benefits(scenario: PolicyScenario) -> tuple[float, float, float]:
    """(reverted_area_mu, electricity_kwh, financial_burden) for a scenario."""
    area = 1600.0 + 1.5 * scenario.g2g_compensation
    gap = STANDARD_ELECTRICITY_PRICE - scenario.f2e_price
    electricity = 2e6 + 6e6 * gap
    burden = scenario.g2g_compensation * area + gap * electricity
    return area, electricity, burden


def _objectives(econ_g: float, carbon_g: float, habitat_g: float) -> ObjectiveTriple:
    """Map goodness fractions to plausible raw units (affine, sense-preserving)."""
    return ObjectiveTriple(
        carbon_kg=1e6 + 5e6 * (1.0 - carbon_g),
        habitat_index=2000.0 + 1000.0 * habitat_g,
        gross_economic_benefits=-5e6 + 2e7 * econ_g,
    )


def reference_frontier() -> list[ParetoPoint]:
    """The 18-point fixture frontier (pairwise non-dominated by construction)."""
    points = []
    for i, (price, comp, econ, carbon, habitat) in enumerate(REFERENCE_LABEL_TABLE):
        sc = PolicyScenario(float(comp), price)
        econ_g = _BIN_MID[econ] + _DRIFT * i
        carbon_g = _BIN_MID[carbon] - _DRIFT * i
        habitat_g = _BIN_MID[habitat] - _DRIFT * i
        area, electricity, burden = fixture_direct_benefits(sc)
        points.append(ParetoPoint(
            scenario=sc,
            objectives=_objectives(econ_g, carbon_g, habitat_g),
            reverted_area_mu=area,
            electricity_kwh=electricity,
            financial_burden=burden,
        ))
    return points


def reference_query() -> PosteriorQuery:
    """Budget 5 million CNY, at least 2,500 Mu reverted, habitat/carbon-leaning."""
    return PosteriorQuery(
        budget_cap=5e6, min_reverted_area_mu=2500.0,
        weight_carbon=0.4, weight_habitat=0.4, weight_economy=0.2,
    )


def reference_point_set() -> list[ParetoPoint]:
    """All 273 lattice scenarios with exactly the 18 reference points
    non-dominated: every other scenario is strictly worse than one of them."""
    frontier = reference_frontier()
    frontier_keys = {p.scenario for p in frontier}
    points = list(frontier)
    filler_index = 0
    for sc in scenario_grid():
        if sc in frontier_keys:
            continue
        anchor = frontier[filler_index % len(frontier)]
        step = 1.0 + (filler_index % 7)
        area, electricity, burden = fixture_direct_benefits(sc)
        points.append(ParetoPoint(
            scenario=sc,
            objectives=ObjectiveTriple(
                carbon_kg=anchor.objectives.carbon_kg + 2e4 * step,
                habitat_index=anchor.objectives.habitat_index - 10.0 * step,
                gross_economic_benefits=(
                    anchor.objectives.gross_economic_benefits - 1e5 * step),
            ),
            reverted_area_mu=area,
            electricity_kwh=electricity,
            financial_burden=burden,
        ))
        filler_index += 1
    return points
