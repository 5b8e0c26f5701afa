"""Travel scenarios: data model, validity checks, canonical fixtures,
seeded random generation, and CSV/JSON round-trips.

A scenario is the reduced form of one ride offer against one certain
alternative: the alternative's utility u0, the non-price utility components
of the worst and best ride outcomes, the (negative) tariff coefficient, and
the tariff box.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass

from cpt_sense.errors import GenerationError, InvalidScenarioError

#: Column order for scenario CSV files.
CSV_COLUMNS = ("label", "u0", "b_sm", "gamma_min", "gamma_max", "x_low", "x_high")


@dataclass(frozen=True)
class TravelScenario:
    """One pricing problem instance.

    Construction performs no validity checks beyond types; use ``validate``
    (report style) or ``require_valid`` (raising) before solving.
    """

    label: str
    u0: float
    x_low: float
    x_high: float
    b_sm: float
    gamma_min: float
    gamma_max: float

    @property
    def gamma_span(self) -> float:
        return self.gamma_max - self.gamma_min


def validate(scenario: TravelScenario) -> list[str]:
    """Every violated validity condition, not just the first; empty if ok.

    Choice-set validity is checked at the tariff box endpoints only: both
    ride utilities fall with the tariff, so the worst outcome is weakest at
    gamma_min and the best outcome weakest at gamma_max, and endpoint checks
    imply validity across the whole box.
    """
    problems: list[str] = []
    fields = {
        "u0": scenario.u0, "x_low": scenario.x_low, "x_high": scenario.x_high,
        "b_sm": scenario.b_sm, "gamma_min": scenario.gamma_min,
        "gamma_max": scenario.gamma_max,
    }
    for name, v in fields.items():
        if not math.isfinite(v):
            problems.append("%s is not finite" % name)
    if problems:
        return problems

    if not scenario.b_sm < 0.0:
        problems.append("tariff coefficient b_sm must be negative")
    if not scenario.gamma_min < scenario.gamma_max:
        problems.append("empty tariff interval (gamma_min >= gamma_max)")
    if not scenario.x_low <= scenario.x_high:
        problems.append("x_low exceeds x_high")
    if scenario.x_low + scenario.b_sm * scenario.gamma_min > scenario.u0:
        problems.append(
            "smods dominates: worst ride outcome beats the alternative "
            "even at gamma_min")
    if scenario.u0 > scenario.x_high + scenario.b_sm * scenario.gamma_max:
        problems.append(
            "alternative dominates: u0 exceeds the best ride outcome at "
            "gamma_max")
    return problems


def is_valid(scenario: TravelScenario) -> bool:
    return not validate(scenario)


def require_valid(scenario: TravelScenario) -> TravelScenario:
    problems = validate(scenario)
    if problems:
        raise InvalidScenarioError(
            "scenario %r invalid: %s" % (scenario.label, "; ".join(problems)))
    return scenario


def utilities_at(scenario: TravelScenario, gamma: float) -> tuple[float, float, float]:
    """(u_low, u_high, u0) at tariff ``gamma``.

    Both ride utilities are affine in gamma with slope b_sm, so their spread
    is tariff-independent.
    """
    u_low = scenario.x_low + scenario.b_sm * gamma
    u_high = scenario.x_high + scenario.b_sm * gamma
    return u_low, u_high, scenario.u0


def fixtures() -> tuple[TravelScenario, ...]:
    """The five canonical benchmark scenarios S1..S5."""
    return (
        TravelScenario("S1", u0=8.17, x_low=2.46, x_high=15.45, b_sm=-0.14,
                       gamma_min=4.66, gamma_max=8.41),
        TravelScenario("S2", u0=-7.62, x_low=-8.67, x_high=-5.15, b_sm=-0.08,
                       gamma_min=2.04, gamma_max=19.26),
        TravelScenario("S3", u0=-2.54, x_low=0.32, x_high=10.98, b_sm=-0.72,
                       gamma_min=4.12, gamma_max=12.99),
        TravelScenario("S4", u0=9.51, x_low=1.06, x_high=24.36, b_sm=-0.40,
                       gamma_min=1.11, gamma_max=13.49),
        TravelScenario("S5", u0=9.55, x_low=4.41, x_high=12.92, b_sm=-0.04,
                       gamma_min=4.24, gamma_max=7.92),
    )


@dataclass(frozen=True)
class GeneratorRanges:
    """Uniform sampling intervals for random scenarios.

    The defaults bracket the canonical fixtures.  The spread and span
    intervals keep prospects and tariff boxes non-degenerate; the b_sm
    interval must stay strictly negative.
    """

    u0: tuple[float, float] = (-10.0, 10.0)
    x_low: tuple[float, float] = (-10.0, 5.0)
    spread: tuple[float, float] = (1.0, 20.0)        # x_high - x_low
    b_sm: tuple[float, float] = (-0.8, -0.02)
    gamma_min: tuple[float, float] = (1.0, 5.0)
    gamma_span: tuple[float, float] = (2.0, 16.0)    # gamma_max - gamma_min

    def __post_init__(self):
        for name in ("u0", "x_low", "spread", "b_sm", "gamma_min", "gamma_span"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValueError("range %s=%r is not a finite interval" % (name, (lo, hi)))
        if self.b_sm[1] >= 0.0:
            raise ValueError("b_sm range must be strictly negative")


def generate_random(ranges: GeneratorRanges | None = None, count: int = 100,
                    seed: int = 0) -> list[TravelScenario]:
    """Rejection-sample ``count`` valid scenarios, deterministically per seed.

    Labels run R0001, R0002, ...  Fails with a diagnostic when the
    acceptance rate stays below 0.1% across a million draws, which signals
    misconfigured ranges.
    """
    if count < 1:
        raise ValueError("count must be >= 1, got %r" % count)
    ranges = ranges or GeneratorRanges()
    rng = random.Random(seed)
    out: list[TravelScenario] = []
    draws = 0
    while len(out) < count:
        draws += 1
        if draws >= 1_000_000 and len(out) / draws < 0.001:
            raise GenerationError(
                "acceptance rate %.4f%% after %d draws; generator ranges "
                "almost never produce a valid choice set"
                % (100.0 * len(out) / draws, draws))
        u0 = rng.uniform(*ranges.u0)
        x_low = rng.uniform(*ranges.x_low)
        x_high = x_low + rng.uniform(*ranges.spread)
        b_sm = rng.uniform(*ranges.b_sm)
        g_min = rng.uniform(*ranges.gamma_min)
        g_max = g_min + rng.uniform(*ranges.gamma_span)
        candidate = TravelScenario(label="R%04d" % (len(out) + 1), u0=u0,
                                   x_low=x_low, x_high=x_high, b_sm=b_sm,
                                   gamma_min=g_min, gamma_max=g_max)
        if is_valid(candidate):
            out.append(candidate)
    return out


def _fmt(x: float) -> str:
    return format(x, ".12g")


def scenarios_to_csv(scenarios: list[TravelScenario] | tuple[TravelScenario, ...]) -> str:
    """Render scenarios as CSV text (header row, '.' decimal separator)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for s in scenarios:
        writer.writerow([s.label, _fmt(s.u0), _fmt(s.b_sm), _fmt(s.gamma_min),
                         _fmt(s.gamma_max), _fmt(s.x_low), _fmt(s.x_high)])
    return buf.getvalue()


def scenarios_from_csv(text: str) -> list[TravelScenario]:
    reader = csv.DictReader(io.StringIO(text))
    missing = set(CSV_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError("scenario CSV missing columns: %s" % sorted(missing))
    return [
        TravelScenario(label=row["label"], u0=float(row["u0"]),
                       b_sm=float(row["b_sm"]), gamma_min=float(row["gamma_min"]),
                       gamma_max=float(row["gamma_max"]), x_low=float(row["x_low"]),
                       x_high=float(row["x_high"]))
        for row in reader
    ]


def scenarios_to_json(scenarios: list[TravelScenario] | tuple[TravelScenario, ...]) -> str:
    """JSON mirror of the CSV schema, identical field names."""
    rows = [
        {"label": s.label, "u0": s.u0, "b_sm": s.b_sm,
         "gamma_min": s.gamma_min, "gamma_max": s.gamma_max,
         "x_low": s.x_low, "x_high": s.x_high}
        for s in scenarios
    ]
    return json.dumps(rows, indent=2) + "\n"


def scenarios_from_json(text: str) -> list[TravelScenario]:
    return [TravelScenario(**row) for row in json.loads(text)]
