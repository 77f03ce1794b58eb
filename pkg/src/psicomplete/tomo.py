"""Finite-sample tomography: sample outcome counts, invert the frequencies
with the exact closed-form inverters, and tabulate how the infidelity falls
with the number of shots.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .analysis import derive_seed
from .constructions import (
    RankOneConstructionParams,
    TwoDConstructionParams,
    build_psic_2d,
    build_rank_one_3dm2,
    build_tetrahedral,
)
from .errors import DimensionMismatch, InvalidParameter
from .objects import OutcomeDistribution, Povm, PureState, fidelity, probabilities, random_pure_state
from .reconstruction import (
    ReconstructionReport,
    invert_psic_2d,
    invert_rank_one_3dm2,
    premeasure_basis_choice,
    relabel_state,
)

SWEEP_COLUMNS = ("shots", "median_infidelity", "iqr_low", "iqr_high", "failures")


@dataclass(frozen=True)
class Scheme:
    """A POVM paired with the inverter that undoes it."""

    family: str
    povm: Povm
    invert: Callable[[OutcomeDistribution], ReconstructionReport] = field(repr=False)
    params: object = None


@lru_cache(maxsize=64)
def make_scheme(family: str, dim: int = 2, a: float | None = None, b: float | None = None,
                theta: float | None = None) -> Scheme:
    """Look up a family that has a closed-form inverter.

    ``tetrahedral`` reuses the rank-one inverter, since the tetrahedral POVM
    is the two-dimensional case of that construction.
    """
    if family == "psic2d":
        params = TwoDConstructionParams(dim, a, b)
        return Scheme(family, build_psic_2d(params), lambda p: invert_psic_2d(p, params), params)
    if family == "rank1-3dm2":
        kwargs = {} if theta is None else {"theta": theta}
        params = RankOneConstructionParams(dim, a=a, b=b, **kwargs)
        return Scheme(family, build_rank_one_3dm2(params), lambda p: invert_rank_one_3dm2(p, params), params)
    if family == "tetrahedral":
        if dim != 2:
            raise InvalidParameter("the tetrahedral POVM is a qubit measurement (dim=2)")
        params = RankOneConstructionParams(2)
        povm = build_tetrahedral()
        twin = build_rank_one_3dm2(params)

        def invert(p: OutcomeDistribution) -> ReconstructionReport:
            return invert_rank_one_3dm2(
                OutcomeDistribution(p.values, p.normalized_state, twin.labels), params
            )

        return Scheme(family, povm, invert, params)
    raise InvalidParameter(f"family {family!r} has no closed-form inverter")


def sample_counts(povm: Povm, state: PureState, shots: int, seed) -> np.ndarray:
    """Multinomial outcome counts by inverse-CDF lookup of uniform draws.

    The uniforms come from a PCG64 stream seeded with ``seed``, so the
    counts are reproducible bit for bit.
    """
    if state.dim != povm.dim:
        raise DimensionMismatch(f"state dim {state.dim} does not match POVM dim {povm.dim}")
    if shots < 0:
        raise InvalidParameter("shots must be non-negative")
    p = probabilities(povm, state.normalize()).values
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    cdf[-1] = 1.0
    rng = np.random.Generator(np.random.PCG64(seed))
    counts = np.zeros(len(povm), dtype=np.int64)
    chunk = 1 << 20
    remaining = shots
    while remaining > 0:
        n = min(chunk, remaining)
        hits = np.searchsorted(cdf, rng.random(n), side="right")
        counts += np.bincount(hits, minlength=len(povm))
        remaining -= n
    return counts


@dataclass(frozen=True, eq=False)
class TomographyRun:
    povm_id: str
    true_state: PureState
    shots: int
    counts: np.ndarray
    estimate: ReconstructionReport
    infidelity: float
    seed: int | tuple[int, ...]
    anchor: int = 0

    @property
    def failed(self) -> bool:
        return self.estimate.failure is not None


def run_tomography(
    scheme: Scheme,
    state: PureState,
    shots: int,
    seed,
    *,
    exact: bool = False,
    premeasure_shots: int = 0,
) -> TomographyRun:
    """Sample, invert, and score one tomographic run.

    With ``premeasure_shots > 0`` a computational-basis measurement on that
    many copies picks the most populated basis state, which is then swapped
    into the anchor slot ``|0>`` before the main measurement.  ``exact``
    replaces frequencies by the exact probabilities.  Inversion failures are
    recorded in the returned run (infidelity 1), never raised.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    sample_seed, pre_seed = ss.spawn(2)
    anchor = 0
    if premeasure_shots > 0:
        basis = np.abs(state.normalize().amplitudes) ** 2
        cdf = np.cumsum(basis)
        cdf[-1] = 1.0
        u = np.random.Generator(np.random.PCG64(pre_seed)).random(premeasure_shots)
        freqs = np.bincount(np.searchsorted(cdf, u, side="right"), minlength=state.dim)
        anchor = premeasure_basis_choice(freqs / premeasure_shots)
    # measuring the relabeled POVM on psi is measuring the original on the swapped state
    working = relabel_state(state, anchor) if anchor else state
    povm = scheme.povm
    if exact:
        counts = np.zeros(len(povm), dtype=np.int64)
        dist = probabilities(povm, working.normalize())
    else:
        counts = sample_counts(povm, working, shots, sample_seed)
        dist = OutcomeDistribution(counts / max(shots, 1), normalized_state=shots > 0, labels=povm.labels)
    report = scheme.invert(dist)
    if report.state is None:
        infid = 1.0
    else:
        recovered = relabel_state(report.state, anchor) if anchor else report.state
        report = type(report)(recovered, report.residual, report.failure, report.chain_norms)
        infid = float(np.clip(1.0 - fidelity(state, recovered), 0.0, 1.0))
    seed_id = ss.entropy if isinstance(ss.entropy, int) else tuple(ss.entropy)
    return TomographyRun(scheme.family, state, shots, counts, report, infid, seed_id, anchor)


@dataclass(frozen=True)
class SweepRow:
    shots: int
    median_infidelity: float
    iqr_low: float
    iqr_high: float
    failures: int


def efficiency_sweep(
    scheme: Scheme,
    shot_grid: Sequence[int],
    seeds: Iterable[int],
    *,
    premeasure_shots: int = 0,
) -> list[SweepRow]:
    """Median and interquartile range of the infidelity at each shot count.

    Seed ``s`` fixes the true state (the same one at every shot count and for
    every scheme) and, together with the shot count, the sampling stream.
    """
    grid = list(shot_grid)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParameter("shot grid must be strictly ascending")
    seeds = list(seeds)
    if not seeds:
        return []
    dim = scheme.povm.dim
    states = {s: random_pure_state(dim, derive_seed(s, 0)) for s in seeds}
    rows = []
    for shots in grid:
        infids = []
        failures = 0
        for s in seeds:
            run = run_tomography(
                scheme, states[s], shots, np.random.SeedSequence([s, 1, shots]),
                premeasure_shots=premeasure_shots,
            )
            failures += run.failed
            infids.append(run.infidelity)
        q25, q50, q75 = np.percentile(infids, [25, 50, 75])
        rows.append(SweepRow(shots, float(q50), float(q25), float(q75), failures))
    return rows


def sweep_to_csv(rows: Sequence[SweepRow], metadata: dict | None = None) -> str:
    """CSV text with ``# key: value`` metadata lines ahead of the header."""
    buf = io.StringIO()
    for key, value in (metadata or {}).items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        writer.writerow([r.shots, repr(r.median_infidelity), repr(r.iqr_low), repr(r.iqr_high), r.failures])
    return buf.getvalue()


def read_sweep_csv(text: str) -> list[SweepRow]:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.DictReader(lines)
    return [
        SweepRow(int(r["shots"]), float(r["median_infidelity"]), float(r["iqr_low"]),
                 float(r["iqr_high"]), int(r["failures"]))
        for r in reader
    ]
