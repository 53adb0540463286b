"""Winner-selection mechanisms for forecasting competitions.

All mechanisms map a report matrix R (n forecasters x m events) and an
outcome vector y to either a selection distribution over forecasters or a
sampled winner.  Stochastic selections take an explicit integer seed and
return a :class:`WinnerDraw` carrying the seed and the number of uniform
draws consumed, so every selection replays bit-for-bit.  Parallel callers
must pass independent seeds; nothing here touches global RNG state.

Mechanisms:

- Simple Max: argmax of total quadratic score, uniform tie-breaking.
- Event lotteries (ELF): one point per event awarded by a wagering-style
  lottery, winner is the point leader.
- Generalized point-per-round: same tally structure with any bounded proper
  scoring rule whose range fits in an interval of length 1/n.
- FTRL: selection distribution equals the conjugate gradient of a strictly
  convex regularizer at the scaled score totals.
- Multiplicative Weights: FTRL with negative entropy; the distribution is a
  softmax of the scaled totals, implemented here directly as a closed form.
- Report Noisy Max: add independent Laplace noise to the totals and take
  the argmax.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from forecastcomp.regularizers import NEG_ENTROPY, Regularizer
from forecastcomp.scoring import as_outcomes, as_probabilities, score_matrix

__all__ = [
    "RngTrace",
    "WinnerDraw",
    "SimpleMax",
    "Elf",
    "PointPerRound",
    "Ftrl",
    "MultWeights",
    "ReportNoisyMax",
    "MechanismConfig",
    "simple_max_select",
    "elf_point_prob",
    "elf_sample_points",
    "elf_select",
    "elf_winner_law",
    "point_per_round_point_prob",
    "point_per_round_select",
    "ftrl_select",
    "mw_select",
    "report_noisy_max_select",
    "noisy_max_win_prob",
    "noisy_max_law",
    "laplace_cdf",
    "laplace_from_uniform",
    "sample_laplace",
    "sample_winner",
    "selection_law",
    "mc_winner_law",
    "select",
]

DISTRIBUTION_TOL = 1e-10
DEFAULT_ENUMERATION_BUDGET = 2**20


@dataclass(frozen=True)
class RngTrace:
    """Seed and draw count of one stochastic selection, for exact replay."""

    seed: int
    draws: int


@dataclass(frozen=True)
class WinnerDraw:
    """A sampled winner plus the selection law it was drawn from.

    ``distribution`` is the conditional law of the winner given everything
    realized before the final sampling step: for Simple Max that is the
    uniform law on the argmax set given (R, y); for event-lottery mechanisms
    it is the tie-break law given the realized point tallies (the exact
    unconditional winner law is available from :func:`elf_winner_law`); for
    Report Noisy Max it is the point mass given the realized noise.
    """

    winner: int
    distribution: np.ndarray
    rng_trace: RngTrace

    def __post_init__(self) -> None:
        dist = np.asarray(self.distribution, dtype=float)
        if dist.min() < -DISTRIBUTION_TOL or abs(dist.sum() - 1.0) > DISTRIBUTION_TOL:
            raise ValueError("distribution must be a point in the simplex")
        if not 0 <= self.winner < dist.size:
            raise ValueError(f"winner index {self.winner} out of range for n={dist.size}")

    def to_record(self) -> dict:
        return {
            "winner": int(self.winner),
            "distribution": [float(v) for v in self.distribution],
            "seed": int(self.rng_trace.seed),
            "draws": int(self.rng_trace.draws),
        }


# ---------------------------------------------------------------------------
# Mechanism configurations
# ---------------------------------------------------------------------------

def _warn_if_eta_outside_truthful_range(eta: float, reg: Regularizer) -> None:
    if reg.declared is None:
        return
    limit = min(reg.declared.alpha / 2.0, 1.0 / reg.declared.beta)
    if eta >= limit:
        warnings.warn(
            f"eta={eta} is outside the approximate-truthfulness range "
            f"eta < min(alpha/2, 1/beta) = {limit} for {reg.name}",
            stacklevel=3,
        )


@dataclass(frozen=True)
class SimpleMax:
    """Select the forecaster with the highest total quadratic score."""


@dataclass(frozen=True)
class Elf:
    """One point per event via the wagering lottery; winner is the leader."""


@dataclass(frozen=True)
class PointPerRound:
    """Point-per-event mechanism driven by a bounded proper scoring rule.

    ``g(r, y)`` must take values in an interval whose length is at most 1/n;
    this is validated by sampling at call time, and any per-event probability
    escaping [0, 1] is a hard error with a witness.
    """

    g: Callable[[float, int], float]
    range_length: float

    def __post_init__(self) -> None:
        if not self.range_length > 0.0:
            raise ValueError(f"range_length must be positive, got {self.range_length}")


@dataclass(frozen=True)
class Ftrl:
    """Distribution-valued selection: gradient of the conjugate at eta * totals."""

    regularizer: Regularizer
    eta: float

    def __post_init__(self) -> None:
        if not self.eta > 0.0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        _warn_if_eta_outside_truthful_range(self.eta, self.regularizer)


@dataclass(frozen=True)
class MultWeights:
    """Softmax of eta-scaled total quadratic scores."""

    eta: float

    def __post_init__(self) -> None:
        if not self.eta > 0.0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        _warn_if_eta_outside_truthful_range(self.eta, NEG_ENTROPY)


@dataclass(frozen=True)
class ReportNoisyMax:
    """Argmax of Laplace-perturbed totals; the scale b must be at least 4."""

    b: float

    def __post_init__(self) -> None:
        if not self.b >= 4.0:
            raise ValueError(f"ReportNoisyMax requires b >= 4, got {self.b}")


MechanismConfig = Union[SimpleMax, Elf, PointPerRound, Ftrl, MultWeights, ReportNoisyMax]


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------

def _validate_reports(reports) -> np.ndarray:
    r = np.asarray(reports, dtype=float)
    if r.ndim != 2:
        raise ValueError(f"reports must be a 2-D (n, m) matrix, got shape {r.shape}")
    if r.shape[1] > 0:
        as_probabilities(r, "reports")
    return r


def score_totals(reports, outcomes) -> np.ndarray:
    """Total quadratic score per forecaster; zero vector when there are no events."""
    r = _validate_reports(reports)
    if r.shape[1] == 0:
        return np.zeros(r.shape[0])
    y = as_outcomes(outcomes)
    if y.shape[0] != r.shape[1]:
        raise ValueError(f"shape mismatch: reports {r.shape} vs outcomes {y.shape}")
    return score_matrix(r, y).sum(axis=1)


def _categorical_draw(probs: np.ndarray, u: float) -> int:
    cum = np.cumsum(probs)
    return int(min(np.searchsorted(cum, u * cum[-1], side="right"), probs.size - 1))


def sample_winner(distribution, seed: int) -> WinnerDraw:
    """Sample a winner from an explicit selection distribution."""
    dist = np.asarray(distribution, dtype=float)
    rng = np.random.default_rng(seed)
    winner = _categorical_draw(dist, float(rng.random()))
    return WinnerDraw(winner=winner, distribution=dist, rng_trace=RngTrace(seed, 1))


# ---------------------------------------------------------------------------
# Simple Max
# ---------------------------------------------------------------------------

def _argmax_tie_law(totals: np.ndarray) -> np.ndarray:
    ties = totals == totals.max()
    return ties / ties.sum()


def simple_max_select(reports, outcomes, seed: int) -> WinnerDraw:
    """Pick the forecaster with the highest cumulative quadratic score.

    Ties are broken uniformly at random; the returned distribution is the
    exact winner law (point mass, or uniform over the argmax set).
    """
    totals = score_totals(reports, outcomes)
    law = _argmax_tie_law(totals)
    ties = np.flatnonzero(law)
    if ties.size == 1:
        return WinnerDraw(int(ties[0]), law, RngTrace(seed, 0))
    rng = np.random.default_rng(seed)
    winner = int(ties[_categorical_draw(np.ones(ties.size), float(rng.random()))])
    return WinnerDraw(winner, law, RngTrace(seed, 1))


# ---------------------------------------------------------------------------
# Event-lottery mechanisms
# ---------------------------------------------------------------------------

def elf_point_prob(reports, y_t: int, t: int) -> np.ndarray:
    """Lottery probabilities for the point on event ``t``.

    Forecaster i receives the point with probability
    1/n + (1/n) * (S(r_it, y_t) - mean of the other forecasters' scores).
    Entries lie in [0, 2/n] and sum to 1.
    """
    r = _validate_reports(reports)
    n = r.shape[0]
    if n < 2:
        raise ValueError(f"event lotteries need n >= 2 forecasters, got {n}")
    if y_t not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {y_t}")
    s = 1.0 - (y_t - r[:, t]) ** 2
    total = s.sum()
    mean_others = (total - s) / (n - 1)
    return (1.0 + s - mean_others) / n


def point_per_round_point_prob(reports, y_t: int, t: int, g: Callable[[float, int], float]) -> np.ndarray:
    """Per-event point probabilities for a generalized scoring rule ``g``.

    f_it = 1/n + g(r_it, y_t) - mean over j != i of g(r_jt, y_t).  A result
    outside [0, 1] is a hard error carrying the offending entry.
    """
    r = _validate_reports(reports)
    n = r.shape[0]
    if n < 2:
        raise ValueError(f"event lotteries need n >= 2 forecasters, got {n}")
    gs = np.array([g(float(r[i, t]), y_t) for i in range(n)])
    mean_others = (gs.sum() - gs) / (n - 1)
    f = 1.0 / n + gs - mean_others
    if f.min() < -1e-12 or f.max() > 1.0 + 1e-12:
        bad = int(np.argmax(np.abs(f - 0.5)))
        raise ValueError(
            f"scoring rule g violates its range budget: event {t}, outcome {y_t}, "
            f"forecaster {bad} gets point probability {f[bad]}"
        )
    return np.clip(f, 0.0, 1.0)


def _validate_g_range(g: Callable[[float, int], float], n: int, declared_length: float) -> None:
    if declared_length > 1.0 / n + 1e-12:
        raise ValueError(
            f"declared range length {declared_length} exceeds 1/n = {1.0 / n} for n={n}"
        )
    grid = np.linspace(0.0, 1.0, 101)
    vals = [g(float(r), y) for r in grid for y in (0, 1)]
    observed = max(vals) - min(vals)
    if observed > 1.0 / n + 1e-9:
        raise ValueError(
            f"sampled range of g has length {observed}, exceeding 1/n = {1.0 / n} for n={n}"
        )


def _tally_points(point_probs: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    m, n = point_probs.shape
    cum = np.cumsum(point_probs, axis=1)
    us = rng.random(m) * cum[:, -1]
    idx = np.minimum(np.sum(cum <= us[:, None], axis=1), n - 1)
    return np.bincount(idx, minlength=n), m


def _point_probs_matrix(reports, outcomes, prob_fn) -> np.ndarray:
    r = _validate_reports(reports)
    y = as_outcomes(outcomes)
    if y.shape[0] != r.shape[1]:
        raise ValueError(f"shape mismatch: reports {r.shape} vs outcomes {y.shape}")
    return np.stack([prob_fn(r, int(y[t]), t) for t in range(r.shape[1])])


def _elf_point_probs_all(reports, outcomes) -> np.ndarray:
    """(m, n) lottery probabilities for every event at once."""
    r = _validate_reports(reports)
    n = r.shape[0]
    if n < 2:
        raise ValueError(f"event lotteries need n >= 2 forecasters, got {n}")
    s = score_matrix(r, outcomes)
    mean_others = (s.sum(axis=0) - s) / (n - 1)
    return ((1.0 + s - mean_others) / n).T


def elf_sample_points(reports, outcomes, seed: int) -> np.ndarray:
    """Sample the per-forecaster point tallies of one ELF run."""
    probs = _elf_point_probs_all(reports, outcomes)
    points, _ = _tally_points(probs, np.random.default_rng(seed))
    return points


def _tally_and_argmax_select(probs: np.ndarray, seed: int) -> WinnerDraw:
    rng = np.random.default_rng(seed)
    points, draws = _tally_points(probs, rng)
    law = _argmax_tie_law(points.astype(float))
    ties = np.flatnonzero(law)
    if ties.size == 1:
        return WinnerDraw(int(ties[0]), law, RngTrace(seed, draws))
    winner = int(ties[_categorical_draw(np.ones(ties.size), float(rng.random()))])
    return WinnerDraw(winner, law, RngTrace(seed, draws + 1))


def elf_select(reports, outcomes, seed: int) -> WinnerDraw:
    """Run the event lotteries, tally points, and pick the point leader.

    One uniform draw per event plus one more on a tie.  The returned
    distribution is the tie-break law over the realized point argmax; use
    :func:`elf_winner_law` for the exact unconditional winner law.
    """
    probs = _elf_point_probs_all(reports, outcomes)
    return _tally_and_argmax_select(probs, seed)


def point_per_round_select(
    reports, outcomes, g: Callable[[float, int], float], seed: int,
    range_length: float | None = None,
) -> WinnerDraw:
    """Tally-and-argmax selection for a generalized per-event scoring rule."""
    r = _validate_reports(reports)
    if range_length is not None:
        _validate_g_range(g, r.shape[0], range_length)
    probs = _point_probs_matrix(r, outcomes, lambda rr, yy, tt: point_per_round_point_prob(rr, yy, tt, g))
    return _tally_and_argmax_select(probs, seed)


def _tally_dp_law(point_probs: np.ndarray, budget: int) -> np.ndarray:
    """Exact winner law of a tally-and-argmax mechanism by dynamic programming.

    Tracks the joint distribution of the point-tally vector across events.
    The state space has at most C(m + n - 1, n - 1) tallies, far below the
    n^m cost of enumerating point-winner paths.
    """
    m, n = point_probs.shape
    est_states = math.comb(m + n - 1, n - 1)
    est_ops = est_states * n * m
    if est_ops > budget:
        raise ValueError(
            f"exact winner law needs ~{est_ops} operations, over budget {budget}; "
            "use mc_winner_law instead"
        )
    states: dict[tuple[int, ...], float] = {(0,) * n: 1.0}
    for t in range(m):
        row = point_probs[t]
        nxt: dict[tuple[int, ...], float] = {}
        for counts, pr in states.items():
            for i in range(n):
                if row[i] == 0.0:
                    continue
                key = counts[:i] + (counts[i] + 1,) + counts[i + 1:]
                nxt[key] = nxt.get(key, 0.0) + pr * row[i]
        states = nxt
    law = np.zeros(n)
    for counts, pr in states.items():
        best = max(counts)
        ties = [i for i, c in enumerate(counts) if c == best]
        share = pr / len(ties)
        for i in ties:
            law[i] += share
    return law


def elf_winner_law(reports, outcomes, budget: int = DEFAULT_ENUMERATION_BUDGET) -> np.ndarray:
    """Exact winner law of the event-lottery mechanism (budget permitting)."""
    probs = _elf_point_probs_all(reports, outcomes)
    return _tally_dp_law(probs, budget)


def mc_winner_law(config: MechanismConfig, reports, outcomes, trials: int, seed: int) -> tuple[np.ndarray, float]:
    """Monte Carlo winner law with its worst-entry standard error."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    r = _validate_reports(reports)
    counts = np.zeros(r.shape[0])
    for k in range(trials):
        draw = select(config, r, outcomes, seed=_derive_seed(seed, k))
        counts[draw.winner] += 1
    law = counts / trials
    se = float(np.sqrt(np.max(law * (1.0 - law)) / trials))
    return law, se


# ---------------------------------------------------------------------------
# Regularized leaders
# ---------------------------------------------------------------------------

def ftrl_select(reports, outcomes, regularizer: Regularizer, eta: float) -> np.ndarray:
    """Selection distribution of the regularized leader: grad C(eta * totals).

    Deterministic; sample the winner separately with :func:`sample_winner`
    so experiments can work with exact expectations.
    """
    if not eta > 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    totals = score_totals(reports, outcomes)
    return regularizer.conjugate_grad(eta * totals)


def mw_select(reports, outcomes, eta: float) -> np.ndarray:
    """Multiplicative-weights distribution: softmax of eta-scaled totals."""
    if not eta > 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    z = eta * score_totals(reports, outcomes)
    e = np.exp(z - z.max())
    return e / e.sum()


# ---------------------------------------------------------------------------
# Report Noisy Max
# ---------------------------------------------------------------------------

def laplace_from_uniform(u: float, b: float) -> float:
    """Inverse-CDF map from u in (-1/2, 1/2) to a Laplace(0, b) sample."""
    if b <= 0.0:
        raise ValueError(f"scale b must be positive, got {b}")
    return -b * math.copysign(1.0, u) * math.log1p(-2.0 * abs(u)) if u != 0.0 else 0.0


def sample_laplace(rng: np.random.Generator, b: float) -> float:
    """One Laplace(0, b) sample from one uniform draw (exact replay contract)."""
    return laplace_from_uniform(float(rng.random()) - 0.5, b)


def laplace_cdf(x, b: float) -> np.ndarray:
    """CDF of the Laplace(0, b) distribution, vectorized."""
    x = np.asarray(x, dtype=float)
    return np.where(x < 0.0, 0.5 * np.exp(x / b), 1.0 - 0.5 * np.exp(-x / b))


def report_noisy_max_select(reports, outcomes, b: float, seed: int) -> WinnerDraw:
    """Argmax of totals perturbed by independent Laplace(0, b) noise.

    Ties are measure-zero and broken by lowest index.  The returned
    distribution is the point mass on the realized winner.
    """
    if b <= 0.0:
        raise ValueError(f"scale b must be positive, got {b}")
    totals = score_totals(reports, outcomes)
    rng = np.random.default_rng(seed)
    noisy = totals + np.array([sample_laplace(rng, b) for _ in range(totals.size)])
    winner = int(np.argmax(noisy))
    law = np.zeros(totals.size)
    law[winner] = 1.0
    return WinnerDraw(winner, law, RngTrace(seed, totals.size))


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def noisy_max_win_prob(totals, b: float, index: int, order: int = 24) -> float:
    """Exact probability that one forecaster wins under Report Noisy Max.

    P(i wins) = E over i's noise W of prod_{j != i} F(q_i + W - q_j), with F
    the Laplace CDF.  The integrand is piecewise smooth between the CDF kinks
    at q_j - q_i and the density kink at 0, so panel Gauss-Legendre
    quadrature between the kinks is exact to near machine precision.
    """
    if b <= 0.0:
        raise ValueError(f"scale b must be positive, got {b}")
    q = np.asarray(totals, dtype=float)
    n = q.size
    if n == 1:
        return 1.0
    nodes, weights = _gl_nodes(order)
    tail = 40.0 * b
    kinks = np.unique(np.concatenate([[0.0], np.delete(q, index) - q[index]]))
    edges = np.concatenate([[kinks[0] - tail], kinks, [kinks[-1] + tail]])
    # Subdivide wide panels: the density decays on scale b, and one GL panel
    # only resolves a few decay lengths.
    refined = [edges[0]]
    for right in edges[1:]:
        left = refined[-1]
        chunks = max(1, int(math.ceil((right - left) / (4.0 * b))))
        refined.extend(left + (right - left) * (k + 1) / chunks for k in range(chunks))
    edges = np.array(refined)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = mid[:, None] + half[:, None] * nodes[None, :]
    density = np.exp(-np.abs(pts) / b) / (2.0 * b)
    prod = np.ones_like(pts)
    for j in range(n):
        if j == index:
            continue
        prod *= laplace_cdf(q[index] + pts - q[j], b)
    return float(np.sum(half[:, None] * weights[None, :] * density * prod))


def noisy_max_law(totals, b: float, order: int = 24) -> np.ndarray:
    """Exact selection law of Report Noisy Max given score totals."""
    q = np.asarray(totals, dtype=float)
    law = np.array([noisy_max_win_prob(q, b, i, order) for i in range(q.size)])
    total = law.sum()
    if abs(total - 1.0) > 1e-8:
        raise RuntimeError(f"noisy-max quadrature lost mass: sum={total}")
    return law / total


# ---------------------------------------------------------------------------
# Dispatchers
# ---------------------------------------------------------------------------

def _derive_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(k,)).generate_state(1)[0])


def selection_law(
    config: MechanismConfig, reports, outcomes,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> np.ndarray:
    """Exact selection distribution of any mechanism given (R, y)."""
    if isinstance(config, SimpleMax):
        return _argmax_tie_law(score_totals(reports, outcomes))
    if isinstance(config, Elf):
        return elf_winner_law(reports, outcomes, budget=budget)
    if isinstance(config, PointPerRound):
        r = _validate_reports(reports)
        _validate_g_range(config.g, r.shape[0], config.range_length)
        probs = _point_probs_matrix(
            r, outcomes, lambda rr, yy, tt: point_per_round_point_prob(rr, yy, tt, config.g)
        )
        return _tally_dp_law(probs, budget)
    if isinstance(config, Ftrl):
        return ftrl_select(reports, outcomes, config.regularizer, config.eta)
    if isinstance(config, MultWeights):
        return mw_select(reports, outcomes, config.eta)
    if isinstance(config, ReportNoisyMax):
        return noisy_max_law(score_totals(reports, outcomes), config.b)
    raise TypeError(f"unknown mechanism config {config!r}")


def select(config: MechanismConfig, reports, outcomes, seed: int) -> WinnerDraw:
    """Sample a winner under any mechanism configuration."""
    if isinstance(config, SimpleMax):
        return simple_max_select(reports, outcomes, seed)
    if isinstance(config, Elf):
        return elf_select(reports, outcomes, seed)
    if isinstance(config, PointPerRound):
        return point_per_round_select(reports, outcomes, config.g, seed, config.range_length)
    if isinstance(config, Ftrl):
        return sample_winner(ftrl_select(reports, outcomes, config.regularizer, config.eta), seed)
    if isinstance(config, MultWeights):
        return sample_winner(mw_select(reports, outcomes, config.eta), seed)
    if isinstance(config, ReportNoisyMax):
        return report_noisy_max_select(reports, outcomes, config.b, seed)
    raise TypeError(f"unknown mechanism config {config!r}")
