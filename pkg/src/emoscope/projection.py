"""Sentence feature vectors, deterministic exact t-SNE, and the glyph
payloads behind the sentence clustering view.

The t-SNE here is the exact O(n^2) algorithm: Gaussian input affinities
with per-point bandwidths solved to the target perplexity by bisection,
Student-t output kernel, gradient descent with momentum, adaptive gains
and early exaggeration.  n is the number of sentences in one talk, so
quadratic cost is irrelevant.  All randomness comes from the caller's
seed; the same input and seed reproduce coordinates bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fusion import SentenceFusion
from .model import EmotionCategory, VideoRecord

CONCAT = "concat"  # 24-dim: three 8-dim channel distributions
LITERAL3 = "literal3"  # 3-dim: the three dominant confidences
VECTOR_MODES = (CONCAT, LITERAL3)

DEFAULT_PERPLEXITY = 5.0
DEFAULT_ITERATIONS = 1000
DEFAULT_LEARNING_RATE = 100.0
EARLY_EXAGGERATION = 12.0
EXAGGERATION_ITERS = 100
MOMENTUM_SWITCH_ITER = 250
INIT_SIGMA = 1e-4
_P_FLOOR = 1e-12


class DegenerateInput(ValueError):
    """Input vectors contain non-finite values."""


@dataclass(frozen=True)
class SentenceVector:
    segment_id: int
    values: tuple[float, ...]


def sentence_vector(fusion: SentenceFusion, mode: str = CONCAT) -> SentenceVector:
    """Feature vector for one sentence.

    concat: face mean distribution, text distribution, audio distribution
    back to back (24 dims, absent channels contribute zeros).  literal3:
    just the three dominant confidences.  All components lie in [0, 1].
    """
    if mode == CONCAT:
        values = (
            fusion.face_distribution_mean.as_vector()
            + fusion.text_distribution.as_vector()
            + fusion.audio_distribution.as_vector()
        )
    elif mode == LITERAL3:
        values = tuple(
            pick[1] if pick is not None else 0.0
            for pick in (fusion.face, fusion.text, fusion.audio)
        )
    else:
        raise ValueError(f"unknown vector mode {mode!r}")
    return SentenceVector(segment_id=fusion.segment_id, values=values)


# ---------------------------------------------------------------------------
# Exact t-SNE
# ---------------------------------------------------------------------------


def conditional_affinities(
    sq_dists: np.ndarray, perplexity: float, tol: float = 1e-9, max_iter: int = 200
) -> tuple[np.ndarray, np.ndarray]:
    """Per-point Gaussian affinities at the target perplexity.

    For each row, bisect the precision beta = 1/(2 sigma^2) until the
    conditional distribution's entropy matches log(perplexity).  Returns
    the row-stochastic conditional matrix (zero diagonal) and the
    achieved perplexity per point.
    """
    n = sq_dists.shape[0]
    target = math.log(perplexity)
    P = np.zeros((n, n))
    achieved = np.zeros(n)
    for i in range(n):
        d = np.delete(sq_dists[i], i)
        beta, beta_lo, beta_hi = 1.0, 0.0, math.inf
        dmin = d.min()
        p = np.empty_like(d)
        h = 0.0
        for _ in range(max_iter):
            np.exp(-(d - dmin) * beta, out=p)
            s = p.sum()
            h = math.log(s) + beta * (float(d @ p) / s - dmin)
            diff = h - target
            if abs(diff) < tol:
                break
            if diff > 0:  # entropy too high: sharpen
                beta_lo = beta
                beta = beta * 2.0 if beta_hi == math.inf else (beta + beta_hi) / 2.0
            else:
                beta_hi = beta
                beta = beta / 2.0 if beta_lo == 0.0 else (beta + beta_lo) / 2.0
        row = np.insert(p / p.sum(), i, 0.0)
        P[i] = row
        achieved[i] = math.exp(h)
    return P, achieved


@dataclass
class TsneResult:
    coords: np.ndarray  # (n, 2), centered at the origin
    kl_history: list[float] = field(default_factory=list)  # vs the true P per iteration
    perplexity_log2_residual: np.ndarray | None = None
    effective_perplexity: float = 0.0


def _small_template(n: int) -> np.ndarray:
    # Perplexity is undefined for n <= 3; place points on a fixed shape.
    if n == 1:
        return np.zeros((1, 2))
    if n == 2:
        return np.array([[-0.5, 0.0], [0.5, 0.0]])
    h = 1.0 / math.sqrt(3.0)
    return np.array([[0.0, h], [-0.5, -h / 2.0], [0.5, -h / 2.0]])


def _pairwise_sq_dists(Y: np.ndarray) -> np.ndarray:
    sq = np.sum(Y * Y, axis=1)
    d = sq[:, None] + sq[None, :] - 2.0 * (Y @ Y.T)
    np.maximum(d, 0.0, out=d)
    return d


def _kl(P: np.ndarray, Q: np.ndarray) -> float:
    mask = P > 0
    return float(np.sum(P[mask] * np.log(P[mask] / Q[mask])))


def tsne_diagnostics(
    vectors: np.ndarray,
    perplexity: float = DEFAULT_PERPLEXITY,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    early_exaggeration: float = EARLY_EXAGGERATION,
    exaggeration_iters: int = EXAGGERATION_ITERS,
    init: np.ndarray | None = None,
) -> TsneResult:
    """Run exact t-SNE and keep convergence diagnostics.

    `init` overrides the seeded Gaussian initialization (used by the
    permutation-equivariance tests).  A perplexity >= n is clamped to
    0.99 (n - 1), the largest structurally meaningful value.
    """
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if not np.all(np.isfinite(X)):
        raise DegenerateInput("input vectors must be finite")
    n = X.shape[0]
    if n == 0:
        return TsneResult(coords=np.zeros((0, 2)))
    if n <= 3:
        return TsneResult(coords=_small_template(n))

    eff_perplexity = min(float(perplexity), 0.99 * (n - 1))
    P_cond, achieved = conditional_affinities(_pairwise_sq_dists(X), eff_perplexity)
    residual = np.abs(np.log2(achieved) - math.log2(eff_perplexity))
    P = (P_cond + P_cond.T) / (2.0 * n)
    P = np.maximum(P, _P_FLOOR)

    if init is not None:
        Y = np.array(init, dtype=np.float64, copy=True)
    else:
        rng = np.random.default_rng(seed)
        Y = rng.normal(0.0, INIT_SIGMA, size=(n, 2))

    velocity = np.zeros_like(Y)
    kl_history: list[float] = []

    for it in range(iterations):
        num = 1.0 / (1.0 + _pairwise_sq_dists(Y))
        np.fill_diagonal(num, 0.0)
        Q = np.maximum(num / num.sum(), _P_FLOOR)
        kl_history.append(_kl(P, Q))

        P_eff = P * early_exaggeration if it < exaggeration_iters else P
        PQ = (P_eff - Q) * num
        grad = 4.0 * (PQ.sum(axis=1)[:, None] * Y - PQ @ Y)

        momentum = 0.5 if it < MOMENTUM_SWITCH_ITER else 0.8
        velocity = momentum * velocity - learning_rate * grad
        Y = Y + velocity
        Y = Y - Y.mean(axis=0)

    num = 1.0 / (1.0 + _pairwise_sq_dists(Y))
    np.fill_diagonal(num, 0.0)
    kl_history.append(_kl(P, np.maximum(num / num.sum(), _P_FLOOR)))

    return TsneResult(
        coords=Y,
        kl_history=kl_history,
        perplexity_log2_residual=residual,
        effective_perplexity=eff_perplexity,
    )


def tsne(
    vectors: np.ndarray,
    perplexity: float = DEFAULT_PERPLEXITY,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
    learning_rate: float = DEFAULT_LEARNING_RATE,
) -> np.ndarray:
    """2D coordinates for the given vectors, centered at the origin."""
    return tsne_diagnostics(
        vectors, perplexity=perplexity, iterations=iterations, seed=seed,
        learning_rate=learning_rate,
    ).coords


# ---------------------------------------------------------------------------
# Projection model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProjectionParams:
    mode: str = CONCAT
    perplexity: float = DEFAULT_PERPLEXITY
    iterations: int = DEFAULT_ITERATIONS
    seed: int = 0
    learning_rate: float = DEFAULT_LEARNING_RATE


@dataclass(frozen=True)
class GlyphSector:
    """One third of a sentence glyph: channel color and radius."""

    category: EmotionCategory | None
    radius: float  # the channel's dominant confidence, 0 when absent


@dataclass(frozen=True)
class Glyph:
    face: GlyphSector
    text: GlyphSector
    audio: GlyphSector
    time_index: int  # segment id; doubles as the time-order label


@dataclass(frozen=True)
class ProjectedSentence:
    segment_id: int
    x: float
    y: float
    glyph: Glyph


@dataclass(frozen=True)
class ProjectionModel:
    """Glyph positions for one talk; points are in time (segment id)
    order, which is also the order of the linking curve."""

    video_id: str
    params: ProjectionParams
    points: tuple[ProjectedSentence, ...]


def _sector(pick: tuple[EmotionCategory, float] | None) -> GlyphSector:
    if pick is None:
        return GlyphSector(category=None, radius=0.0)
    return GlyphSector(category=pick[0], radius=pick[1])


def build_projection(
    video: VideoRecord,
    fusions: tuple[SentenceFusion, ...],
    params: ProjectionParams = ProjectionParams(),
) -> ProjectionModel:
    """Vectors -> t-SNE coordinates -> glyph payloads, in time order."""
    ordered = sorted(fusions, key=lambda f: f.segment_id)
    vectors = np.array(
        [sentence_vector(f, params.mode).values for f in ordered], dtype=np.float64
    )
    coords = tsne(
        vectors,
        perplexity=params.perplexity,
        iterations=params.iterations,
        seed=params.seed,
        learning_rate=params.learning_rate,
    )
    points = tuple(
        ProjectedSentence(
            segment_id=f.segment_id,
            x=float(xy[0]),
            y=float(xy[1]),
            glyph=Glyph(
                face=_sector(f.face),
                text=_sector(f.text),
                audio=_sector(f.audio),
                time_index=f.segment_id,
            ),
        )
        for f, xy in zip(ordered, coords)
    )
    return ProjectionModel(video_id=video.id, params=params, points=points)
