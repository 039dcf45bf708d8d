"""Cluster-weighted confidence scoring for two-choice sense validation.

Pipeline for one choice pair: mask the differing word, take the LM's
candidate words for the blank, cluster their embeddings with a Gaussian
mixture, then score each answer choice by how close it sits to each
cluster center, weighted by the LM probability mass of that cluster.

The differential distance of a choice w to a center c is

    1 - dist(w, c) / Z_c,    Z_c = sum of dist(w', c) over the choices,

with cosine distance throughout.  Summing Z over the answer choices
(rather than the candidate pool) makes the two confidences complementary
-- conf_a + conf_b = 1 -- so values near 0.5 read as model confusion.
The alternative normalization is available via ``zc_over="candidates"``.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

import numpy as np

from cs_probe.cloze import ChoicePair
from cs_probe.dispersion import ReplacementSet
from cs_probe.embeddings import EmbeddingTable, cosine_distance
from cs_probe.errors import (
    DegenerateGeometryError,
    DegenerateVectorError,
    InvalidInputError,
    ZeroMassError,
)
from cs_probe.gmm import HardAssignment, MixtureModel, assign, fit_gmm

SKIP_CHOICE_OOV = "choice_oov"
SKIP_NO_CANDIDATES = "no_candidates"
SKIP_ALL_CANDIDATES_OOV = "all_candidates_oov"
SKIP_TOO_FEW_CANDIDATES = "too_few_candidates"
SKIP_ZERO_MASS = "zero_candidate_mass"
SKIP_DEGENERATE = "degenerate_geometry"


@dataclass(frozen=True)
class ClusteringConfig:
    n_components: int = 2
    seed: int = 7
    max_iter: int = 200
    tol: float = 1e-6
    var_floor: float = 1e-6
    restarts: int = 1
    zc_over: str = "choices"      # choices | candidates
    mass: str = "normalized"      # normalized | raw

    def __post_init__(self):
        if self.zc_over not in ("choices", "candidates"):
            raise InvalidInputError(f"zc_over must be 'choices' or 'candidates', got {self.zc_over!r}")
        if self.mass not in ("normalized", "raw"):
            raise InvalidInputError(f"mass must be 'normalized' or 'raw', got {self.mass!r}")


@dataclass(frozen=True)
class ClusterSummary:
    """One mixture component: its center, LM probability mass, members."""

    center: np.ndarray
    mass: float        # normalized across clusters, sums to 1
    raw_mass: float    # plain sum of member probabilities
    member_words: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class ConfidenceResult:
    pair_id: str
    gold: str
    conf_a: float | None = None
    conf_b: float | None = None
    predicted: str | None = None
    correct: bool | None = None
    margin: float | None = None
    skipped_reason: str | None = None
    candidates_used: int = 0
    candidates_oov: int = 0
    clusters: tuple[ClusterSummary, ...] = field(default=())

    @property
    def skipped(self) -> bool:
        return self.skipped_reason is not None

    def confidence_of(self, label: str) -> float:
        return self.conf_a if label == "a" else self.conf_b


def differential_distance(center, choice, all_choices) -> float:
    """1 - dist(choice, center) / Z with Z summing dist over all_choices."""
    z = 0.0
    for other in all_choices:
        z += cosine_distance(other, center)
    if z == 0.0:
        raise DegenerateGeometryError("all choices coincide with the cluster center")
    return 1.0 - cosine_distance(choice, center) / z


def cluster_mass(
    model: MixtureModel,
    assignment: HardAssignment,
    candidates: list[tuple[str, float]],
) -> list[ClusterSummary]:
    """Per-cluster LM probability mass, normalized to sum 1.

    ``candidates`` must align row-for-row with the assignment.  Empty
    clusters get mass 0; zero total mass is an error.
    """
    if len(candidates) != assignment.labels.shape[0]:
        raise InvalidInputError("assignment does not cover the candidate list")
    raw = [0.0] * model.n_components
    members: list[list[tuple[str, float]]] = [[] for _ in range(model.n_components)]
    for (word, p), label in zip(candidates, assignment.labels):
        raw[label] += p
        members[label].append((word, p))
    total = sum(raw)
    if total <= 0.0:
        raise ZeroMassError("candidate probabilities sum to zero")
    return [
        ClusterSummary(
            center=model.means[c],
            mass=raw[c] / total,
            raw_mass=raw[c],
            member_words=tuple(members[c]),
        )
        for c in range(model.n_components)
    ]


def combine_confidences(
    delta: np.ndarray,   # (n_clusters, n_choices) differential distances
    masses: np.ndarray,  # (n_clusters,)
) -> np.ndarray:
    """conf(choice) = sum over clusters of delta * mass."""
    return delta.T @ masses


def confidence_from_clusters(
    summaries: list[ClusterSummary],
    choice_vectors: list[np.ndarray],
    zc_vectors: list[np.ndarray] | None = None,
    use_raw_mass: bool = False,
) -> list[float]:
    """Confidence of each choice given fitted clusters.

    ``zc_vectors`` sets what the normalizer Z sums over; it defaults to
    the choices themselves, which makes the confidences sum to 1.
    """
    if zc_vectors is None:
        zc_vectors = choice_vectors
    delta = np.empty((len(summaries), len(choice_vectors)))
    for ci, summary in enumerate(summaries):
        for wi, vec in enumerate(choice_vectors):
            delta[ci, wi] = differential_distance(summary.center, vec, zc_vectors)
    masses = np.array(
        [s.raw_mass if use_raw_mass else s.mass for s in summaries]
    )
    return [float(x) for x in combine_confidences(delta, masses)]


def score_pair(
    pair: ChoicePair,
    candidates: ReplacementSet,
    table: EmbeddingTable,
    config: ClusteringConfig,
) -> ConfidenceResult:
    """Run the full confidence pipeline for one encodable pair.

    Never raises for content reasons; unscorable pairs come back with a
    ``skipped_reason`` so the caller's accounting stays exact.
    """
    def skipped(reason: str, used: int = 0, oov: int = 0) -> ConfidenceResult:
        return ConfidenceResult(
            pair_id=pair.id,
            gold=pair.gold,
            skipped_reason=reason,
            candidates_used=used,
            candidates_oov=oov,
        )

    vec_a = table.lookup(pair.choice_a)
    vec_b = table.lookup(pair.choice_b)
    if vec_a is None or vec_b is None:
        return skipped(SKIP_CHOICE_OOV)
    if candidates.k == 0:
        return skipped(SKIP_NO_CANDIDATES)

    usable: list[tuple[str, float]] = []
    vectors = []
    oov = 0
    for word, p in candidates.items:
        vec = table.lookup(word)
        if vec is None:
            oov += 1
        else:
            usable.append((word, p))
            vectors.append(vec)
    if not usable:
        return skipped(SKIP_ALL_CANDIDATES_OOV, oov=oov)
    if len(usable) < config.n_components:
        return skipped(SKIP_TOO_FEW_CANDIDATES, used=len(usable), oov=oov)

    X = np.stack(vectors)
    model = fit_gmm(
        X,
        n_components=config.n_components,
        seed=config.seed,
        max_iter=config.max_iter,
        tol=config.tol,
        var_floor=config.var_floor,
        restarts=config.restarts,
    )
    assignment = assign(model, X)
    try:
        summaries = cluster_mass(model, assignment, usable)
    except ZeroMassError:
        return skipped(SKIP_ZERO_MASS, used=len(usable), oov=oov)

    zc_vectors = vectors if config.zc_over == "candidates" else None
    try:
        conf_a, conf_b = confidence_from_clusters(
            summaries,
            [vec_a, vec_b],
            zc_vectors=zc_vectors,
            use_raw_mass=config.mass == "raw",
        )
    except (DegenerateGeometryError, DegenerateVectorError):
        return skipped(SKIP_DEGENERATE, used=len(usable), oov=oov)

    predicted = "a" if conf_a >= conf_b else "b"
    return ConfidenceResult(
        pair_id=pair.id,
        gold=pair.gold,
        conf_a=conf_a,
        conf_b=conf_b,
        predicted=predicted,
        correct=predicted == pair.gold,
        margin=abs(conf_a - conf_b),
        candidates_used=len(usable),
        candidates_oov=oov,
        clusters=tuple(summaries),
    )


GROUPS = ("incorrect_predicted", "incorrect_gold", "correct_predicted")


@dataclass(frozen=True)
class GroupStats:
    count: int
    min: float | None
    max: float | None
    median: float | None
    mean: float | None


def group_confidences(results) -> dict[str, list[float]]:
    """The three violin groups: predicted-label confidence split by
    correctness, plus gold-label confidence on the incorrect cases."""
    groups: dict[str, list[float]] = {name: [] for name in GROUPS}
    for r in results:
        if r.skipped:
            continue
        conf_pred = r.confidence_of(r.predicted)
        if r.correct:
            groups["correct_predicted"].append(conf_pred)
        else:
            groups["incorrect_predicted"].append(conf_pred)
            groups["incorrect_gold"].append(r.confidence_of(r.gold))
    return groups


def summarize_confidences(results) -> dict[str, GroupStats]:
    """Min/max/median/mean/count per violin group; empty groups are kept
    with count 0 and null stats."""
    summary = {}
    for name, values in group_confidences(results).items():
        if values:
            summary[name] = GroupStats(
                count=len(values),
                min=min(values),
                max=max(values),
                median=float(statistics.median(values)),
                mean=float(np.mean(values)),
            )
        else:
            summary[name] = GroupStats(count=0, min=None, max=None, median=None, mean=None)
    return summary
