"""Controllability analysis of the broadcast-actuated swarm.

Each robot follows a unicycle model whose pivot-walking speed scales
with its span ratio nu_i = pivot_span / body_length while tumbling
enters perpendicular to it. Stacking n robots gives a linear system
with a zero drift matrix A (2n x 2n) and the input matrix B built from
one 2 x 4 block per robot; the Krylov controllability matrix then
collapses to [B 0 ... 0], so the controllable degrees of freedom equal
rank(B): 2 for a single robot or identical spans, 4 as soon as two span
ratios differ, and never more regardless of swarm size.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFiniteEntries, SpanNonPositive

DEFAULT_RANK_TOL = 1e-10
NEAR_EQUAL_SPAN_TOL = 1e-8


@dataclass(frozen=True)
class UnicycleParams:
    """Speed constants of the single-robot model.

    ``k_pivot`` scales pivot-walking speed with pivot span, ``k_tumble``
    scales tumbling speed with body length, ``heading`` is the motion
    direction of the pivot-walk term.
    """

    k_pivot: float
    k_tumble: float
    heading: float = 0.0

    def __post_init__(self):
        if self.k_pivot <= 0 or self.k_tumble <= 0:
            raise SpanNonPositive("speed constants must be > 0")

    def input_vector(self, body_length: float) -> np.ndarray:
        """The shared 4-vector input u for a reference body length."""
        s, c = math.sin(self.heading), math.cos(self.heading)
        kp, kt = self.k_pivot, self.k_tumble
        return np.array([kp * body_length * s, kp * body_length * c,
                         kt * body_length * s, kt * body_length * c])


@dataclass(frozen=True)
class SwarmSystem:
    """Span ratios nu_i = pivot_span_i / body_length_i of the swarm."""

    nu: tuple

    def __post_init__(self):
        object.__setattr__(self, "nu", tuple(float(v) for v in self.nu))
        if len(self.nu) < 1:
            raise DimensionMismatch("swarm needs at least one robot")
        for v in self.nu:
            if not (0.0 < v <= 1.0):
                raise SpanNonPositive(f"span ratio must be in (0, 1], got {v}")

    @property
    def n(self) -> int:
        return len(self.nu)

    @classmethod
    def from_robots(cls, robots) -> "SwarmSystem":
        return cls(tuple(r.pivot_span / r.body_length for r in robots))


def drift_matrix(system: SwarmSystem) -> np.ndarray:
    """A is the 2n x 2n zero matrix: position states have no drift."""
    return np.zeros((2 * system.n, 2 * system.n))


def build_input_matrix(system: SwarmSystem) -> np.ndarray:
    """Stack the per-robot block [[0, nu, -1, 0], [nu, 0, 0, 1]] (2n x 4)."""
    b = np.zeros((2 * system.n, 4))
    for i, nu in enumerate(system.nu):
        b[2 * i] = (0.0, nu, -1.0, 0.0)
        b[2 * i + 1] = (nu, 0.0, 0.0, 1.0)
    return b


def controllability_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Krylov block matrix [B, AB, A^2 B, ..., A^(2n-1) B].

    With the zero drift matrix every block after the first vanishes, so
    rank(C) = rank(B); the blocks are still materialized so the returned
    matrix has the documented 2n x 8n shape.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"A must be square, got {a.shape}")
    if b.ndim != 2 or b.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"B rows {b.shape} must match A {a.shape}")
    blocks = [b]
    power = b
    for _ in range(a.shape[0] - 1):
        power = a @ power
        blocks.append(power)
    return np.hstack(blocks)


def numeric_rank(m: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> int:
    """Rank by singular-value thresholding at ``tol * sigma_max``."""
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise NonFiniteEntries("matrix contains non-finite entries")
    if m.size == 0:
        return 0
    sigma = np.linalg.svd(m, compute_uv=False)
    if sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > tol * sigma[0]))


def controllable_dof(system: SwarmSystem, tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of independently steerable degrees of freedom.

    Span ratios closer than ``NEAR_EQUAL_SPAN_TOL`` are collapsed before
    the rank computation and reported with a warning: robots with
    practically identical spans are indistinguishable to the broadcast
    input even when the exact arithmetic says otherwise.
    """
    distinct = []
    collapsed = False
    for v in system.nu:
        if any(abs(v - w) < NEAR_EQUAL_SPAN_TOL for w in distinct):
            collapsed = True
            continue
        distinct.append(v)
    if collapsed:
        warnings.warn(
            "near-equal span ratios collapsed; rank reported for the physically "
            "distinguishable system",
            stacklevel=2,
        )
    reduced = SwarmSystem(tuple(distinct))
    c = controllability_matrix(drift_matrix(reduced), build_input_matrix(reduced))
    return numeric_rank(c, tol)
