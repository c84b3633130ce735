"""Generators for example spaces: sprinklings, grids, power sets, cylinders.

All generators are pure functions of their parameters and seed, return
relations that are transitively closed by construction (causal relations
induced by a metric satisfy transitivity through the triangle inequality),
and are reproducible bit-for-bit for a fixed seed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DegenerateError, MetricError
from .poset import CausalSet

MIN_SEPARATION = 1e-9
SIZE_GUARD = 10 ** 6


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass
class EventCloud:
    """Coordinate point set sampled from a model geometry.

    ``coords`` has one row per event, time coordinate first.  ``region``
    is a descriptor dict (kind plus parameters) and ``seed`` records the
    RNG stream that produced the sample.
    """

    coords: np.ndarray
    region: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        if self.coords.ndim != 2:
            raise ValueError("coords must be (N, m)")

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim_spacetime(self) -> int:
        return self.coords.shape[1]

    @property
    def n_spatial(self) -> int:
        return self.dim_spacetime - 1

    @property
    def times(self) -> np.ndarray:
        return self.coords[:, 0]

    @property
    def spatial(self) -> np.ndarray:
        return self.coords[:, 1:]

    def to_json(self) -> dict:
        return {
            "coords": self.coords.tolist(),
            "region": self.region,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, doc) -> "EventCloud":
        return cls(np.array(doc["coords"], dtype=float),
                   region=doc.get("region", {}), seed=doc.get("seed"))


class MetricSample:
    """Finite metric space: point labels plus a symmetric distance table."""

    TOL = 1e-9

    def __init__(self, dmat, labels=None, validate=True):
        self.dmat = np.asarray(dmat, dtype=float)
        m = self.dmat.shape[0]
        self.labels = list(labels) if labels is not None else list(range(m))
        if validate:
            self.validate()

    @property
    def m(self) -> int:
        return self.dmat.shape[0]

    def d(self, i, j) -> float:
        return float(self.dmat[i, j])

    def validate(self) -> None:
        d = self.dmat
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise MetricError("distance table must be square")
        if (np.abs(np.diag(d)) > self.TOL).any():
            raise MetricError("d(p, p) must be zero")
        if (np.abs(d - d.T) > self.TOL).any():
            raise MetricError("distance table must be symmetric")
        if (d < -self.TOL).any():
            raise MetricError("distances must be nonnegative")
        # triangle inequality, vectorized over the middle point
        m = d.shape[0]
        for k in range(m):
            if (d > d[:, [k]] + d[[k], :] + self.TOL).any():
                raise MetricError(f"triangle inequality fails through point {k}")

    @classmethod
    def from_points(cls, points, metric="euclidean", labels=None) -> "MetricSample":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        diff = pts[:, None, :] - pts[None, :, :]
        if metric == "euclidean":
            dmat = np.sqrt((diff ** 2).sum(axis=2))
        elif metric == "linf":
            dmat = np.abs(diff).max(axis=2)
        else:
            raise ValueError(f"unknown metric {metric!r}")
        if labels is None:
            labels = [tuple(p) for p in pts.tolist()]
        return cls(dmat, labels=labels, validate=False)

    @classmethod
    def linf_grid(cls, L, k) -> "MetricSample":
        pts = list(itertools.product(range(L), repeat=k))
        return cls.from_points(pts, metric="linf", labels=pts)

    @classmethod
    def circle(cls, m, circumference=2 * math.pi) -> "MetricSample":
        step = circumference / m
        pos = np.arange(m) * step
        gap = np.abs(pos[:, None] - pos[None, :])
        dmat = np.minimum(gap, circumference - gap)
        return cls(dmat, labels=[float(t) for t in pos], validate=False)


class CylinderEvent(NamedTuple):
    t: float
    p: int  # index into the MetricSample point list


# ---------------------------------------------------------------------------
# Minkowski sprinklings
# ---------------------------------------------------------------------------

def minkowski_order(coords) -> CausalSet:
    """Causal order of coordinate events: x <= y iff dt >= |dx|_2."""
    coords = np.asarray(coords, dtype=float)
    dt = coords[None, :, 0] - coords[:, None, 0]
    dx = coords[:, None, 1:] - coords[None, :, 1:]
    dist = np.sqrt((dx ** 2).sum(axis=2))
    return CausalSet(dt >= dist, validate=False)


def _in_diamond(pts) -> np.ndarray:
    # J(q-, q+) for q-/+ = (-/+1, 0): |x| <= 1 - |t|
    return np.sqrt((pts[:, 1:] ** 2).sum(axis=1)) <= 1.0 - np.abs(pts[:, 0])


def _in_box(pts) -> np.ndarray:
    return ((pts >= 0.0) & (pts <= 1.0)).all(axis=1)


def sprinkle_minkowski(n_spatial, N, region="diamond", seed=0, inject=None):
    """Uniform sample of N events in the region, with its causal order.

    ``region`` is "diamond" (the causal interval between (-1, 0) and
    (1, 0)) or "box" (the unit hypercube).  ``inject`` prepends fixed
    events (they occupy the lowest indices and do not count toward N).
    Deterministic per seed.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    m = n_spatial + 1
    rng = np.random.default_rng(seed)
    if region == "diamond":
        inside, low, high = _in_diamond, -1.0, 1.0
    elif region == "box":
        inside, low, high = _in_box, 0.0, 1.0
    else:
        raise ValueError(f"unknown region {region!r}")

    fixed = np.empty((0, m))
    if inject is not None:
        fixed = np.asarray(inject, dtype=float).reshape(-1, m)
        if not inside(fixed).all():
            raise ValueError("injected points fall outside the region")

    pts = np.empty((0, m))
    while pts.shape[0] < N:
        # rejection sampling from the bounding box keeps density uniform
        batch = rng.uniform(low, high, size=(2 * (N - pts.shape[0]) + 8, m))
        batch = batch[inside(batch)]
        pts = np.vstack([pts, batch])[:N]
        pts = _drop_near_duplicates(np.vstack([fixed, pts]), fixed.shape[0])

    coords = np.vstack([fixed, pts[:N]])
    cloud = EventCloud(coords, region={"kind": region, "n_spatial": n_spatial,
                                       "injected": fixed.shape[0]}, seed=seed)
    return cloud, minkowski_order(coords)


def _drop_near_duplicates(pts, n_keep):
    """Drop sampled points closer than MIN_SEPARATION to an earlier point."""
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    dist[np.tril_indices(pts.shape[0])] = np.inf
    bad = np.unique(np.argwhere(dist < MIN_SEPARATION)[:, 1])
    bad = bad[bad >= n_keep]
    keep = np.setdiff1d(np.arange(pts.shape[0]), bad)
    return pts[keep[keep >= n_keep]] if n_keep else pts[keep]


# ---------------------------------------------------------------------------
# combinatorial orders
# ---------------------------------------------------------------------------

def grid_product(L, k) -> CausalSet:
    """The product order on {0..L-1}^k."""
    if L < 2 or k < 1:
        raise ValueError("need L >= 2 and k >= 1")
    if L ** k > SIZE_GUARD:
        raise ValueError(f"grid of {L}^{k} elements exceeds the size guard")
    pts = np.array(list(itertools.product(range(L), repeat=k)), dtype=int)
    rel = np.ones((len(pts), len(pts)), dtype=bool)
    for d in range(k):
        rel &= pts[:, None, d] <= pts[None, :, d]
    return CausalSet(rel, labels=[tuple(p) for p in pts.tolist()], validate=False)


def powerset_order(s) -> CausalSet:
    """Subsets of an s-element set ordered by inclusion."""
    if s < 1 or s > 20:
        raise ValueError("need 1 <= s <= 20")
    masks = np.arange(2 ** s, dtype=np.int64)
    rel = (masks[:, None] & ~masks[None, :]) == 0
    labels = [frozenset(i for i in range(s) if m >> i & 1) for m in masks]
    return CausalSet(rel, labels=[sorted(l) for l in labels], validate=False)


# ---------------------------------------------------------------------------
# causal cylinders over metric spaces
# ---------------------------------------------------------------------------

def sigma_cylinder(x: CylinderEvent, y: CylinderEvent, d: MetricSample) -> float:
    """Signed Lorentzian separation on the cylinder over (M, d).

    sgn(s - t) * sqrt((s - t)^2 - d(p, q)^2) when |s - t| > d(p, q),
    zero otherwise.
    """
    dt = y.t - x.t
    dpq = d.d(x.p, y.p)
    if abs(dt) > dpq:
        return math.copysign(math.sqrt(dt * dt - dpq * dpq), dt)
    return 0.0


def causal_cylinder(sample: MetricSample, times):
    """Events times x points, ordered by (y.t - x.t) >= d(x.p, y.p).

    Transitivity follows from the triangle inequality, so the relation is
    closed by construction; the sample is validated first (MetricError).
    """
    sample.validate()
    times = sorted(float(t) for t in times)
    events = [CylinderEvent(t, p) for t in times for p in range(sample.m)]
    tarr = np.array([e.t for e in events])
    parr = np.array([e.p for e in events])
    dt = tarr[None, :] - tarr[:, None]
    rel = dt >= sample.dmat[np.ix_(parr, parr)]
    return events, CausalSet(rel, validate=False)


def warning_cylinder(circumference, T, grid=(24, 12, 24), s_extent=None):
    """Lattice sample of [0, T] x [-S, S] x circle with the induced order.

    The spatial metric is the product metric sqrt(ds^2 + d_circle^2);
    ``grid`` gives the resolution (n_t, n_s, n_theta).  Returns
    (events, causal set); event point labels are (s, theta) pairs.
    """
    if circumference <= 0 or T <= 0:
        raise ValueError("circumference and T must be positive")
    nt, ns, ntheta = grid
    if nt * ns * ntheta > SIZE_GUARD:
        raise ValueError("grid exceeds the size guard")
    S = float(s_extent) if s_extent is not None else T / 2.0
    s_vals = np.linspace(-S, S, ns)
    theta = np.arange(ntheta) * (circumference / ntheta)
    pts = [(float(s), float(th)) for s in s_vals for th in theta]
    ds = np.array([[abs(a[0] - b[0]) for b in pts] for a in pts])
    gap = np.array([[abs(a[1] - b[1]) for b in pts] for a in pts])
    darc = np.minimum(gap, circumference - gap)
    sample = MetricSample(np.sqrt(ds ** 2 + darc ** 2), labels=pts, validate=False)
    times = np.linspace(0.0, T, nt)
    return causal_cylinder(sample, times)


def cylinder_event_index(events, t, s, theta, atol=1e-9):
    """Index of the event nearest (t, s, theta) among warning-cylinder events."""
    del atol
    best, best_d = None, np.inf
    for i, ev in enumerate(events):
        es, eth = ev.point_label if hasattr(ev, "point_label") else (None, None)
        if es is None:
            continue
    raise NotImplementedError


# ---------------------------------------------------------------------------
# de Sitter and the cone configuration
# ---------------------------------------------------------------------------

def _gudermannian(t):
    return 2.0 * np.arctan(np.tanh(np.asarray(t) / 2.0))


def desitter2_sample(N, seed=0, t_max=2.0):
    """Sample of 2D de Sitter space as the conformal cylinder.

    Events are (t, theta) with theta on the unit circle; x <= y iff the
    arc distance is at most gd(t_y) - gd(t_x) for the gudermannian gd
    (conformal time, bounded by pi/2).  Two antipodal events at t = 0 are
    injected at indices 0 and 1; their futures and pasts are disjoint
    because opposite conformal cones never overlap within |tau| < pi/2.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    rng = np.random.default_rng(seed)
    t = rng.uniform(-t_max, t_max, size=N - 2)
    th = rng.uniform(0.0, 2 * math.pi, size=N - 2)
    coords = np.vstack([[0.0, 0.0], [0.0, math.pi],
                        np.column_stack([t, th])])
    tau = _gudermannian(coords[:, 0])
    gap = np.abs(coords[:, None, 1] - coords[None, :, 1])
    arc = np.minimum(gap, 2 * math.pi - gap)
    rel = (tau[None, :] - tau[:, None]) >= arc - 1e-12
    cloud = EventCloud(coords, region={"kind": "desitter2", "t_max": t_max,
                                       "antipodal_pair": [0, 1]}, seed=seed)
    return cloud, CausalSet(rel, validate=False)


def cone_standard_example(k, r=0.5):
    """2k events in 2+1 Minkowski realizing the standard example S_k.

    Lower points a_i sit at time 0 on the unit circle; upper points b_j
    sit at time t on the circle of radius r, rotated half a turn, with t
    strictly between the largest and second-largest separation so that
    a_i <= b_j exactly when i != j.
    """
    if k < 3:
        raise ValueError("need k >= 3")
    if r <= 0:
        raise ValueError("need r > 0")
    ang = 2 * math.pi * np.arange(k) / k
    u = np.column_stack([np.cos(ang), np.sin(ang)])
    d_max = 1.0 + r
    d_second = math.sqrt(1 + r * r + 2 * r * math.cos(2 * math.pi / k))
    if not d_second < d_max - 1e-12:
        raise DegenerateError("critical separations coincide")
    t = 0.5 * (d_max + d_second)
    a = np.column_stack([np.zeros(k), u])
    b = np.column_stack([np.full(k, t), -r * u])
    coords = np.vstack([a, b])
    cloud = EventCloud(coords, region={"kind": "cone_standard_example",
                                       "k": k, "r": r, "t": t}, seed=None)
    return cloud, minkowski_order(coords)


# ---------------------------------------------------------------------------
# region geometry helpers (margin trimming)
# ---------------------------------------------------------------------------

def future_boundary_gap(cloud: EventCloud) -> np.ndarray:
    """Causal gap from each event to the future boundary of its region.

    For the diamond this is (1 - t) - |x|, the null time left before a
    causal curve must exit; for the box it is 1 - t.  Monotone
    non-increasing along causal chains, which makes margin trimming a
    chain-prefix operation.
    """
    kind = cloud.region.get("kind")
    if kind == "diamond":
        return (1.0 - cloud.times) - np.sqrt((cloud.spatial ** 2).sum(axis=1))
    if kind == "box":
        return 1.0 - cloud.times
    raise ValueError(f"no future boundary defined for region {kind!r}")


def region_height(cloud: EventCloud) -> float:
    kind = cloud.region.get("kind")
    if kind == "diamond":
        return 2.0
    if kind == "box":
        return 1.0
    raise ValueError(f"no height defined for region {kind!r}")


def bulk_mask(cloud: EventCloud, margin: float) -> np.ndarray:
    """Events deeper than ``margin`` (fraction of region height) from the
    future boundary; used to trim boundary-contaminated chains."""
    if margin <= 0:
        return np.ones(cloud.n, dtype=bool)
    return future_boundary_gap(cloud) >= margin * region_height(cloud)
