"""Finite ordered sets stored as dense boolean relation matrices.

The relation convention is reflexive: ``rel[a, b]`` means ``a <= b`` and the
diagonal is always true, so the future row ``rel[a]`` plays the role of
``J+(a)`` (which contains ``a`` itself) and the column ``rel[:, b]`` plays
``J-(b)``.  Relations are kept transitively closed; covering pairs are
recomputed on demand.
"""

from __future__ import annotations

import heapq
import json

import numpy as np

from .errors import ChainBudgetExceeded, CycleError

Chain = list  # ordered element indices, strictly increasing in <=
LinearExtension = np.ndarray  # permutation of 0..n-1


def transitive_closure(rel: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of a boolean relation matrix."""
    n = rel.shape[0]
    closed = rel.copy()
    closed[np.diag_indices(n)] = True
    while True:
        # float32 matmul hits BLAS; bool matmul is a slow generic loop
        step = (closed.astype(np.float32) @ closed.astype(np.float32)) > 0
        if (step == closed).all():
            return closed
        closed = step


def check_antisymmetry(rel: np.ndarray) -> None:
    both = rel & rel.T
    both[np.diag_indices(rel.shape[0])] = False
    if both.any():
        a, b = np.argwhere(both)[0]
        raise CycleError(f"elements {a} and {b} lie on a strict cycle")


class CausalSet:
    """Finite reflexive partial order over indices ``0..n-1``.

    Immutable after construction; safe to share across workers.  External
    labels are metadata only and never affect the order.
    """

    def __init__(self, rel, labels=None, meta=None, validate=True):
        rel = np.asarray(rel, dtype=bool)
        if rel.ndim != 2 or rel.shape[0] != rel.shape[1]:
            raise ValueError(f"relation must be square, got {rel.shape}")
        self._rel = rel
        self._rel.setflags(write=False)
        self.labels = list(labels) if labels is not None else None
        self.meta = dict(meta) if meta else {}
        self._covers = None
        self._bitrows = None
        self._bitcols = None
        if validate:
            self.validate()

    # -- construction ------------------------------------------------------

    @classmethod
    def from_pairs(cls, n, pairs, labels=None, meta=None) -> "CausalSet":
        """Build the reflexive-transitive closure of a generating pair set.

        Raises CycleError if the closure would violate antisymmetry and
        IndexError if a pair is out of range.
        """
        rel = np.zeros((n, n), dtype=bool)
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise IndexError(f"pair ({a}, {b}) out of range for n={n}")
            rel[a, b] = True
        closed = transitive_closure(rel)
        check_antisymmetry(closed)
        return cls(closed, labels=labels, meta=meta, validate=False)

    def validate(self) -> None:
        """Check reflexivity, antisymmetry and transitive closedness."""
        rel = self._rel
        n = self.n
        if not rel[np.diag_indices(n)].all():
            raise ValueError("relation is not reflexive")
        check_antisymmetry(rel)
        step = (rel.astype(np.float32) @ rel.astype(np.float32)) > 0
        if (step != rel).any():
            raise ValueError("relation is not transitively closed")

    # -- basic queries -----------------------------------------------------

    @property
    def n(self) -> int:
        return self._rel.shape[0]

    @property
    def rel(self) -> np.ndarray:
        return self._rel

    def leq(self, a, b) -> bool:
        return bool(self._rel[a, b])

    def future(self, a) -> np.ndarray:
        """Boolean mask of J+(a), including a itself."""
        return self._rel[a]

    def past(self, a) -> np.ndarray:
        """Boolean mask of J-(a), including a itself."""
        return self._rel[:, a]

    def interval(self, a, b) -> np.ndarray:
        """Indices of J(a, b) = {x : a <= x <= b}; empty unless a <= b."""
        return np.flatnonzero(self._rel[a] & self._rel[:, b])

    @property
    def strict(self) -> np.ndarray:
        out = self._rel.copy()
        out[np.diag_indices(self.n)] = False
        return out

    @property
    def covers(self) -> np.ndarray:
        """Covering relation: a <: b with nothing strictly between."""
        if self._covers is None:
            lt = self.strict
            f = lt.astype(np.float32)
            between = (f @ f) > 0
            self._covers = lt & ~between
            self._covers.setflags(write=False)
        return self._covers

    @property
    def bitrows(self):
        """Future rows packed as python ints (bit i set iff a <= i)."""
        if self._bitrows is None:
            self._bitrows = [pack_bits(row) for row in self._rel]
        return self._bitrows

    @property
    def bitcols(self):
        if self._bitcols is None:
            self._bitcols = [pack_bits(col) for col in self._rel.T]
        return self._bitcols

    def maximal_elements(self) -> np.ndarray:
        return np.flatnonzero(~self.strict.any(axis=1))

    def minimal_elements(self) -> np.ndarray:
        return np.flatnonzero(~self.strict.any(axis=0))

    def incomparable_pairs(self):
        """Unordered pairs (a, b), a < b by index, with a || b."""
        comp = self._rel | self._rel.T
        ii, jj = np.where(~comp)
        return [(int(a), int(b)) for a, b in zip(ii, jj) if a < b]

    def subposet(self, indices):
        """Induced suborder; returns (CausalSet, original-index array)."""
        idx = np.asarray(indices, dtype=int)
        sub = self._rel[np.ix_(idx, idx)]
        labels = [self.labels[i] for i in idx] if self.labels else None
        return CausalSet(sub, labels=labels, validate=False), idx

    # -- chains and extensions ----------------------------------------------

    def maximal_chains_from(self, p, budget=10000):
        """Enumerate maximal chains starting at p.

        A maximal chain is a saturated path in the covering relation of the
        induced order on J+(p), ending at an element maximal in J+(p).
        Raises ChainBudgetExceeded (carrying the partial list) if more than
        ``budget`` chains exist.
        """
        if budget <= 0:
            raise ValueError("budget must be positive")
        fut = np.flatnonzero(self._rel[p])
        sub, idx = self.subposet(fut)
        pos = int(np.searchsorted(idx, p))
        cov = sub.covers
        succs = [np.flatnonzero(cov[i]) for i in range(sub.n)]
        chains = []
        stack = [pos]

        def walk():
            here = stack[-1]
            nxt = succs[here]
            if nxt.size == 0:
                chains.append([int(idx[i]) for i in stack])
                if len(chains) > budget:
                    raise ChainBudgetExceeded(chains, budget)
                return
            for s in nxt:
                stack.append(int(s))
                walk()
                stack.pop()

        walk()
        return chains

    def linear_extension(self, key=None) -> np.ndarray:
        """Deterministic linear extension (smallest index first by default).

        ``key`` maps an element index to a sort key; among the currently
        minimal elements the smallest key is emitted first.
        """
        n = self.n
        if key is None:
            key = lambda i: i
        indeg = self.strict.sum(axis=0).astype(int)
        heap = [(key(i), i) for i in range(n) if indeg[i] == 0]
        heapq.heapify(heap)
        out = np.empty(n, dtype=int)
        cov = self.covers
        for k in range(n):
            _, i = heapq.heappop(heap)
            out[k] = i
            for j in np.flatnonzero(cov[i]):
                indeg[j] -= 1
                if indeg[j] == 0:
                    heapq.heappush(heap, (key(int(j)), int(j)))
        return out

    def is_linear_extension(self, perm) -> bool:
        perm = np.asarray(perm, dtype=int)
        if perm.shape != (self.n,) or len(set(perm.tolist())) != self.n:
            return False
        pos = np.empty(self.n, dtype=int)
        pos[perm] = np.arange(self.n)
        lt = self.strict
        a, b = np.where(lt)
        return bool((pos[a] < pos[b]).all())

    # -- serialization -------------------------------------------------------

    def cover_pairs(self):
        """Canonical generating set: sorted covering pairs."""
        ii, jj = np.where(self.covers)
        return sorted((int(a), int(b)) for a, b in zip(ii, jj))

    def to_json(self) -> dict:
        doc = {"n": self.n, "pairs": [list(p) for p in self.cover_pairs()]}
        if self.labels is not None:
            doc["labels"] = list(self.labels)
        doc["meta"] = self.meta
        return doc

    @classmethod
    def from_json(cls, doc) -> "CausalSet":
        return cls.from_pairs(
            doc["n"], [tuple(p) for p in doc.get("pairs", [])],
            labels=doc.get("labels"), meta=doc.get("meta"),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)

    @classmethod
    def load(cls, path) -> "CausalSet":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def __repr__(self):
        return f"CausalSet(n={self.n}, relations={int(self.strict.sum())})"

    def __eq__(self, other):
        return isinstance(other, CausalSet) and np.array_equal(self._rel, other._rel)


def pack_bits(mask: np.ndarray) -> int:
    """Boolean vector to python int bitset (bit i = mask[i])."""
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


def iter_bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low
