"""Multiset fingerprints and line-restricted set comparison checkers.

Fingerprints: a multiset a over keys [N] maps to sum_j a_j gamma^j at a
random gamma; two multisets collide with probability <= N/p. Used for
equality of multisets that the verifier sees in different orders.

Line checks: a set S over universe [N] is laid out on a grid [H] x [V]
and the verifier keeps the restriction of its indicator extension to a
random line, L_S[y] = chi~_S(rho, y) for y in [V], at H field operations
total per insert... actually O(1) each: one cell of L_S changes per
insert. The prover then sends the coefficients of

    g(X) = sum_y chi~_S(X, y) * chi~_T(X, y)        (intersection)
    g(X) = sum_y chi~_S(X, y) * (1 - chi~_T(X, y))  (containment)

of degree <= 2H-2. The verifier evaluates g(rho) from its two line
arrays, compares with the claimed polynomial at rho, and reads off
sum_{x in [H]} g(x), which on the grid counts exactly the relevant
key overlaps when T is 0/1-valued (S may carry positive multiplicities
when only a zero test is needed).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .extension import (ShapeConfig, coeffs_from_values_1d, impulse_block,
                        impulse_table, mat_mulmod)
from .stream import RejectError


def undirected_key(u: int, v: int, n: int) -> int:
    a, b = (u, v) if u < v else (v, u)
    return (a - 1) * n + b


def directed_key(u: int, v: int, n: int) -> int:
    return (u - 1) * n + v


def weighted_key(u: int, v: int, w: int, n: int, W: int) -> int:
    a, b = (u, v) if u < v else (v, u)
    return ((a - 1) * n + (b - 1)) * W + w


def monomial(bases, exps, p: int) -> int:
    out = 1
    for b, e in zip(bases, exps):
        out = out * pow(b, e, p) % p
    return out


class Fingerprint:
    """sum_j mult_j * gamma^j accumulator; one field cell of state."""

    __slots__ = ("p", "gamma", "value")

    def __init__(self, gamma: int, p: int):
        self.p = p
        self.gamma = gamma % p
        self.value = 0

    def add(self, key: int, mult: int = 1):
        self.value = (self.value + mult * pow(self.gamma, key, self.p)) % self.p

    def add_term(self, term: int, mult: int = 1):
        self.value = (self.value + mult * term) % self.p


@lru_cache(maxsize=None)
def power_sums(grid: int, count: int, p: int) -> np.ndarray:
    """S_i = sum_{x=1..grid} x^i mod p for i < count."""
    xs = np.arange(1, grid + 1, dtype=np.int64) % p
    powers = np.ones(grid, dtype=np.int64)
    out = np.zeros(count, dtype=np.int64)
    for i in range(count):
        out[i] = powers.sum() % p
        powers = powers * xs % p
    return out


def poly_eval_np(coeffs: np.ndarray, x: int, p: int) -> int:
    acc = 0
    x = x % p
    for c in coeffs[::-1].tolist():
        acc = (acc * x + c) % p
    return acc


def poly_grid_sum(coeffs: np.ndarray, grid: int, p: int) -> int:
    ps = power_sums(grid, len(coeffs), p)
    return int((np.asarray(coeffs, dtype=np.int64) * ps % p).sum() % p)


class LineCheck:
    """Verifier state for one containment or intersection instance.

    dims = (H, V) with H*V >= universe size. Mutable state is the two
    length-V line arrays; the impulse table for rho is shared read-only.
    """

    def __init__(self, dims, rho: int, p: int, mode: str):
        if mode not in ("subset", "intersect"):
            raise ValueError(f"unknown line-check mode {mode!r}")
        self.H, self.V = dims
        self.p = p
        self.mode = mode
        self.rho = rho % p
        self._sc = ShapeConfig(self.H * self.V, self.H, self.V)
        self._imp = impulse_table(self.rho, self.H, p)
        self.left = np.zeros(self.V, dtype=np.int64)
        self.right = np.zeros(self.V, dtype=np.int64)

    @property
    def cells(self) -> int:
        return 2 * self.V

    def add_left(self, key: int, mult: int = 1):
        x, y = self._sc.shape(key)
        self.left[y - 1] = (self.left[y - 1]
                            + mult * self._imp[x - 1]) % self.p

    def add_right(self, key: int, mult: int = 1):
        x, y = self._sc.shape(key)
        self.right[y - 1] = (self.right[y - 1]
                             + mult * self._imp[x - 1]) % self.p

    def point_value(self) -> int:
        if self.mode == "subset":
            prod = self.left * ((1 - self.right) % self.p) % self.p
        else:
            prod = self.left * self.right % self.p
        return int(prod.sum() % self.p)

    def finish(self, coeffs: np.ndarray, what: str = "line check") -> int:
        """Consume the help polynomial; returns its sum over the row grid."""
        if len(coeffs) != 2 * self.H - 1:
            raise RejectError(f"{what}: expected {2 * self.H - 1} "
                              f"coefficients, got {len(coeffs)}")
        if poly_eval_np(coeffs, self.rho, self.p) != self.point_value():
            raise RejectError(f"{what}: polynomial disagrees at the "
                              "evaluation point")
        total = poly_grid_sum(coeffs, self.H, self.p)
        if self.mode == "subset" and total != 0:
            raise RejectError(f"{what}: containment violated")
        return total


def line_check_dims(universe: int, width: int) -> tuple:
    """Grid (H, V) with V = width capped at the universe, H minimal."""
    v = max(1, min(width, universe))
    h = -(-universe // v)
    return (h, v)


def dense_indicator(items, dims) -> np.ndarray:
    """Grid array from (key, mult) pairs; prover-side helper."""
    H, V = dims
    sc = ShapeConfig(H * V, H, V)
    arr = np.zeros((H, V), dtype=np.int64)
    for key, mult in items:
        x, y = sc.shape(key)
        arr[x - 1, y - 1] += mult
    return arr


def line_check_help(dense_left: np.ndarray, dense_right: np.ndarray,
                    p: int, mode: str) -> np.ndarray:
    """Honest coefficients of g for a containment/intersection instance."""
    H, V = dense_left.shape
    xs = np.arange(1, 2 * H, dtype=np.int64)
    D = impulse_block(xs, H, p)
    L = mat_mulmod(D, dense_left % p, p)
    R = mat_mulmod(D, dense_right % p, p)
    if mode == "subset":
        vals = (L * ((1 - R) % p) % p).sum(axis=1) % p
    else:
        vals = (L * R % p).sum(axis=1) % p
    return coeffs_from_values_1d(vals, p)
