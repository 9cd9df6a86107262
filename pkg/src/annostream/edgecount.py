"""Edge counting over query sets that arrive after the edge stream.

The edge multiset is sketched as an ordered-pair grid function
a(c, d) on ([t] x [s])^2; a query set U becomes line restrictions
chi~_U(r1, y), chi~_U(r2, y). The prover answers each query with a
bivariate polynomial whose value at (r1, r2) must match the verifier's
bilinear form and whose grid total is the (ordered) pair count.

edgecount-induced counts ordered pairs inside U, i.e. twice the induced
edge count; edgecount-cross counts ordered pairs U x W, which equals the
cross edge count when the two sets are disjoint (disjointness is an
input promise, matching how the generator builds query lines).

Queries are cumulative: each query line extends the running set(s) and
triggers one polynomial, so an extended set reuses all verifier state.
"""

from __future__ import annotations

import numpy as np

from .extension import (ShapeConfig, coeffs_from_values_nd, coeffs_to_serial,
                        grid_bump, impulse_block, impulse_table, mat_mulmod,
                        nd_eval, nd_grid_sum, resolve_shape)
from .field import fe_random
from .oracle import oracle_cross_edges, oracle_induced_edges
from .protocol import Scheme, register, _clone_transcript
from .stream import (EdgeToken, GraphInstance, ProofTranscript, RejectError,
                     SetMember, SetQuery)


class PairSketch:
    """a~(r1, y1, r2, y2) for the ordered-pair multiset; s*s cells."""

    def __init__(self, sc: ShapeConfig, r1: int, r2: int, p: int):
        self.sc = sc
        self.p = p
        self.i1 = impulse_table(r1, sc.t, p)
        self.i2 = impulse_table(r2, sc.t, p)
        self.table = np.zeros((sc.s, sc.s), dtype=np.int64)

    @property
    def cells(self) -> int:
        return self.sc.s * self.sc.s

    def add(self, a: int, b: int, delta: int = 1):
        xa, ya = self.sc.shape(a)
        xb, yb = self.sc.shape(b)
        self.table[ya - 1, yb - 1] = (self.table[ya - 1, yb - 1] + delta
                                      * self.i1[xa - 1] * self.i2[xb - 1]
                                      ) % self.p

    def add_sym(self, a: int, b: int, delta: int = 1):
        self.add(a, b, delta)
        self.add(b, a, delta)

    def bilinear(self, left: np.ndarray, right: np.ndarray) -> int:
        col = self.table @ right % self.p
        return int((left * col % self.p).sum() % self.p)


class LineArray:
    """chi~_S(r, y) for y in [s]; one cell touched per insert."""

    def __init__(self, sc: ShapeConfig, r: int, p: int):
        self.sc = sc
        self.p = p
        self.imp = impulse_table(r, sc.t, p)
        self.arr = np.zeros(sc.s, dtype=np.int64)

    @property
    def cells(self) -> int:
        return self.sc.s

    def add(self, v: int, mult: int = 1):
        xv, yv = self.sc.shape(v)
        self.arr[yv - 1] = (self.arr[yv - 1]
                            + mult * self.imp[xv - 1]) % self.p


def vertex_grid_index(sc: ShapeConfig):
    xs = np.empty(sc.n, dtype=np.int64)
    ys = np.empty(sc.n, dtype=np.int64)
    for v in range(1, sc.n + 1):
        xs[v - 1], ys[v - 1] = sc.shape(v)
    return xs - 1, ys - 1


def member_matrix(members, sc, Dt, x_idx, y_idx, p) -> np.ndarray:
    """G[w, c] = delta_{x_c}(w) * chi~_S(w, y_c), prover side."""
    wt = Dt.shape[0]
    chi = np.zeros((wt, sc.s), dtype=np.int64)
    for u in members:
        xu, yu = sc.shape(u)
        chi[:, yu - 1] = (chi[:, yu - 1] + Dt[:, xu - 1]) % p
    return Dt[:, x_idx] * chi[:, y_idx] % p


def pair_charge(G_left, adj, G_right, p) -> np.ndarray:
    return mat_mulmod(mat_mulmod(G_left, adj, p), G_right.T, p)


class _EdgeCountBase(Scheme):
    model = "turnstile"
    mutations = ("coefficient_flip", "block_truncation", "output_value_lie")
    cross = False

    def __init__(self, n: int, t: int, s: int):
        self.n = n
        self.t = t
        self.s = s
        self.sc = ShapeConfig(n, t, s)

    @classmethod
    def configure(cls, inst, t=None, s=None, **kw):
        t, s = resolve_shape(inst.n, t, s)
        return cls(inst.n, t, s)

    @staticmethod
    def _query_count(inst) -> int:
        return sum(1 for tok in inst.tokens if isinstance(tok, SetQuery))

    def hcost_bound(self, inst) -> int:
        return self._query_count(inst) * (2 * self.t - 1) ** 2

    def vcost_bound(self, inst) -> int:
        return self.s * self.s + 2 * self.s + self._query_count(inst) + 8

    def oracle_value(self, inst):
        us: set = set()
        ws: set = set()
        out = []
        for tok in inst.tokens:
            if isinstance(tok, SetMember):
                (us if tok.side == 0 else ws).add(tok.v)
            elif isinstance(tok, SetQuery):
                if self.cross:
                    out.append(oracle_cross_edges(inst, us, ws))
                else:
                    out.append(oracle_induced_edges(inst, us))
        return tuple(out)

    def prove(self, inst, p: int) -> ProofTranscript:
        t, sc = self.t, self.sc
        Dt = impulse_block(np.arange(1, 2 * t), t, p)
        x_idx, y_idx = vertex_grid_index(sc)
        adj = np.zeros((self.n, self.n), dtype=np.int64)
        for (u, v), c in inst.final_edges().items():
            adj[u - 1, v - 1] = c % p
            adj[v - 1, u - 1] = c % p
        tr = ProofTranscript()
        us: list = []
        ws: list = []
        for tok in inst.tokens:
            if isinstance(tok, SetMember):
                (us if tok.side == 0 else ws).append(tok.v)
            elif isinstance(tok, SetQuery):
                GU = member_matrix(us, sc, Dt, x_idx, y_idx, p)
                GR = member_matrix(ws, sc, Dt, x_idx, y_idx, p) if self.cross else GU
                tr.add_coeffs("pair_poly",
                              coeffs_from_values_nd(pair_charge(GU, adj, GR, p), p))
        return tr

    def run_verifier(self, inst, reader, p, rng, meter):
        t, s, sc = self.t, self.s, self.sc
        r1, r2 = fe_random(rng, p), fe_random(rng, p)
        sketch = PairSketch(sc, r1, r2, p)
        left = LineArray(sc, r1, p)
        right = LineArray(sc, r2, p)
        meter.alloc("pair_sketch", sketch.cells)
        meter.alloc("line_rows", left.cells + right.cells)
        meter.alloc("registers", 2)
        expected: list = []
        saw_query = False
        for tok in inst.tokens:
            if isinstance(tok, EdgeToken):
                sketch.add_sym(tok.u, tok.v, tok.delta)
            elif isinstance(tok, SetMember):
                if tok.side == 0:
                    left.add(tok.v)
                    if not self.cross:
                        right.add(tok.v)
                else:
                    if not self.cross:
                        raise ValueError("induced count takes a single set")
                    right.add(tok.v)
            elif isinstance(tok, SetQuery):
                saw_query = True
                expected.append(sketch.bilinear(left.arr, right.arr))
                meter.grow("query_registers")
        if not saw_query:
            raise ValueError("stream carries no query set")
        wt = 2 * t - 1
        values = []
        for want in expected:
            tensor = reader.coeffs("pair_poly", (wt, wt))
            if nd_eval(tensor, (r1, r2), p) != want:
                raise RejectError("pair polynomial disagrees at random point")
            total = nd_grid_sum(tensor, (t, t), p)
            if not self.cross:
                if total % 2:
                    raise RejectError("ordered pair total is odd")
                total //= 2
            values.append(total)
        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        return tuple(values)

    def mutate_output(self, inst, transcript, p, rng):
        out = _clone_transcript(transcript)
        t = self.t
        step = 1 if self.cross else 2
        shift = step * rng.randrange(1, max(2, inst.n))
        bump = np.outer(grid_bump(t, p), grid_bump(t, p)) * shift % p
        tensor = np.zeros((2 * t - 1, 2 * t - 1), dtype=np.int64)
        tensor[:t, :t] = bump
        b = out.blocks[rng.randrange(len(out.blocks))]
        b.values = (b.values + coeffs_to_serial(tensor)) % p
        return out


@register
class EdgeCountInduced(_EdgeCountBase):
    name = "edgecount-induced"
    cross = False


@register
class EdgeCountCross(_EdgeCountBase):
    name = "edgecount-cross"
    cross = True
