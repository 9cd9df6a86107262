"""Triangle counting schemes.

All four count sum_{u<v<w} A(uv) A(vw) A(uw) on the final edge multiset.
The first two run on edge streams and exploit the telescoping

    T = sum_j delta_j * C_{j-1}(a_j, b_j),
    C(a, b) = sum_u A(a, u) A(b, u),

charging each token the common-neighbor count just before its update
(a self-loop-free update never changes its own C term). The last two
charge each vertex for the edges among its (replayed or listed)
neighbors. In every case the verifier evaluates its running charge at
random points of the vertex-grid extension and the prover ships the
matching polynomial so the grid total can be read off.

Tradeoffs (help elements, verifier cells), grid [t] x [s] with ts >= n:

  tri-laconic   2t-1 help, about n*s cells
  tri-frugal    (2t-1)^2 (2n-1) help, about 2s cells
  tri-sparse    neighborhood replay (2m ids) + (2t-1)^2 help,
                      about s^2 + 2s cells
  tri-adj   (2t-1)^2 help on adjacency-list input,
                      about s^2 + 2s cells
"""

from __future__ import annotations

import numpy as np

from .extension import (ShapeConfig, coeffs_from_values_1d,
                        coeffs_from_values_nd, coeffs_to_serial, grid_bump,
                        impulse_block, impulse_table, mat_mulmod, nd_eval,
                        nd_grid_sum, resolve_shape)
from .field import fe_random
from .oracle import oracle_triangles
from .protocol import Scheme, register, _clone_transcript
from .setops import Fingerprint, directed_key, poly_eval_np, poly_grid_sum
from .stream import (AdjItem, EdgeToken, GraphInstance, ProofTranscript,
                     RejectError)


def _edges(inst: GraphInstance):
    if inst.model not in ("turnstile", "vanilla"):
        raise ValueError(f"edge-stream scheme cannot run on {inst.model}")
    for tok in inst.tokens:
        if isinstance(tok, EdgeToken):
            yield tok.u, tok.v, tok.delta
        else:
            raise ValueError("unexpected query-set tokens in triangle input")


class _TriangleBase(Scheme):
    def __init__(self, n: int, t: int, s: int):
        self.n = n
        self.t = t
        self.s = s
        self.sc = ShapeConfig(n, t, s)

    @classmethod
    def configure(cls, inst, t=None, s=None, **kw):
        t, s = resolve_shape(inst.n, t, s)
        return cls(inst.n, t, s)

    def oracle_value(self, inst):
        return oracle_triangles(inst)


@register
class TrianglesLaconic(_TriangleBase):
    """One short univariate claim; verifier stores a full n x s table."""

    name = "tri-laconic"
    mutations = ("coefficient_flip", "block_truncation", "output_value_lie")

    def hcost_bound(self, inst) -> int:
        return 2 * self.t - 1

    def vcost_bound(self, inst) -> int:
        return self.n * self.s + 8

    def prove(self, inst, p: int) -> ProofTranscript:
        t, s, n, sc = self.t, self.s, self.n, self.sc
        D = impulse_block(np.arange(1, 2 * t), t, p)  # (2t-1, t)
        table = np.zeros((2 * t - 1, n, s), dtype=np.int64)
        acc = np.zeros(2 * t - 1, dtype=np.int64)
        for (a, b, delta) in _edges(inst):
            prod = table[:, a - 1, :] * table[:, b - 1, :] % p
            acc = (acc + delta * prod.sum(axis=1)) % p
            xa, ya = sc.shape(a)
            xb, yb = sc.shape(b)
            table[:, a - 1, yb - 1] = (table[:, a - 1, yb - 1]
                                       + delta * D[:, xb - 1]) % p
            table[:, b - 1, ya - 1] = (table[:, b - 1, ya - 1]
                                       + delta * D[:, xa - 1]) % p
        tr = ProofTranscript()
        tr.add_coeffs("charge_poly", coeffs_from_values_1d(acc, p))
        return tr

    def run_verifier(self, inst, reader, p, rng, meter):
        t, s, n, sc = self.t, self.s, self.n, self.sc
        r = fe_random(rng, p)
        imp = impulse_table(r, t, p)
        meter.alloc("adjacency_rows", n * s)
        meter.alloc("registers", 2)
        table = np.zeros((n, s), dtype=np.int64)
        acc = 0
        for (a, b, delta) in _edges(inst):
            prod = table[a - 1] * table[b - 1] % p
            acc = (acc + delta * int(prod.sum() % p)) % p
            xa, ya = sc.shape(a)
            xb, yb = sc.shape(b)
            table[a - 1, yb - 1] = (table[a - 1, yb - 1]
                                    + delta * imp[xb - 1]) % p
            table[b - 1, ya - 1] = (table[b - 1, ya - 1]
                                    + delta * imp[xa - 1]) % p
        coeffs = reader.coeffs("charge_poly", (2 * t - 1,))
        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        if poly_eval_np(coeffs, r, p) != acc % p:
            raise RejectError("charge polynomial disagrees at random point")
        return poly_grid_sum(coeffs, t, p)

    def mutate_output(self, inst, transcript, p, rng):
        out = _clone_transcript(transcript)
        bump = np.zeros(2 * self.t - 1, dtype=np.int64)
        bump[:self.t] = grid_bump(self.t, p)
        shift = rng.randrange(1, p)
        b = out.blocks[0]
        b.values = (b.values + shift * bump) % p
        return out


@register
class TrianglesFrugal(_TriangleBase):
    """Tiny verifier (two length-s rows); large trivariate claim."""

    name = "tri-frugal"
    mutations = ("coefficient_flip", "block_truncation", "output_value_lie")

    def hcost_bound(self, inst) -> int:
        return (2 * self.t - 1) ** 2 * (2 * self.n - 1)

    def vcost_bound(self, inst) -> int:
        return 2 * self.s + 16

    def _shape3(self):
        return (2 * self.t - 1, 2 * self.t - 1, 2 * self.n - 1)

    def prove(self, inst, p: int) -> ProofTranscript:
        t, s, n, sc = self.t, self.s, self.n, self.sc
        wt, wn = 2 * t - 1, 2 * n - 1
        Dt = impulse_block(np.arange(1, 2 * t), t, p)
        Dn = impulse_block(np.arange(1, 2 * n), n, p)
        B = np.zeros((wt, s, wn), dtype=np.int64)
        Q = np.zeros((wt, wt, wn), dtype=np.int64)
        # float64 dot products stay exact while chunk * (p-1)^2 < 2^53
        chunk_cap = min(256, max(1, (1 << 53) // ((p - 1) ** 2)))
        bufa: list = []
        bufb: list = []

        def flush():
            nonlocal Q
            if not bufa:
                return
            A = np.stack(bufa).astype(np.float64)  # (j, wt, wn)
            Bm = np.stack(bufb).astype(np.float64)
            prod = np.matmul(A.transpose(2, 1, 0), Bm.transpose(2, 0, 1))
            Q = (Q + np.rint(prod).astype(np.int64).transpose(1, 2, 0)) % p
            bufa.clear()
            bufb.clear()

        for (a, b, delta) in _edges(inst):
            xa, ya = sc.shape(a)
            xb, yb = sc.shape(b)
            bufa.append(delta * Dt[:, xa - 1, None] % p
                        * B[:, ya - 1, :] % p)
            bufb.append(Dt[:, xb - 1, None] * B[:, yb - 1, :] % p)
            if len(bufa) >= chunk_cap:
                flush()
            B[:, ya - 1, :] = (B[:, ya - 1, :] + delta
                               * np.outer(Dt[:, xa - 1], Dn[:, b - 1])) % p
            B[:, yb - 1, :] = (B[:, yb - 1, :] + delta
                               * np.outer(Dt[:, xb - 1], Dn[:, a - 1])) % p
        flush()
        tr = ProofTranscript()
        tr.add_coeffs("charge_poly", coeffs_from_values_nd(Q, p))
        return tr

    def run_verifier(self, inst, reader, p, rng, meter):
        t, s, n, sc = self.t, self.s, self.n, self.sc
        r1, r2, r3 = (fe_random(rng, p) for _ in range(3))
        i1 = impulse_table(r1, t, p)
        i2 = impulse_table(r2, t, p)
        i3 = impulse_table(r3, n, p)
        meter.alloc("line_rows", 2 * s)
        meter.alloc("registers", 4)
        row1 = [0] * s
        row2 = [0] * s
        acc = 0
        for (a, b, delta) in _edges(inst):
            xa, ya = sc.shape(a)
            xb, yb = sc.shape(b)
            acc = (acc + delta * i1[xa - 1] * row1[ya - 1] % p
                   * i2[xb - 1] % p * row2[yb - 1]) % p
            for (x, y, other) in ((xa, ya, b), (xb, yb, a)):
                row1[y - 1] = (row1[y - 1]
                               + delta * i1[x - 1] * i3[other - 1]) % p
                row2[y - 1] = (row2[y - 1]
                               + delta * i2[x - 1] * i3[other - 1]) % p
        tensor = reader.coeffs("charge_poly", self._shape3())
        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        if nd_eval(tensor, (r1, r2, r3), p) != acc % p:
            raise RejectError("charge polynomial disagrees at random point")
        return nd_grid_sum(tensor, (t, t, n), p)

    def mutate_output(self, inst, transcript, p, rng):
        out = _clone_transcript(transcript)
        t, n = self.t, self.n
        bump = np.einsum("i,j,k->ijk", grid_bump(t, p), grid_bump(t, p),
                         grid_bump(n, p)) % p
        shift = rng.randrange(1, p)
        tensor = np.zeros(self._shape3(), dtype=np.int64)
        tensor[:t, :t, :n] = bump * shift % p
        out.blocks[0].values = (out.blocks[0].values
                                + coeffs_to_serial(tensor)) % p
        return out


def _vertex_grid_index(sc: ShapeConfig):
    xs = np.empty(sc.n, dtype=np.int64)
    ys = np.empty(sc.n, dtype=np.int64)
    for v in range(1, sc.n + 1):
        xs[v - 1], ys[v - 1] = sc.shape(v)
    return xs - 1, ys - 1


def _apex_matrix(nbrs, sc, Dt, x_idx, y_idx, p) -> np.ndarray:
    """G[w, c] = delta_{x_c}(w) * chi~_{N(v)}(w, y_c) for every vertex c.

    The apex charge polynomial is then G @ Adj @ G.T evaluated over
    whatever adjacency multiplicity matrix applies at this apex.
    """
    wt = Dt.shape[0]
    chi = np.zeros((wt, sc.s), dtype=np.int64)
    for u in nbrs:
        xu, yu = sc.shape(u)
        chi[:, yu - 1] = (chi[:, yu - 1] + Dt[:, xu - 1]) % p
    return Dt[:, x_idx] * chi[:, y_idx] % p


@register
class TrianglesSparse(_TriangleBase):
    """Prover replays every neighborhood; help scales with edge count.

    The replay is tied to the stream by a fingerprint over directed
    keys; each apex is then charged for the edges among its claimed
    neighbors, so the grid total counts every triangle six times.
    """

    name = "tri-sparse"
    mutations = ("coefficient_flip", "block_truncation", "output_value_lie",
                 "vertex_list_permutation_lie")

    def hcost_bound(self, inst) -> int:
        m = sum(abs(c) for c in inst.final_edges().values())
        return 2 * m + (2 * self.t - 1) ** 2

    def vcost_bound(self, inst) -> int:
        return self.s * self.s + 2 * self.s + 8

    def _neighborhoods(self, inst) -> dict:
        nbrs: dict = {v: [] for v in range(1, inst.n + 1)}
        for (u, v), c in sorted(inst.final_edges().items()):
            for _ in range(c):
                nbrs[u].append(v)
                nbrs[v].append(u)
        return {v: sorted(lst) for v, lst in nbrs.items()}

    def prove(self, inst, p: int) -> ProofTranscript:
        return self._transcript_for(inst, self._neighborhoods(inst), p)

    def _transcript_for(self, inst, nbrs, p) -> ProofTranscript:
        t, n, sc = self.t, self.n, self.sc
        wt = 2 * t - 1
        Dt = impulse_block(np.arange(1, 2 * t), t, p)
        x_idx, y_idx = _vertex_grid_index(sc)
        adj = np.zeros((n, n), dtype=np.int64)
        for (u, v), c in inst.final_edges().items():
            adj[u - 1, v - 1] = c % p
            adj[v - 1, u - 1] = c % p
        P = np.zeros((wt, wt), dtype=np.int64)
        for v in range(1, n + 1):
            lst = nbrs.get(v, [])
            if not lst:
                continue
            G = _apex_matrix(lst, sc, Dt, x_idx, y_idx, p)
            P = (P + mat_mulmod(mat_mulmod(G, adj, p), G.T, p)) % p
        tr = ProofTranscript()
        for v in range(1, n + 1):
            tr.add_vertices("nbrs", nbrs.get(v, []))
        tr.add_coeffs("charge_poly", coeffs_from_values_nd(P, p))
        return tr

    def run_verifier(self, inst, reader, p, rng, meter):
        t, s, n, sc = self.t, self.s, self.n, self.sc
        r1, r2 = fe_random(rng, p), fe_random(rng, p)
        gamma = fe_random(rng, p)
        i1 = impulse_table(r1, t, p)
        i2 = impulse_table(r2, t, p)
        meter.alloc("pair_sketch", s * s)
        meter.alloc("line_rows", 2 * s)
        meter.alloc("registers", 5)
        pair = np.zeros((s, s), dtype=np.int64)
        fp_in = Fingerprint(gamma, p)
        fp_replay = Fingerprint(gamma, p)
        for (a, b, delta) in _edges(inst):
            xa, ya = sc.shape(a)
            xb, yb = sc.shape(b)
            pair[ya - 1, yb - 1] = (pair[ya - 1, yb - 1]
                                    + delta * i1[xa - 1] * i2[xb - 1]) % p
            pair[yb - 1, ya - 1] = (pair[yb - 1, ya - 1]
                                    + delta * i1[xb - 1] * i2[xa - 1]) % p
            fp_in.add(directed_key(a, b, n), delta)
            fp_in.add(directed_key(b, a, n), delta)
        acc = 0
        b1 = np.zeros(s, dtype=np.int64)
        b2 = np.zeros(s, dtype=np.int64)
        for v in range(1, n + 1):
            members = reader.vertices("nbrs")
            b1[:] = 0
            b2[:] = 0
            for u in members.tolist():
                if not 1 <= u <= n:
                    raise RejectError(f"replayed neighbor {u} out of range")
                xu, yu = sc.shape(u)
                b1[yu - 1] = (b1[yu - 1] + i1[xu - 1]) % p
                b2[yu - 1] = (b2[yu - 1] + i2[xu - 1]) % p
                fp_replay.add(directed_key(v, u, n))
            acc = (acc + int(b1 @ (pair @ b2 % p) % p)) % p
        if fp_replay.value != fp_in.value:
            raise RejectError("replayed neighborhoods do not match stream")
        wt = 2 * t - 1
        tensor = reader.coeffs("charge_poly", (wt, wt))
        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        if nd_eval(tensor, (r1, r2), p) != acc % p:
            raise RejectError("charge polynomial disagrees at random point")
        total = nd_grid_sum(tensor, (t, t), p)
        if total % 6 != 0:
            raise RejectError("pair total is not a multiple of six")
        return total // 6

    def mutate_output(self, inst, transcript, p, rng):
        out = _clone_transcript(transcript)
        t = self.t
        shift = 6 * rng.randrange(1, max(2, inst.n))
        bump = np.outer(grid_bump(t, p), grid_bump(t, p)) * shift % p
        tensor = np.zeros((2 * t - 1, 2 * t - 1), dtype=np.int64)
        tensor[:t, :t] = bump
        out.blocks[-1].values = (out.blocks[-1].values
                                 + coeffs_to_serial(tensor)) % p
        return out

    def mutate_vertices(self, inst, transcript, p, rng):
        nbrs = self._neighborhoods(inst)
        donors = [v for v, lst in nbrs.items() if lst]
        if not donors or inst.n < 3:
            return None
        src = rng.choice(donors)
        u = rng.choice(nbrs[src])
        dst = rng.choice([v for v in nbrs if v != src and v != u])
        nbrs[src].remove(u)
        nbrs[dst].append(u)
        nbrs[dst].sort()
        return self._transcript_for(inst, nbrs, p)


@register
class TrianglesAdjList(_TriangleBase):
    """Adjacency-list input; each row is charged for the already revealed
    edges among its neighbors, counting every triangle four times."""

    name = "tri-adj"
    model = "adjlist"
    mutations = ("coefficient_flip", "block_truncation", "output_value_lie")

    def hcost_bound(self, inst) -> int:
        return (2 * self.t - 1) ** 2

    def vcost_bound(self, inst) -> int:
        return self.s * self.s + 2 * self.s + 8

    def prove(self, inst, p: int) -> ProofTranscript:
        if inst.model != "adjlist":
            raise ValueError("tri-adj needs adjacency-list input")
        t, n, sc = self.t, self.n, self.sc
        wt = 2 * t - 1
        Dt = impulse_block(np.arange(1, 2 * t), t, p)
        x_idx, y_idx = _vertex_grid_index(sc)
        rows: dict = {v: [] for v in range(1, n + 1)}
        for tok in inst.tokens:
            rows[tok.v].append(tok.u)
        adj = np.zeros((n, n), dtype=np.int64)
        P = np.zeros((wt, wt), dtype=np.int64)
        for v in range(1, n + 1):
            for u in rows[v]:
                if u > v:  # first reveal
                    adj[u - 1, v - 1] = 1
                    adj[v - 1, u - 1] = 1
            if not rows[v]:
                continue
            G = _apex_matrix(rows[v], sc, Dt, x_idx, y_idx, p)
            P = (P + mat_mulmod(mat_mulmod(G, adj, p), G.T, p)) % p
        tr = ProofTranscript()
        tr.add_coeffs("charge_poly", coeffs_from_values_nd(P, p))
        return tr

    def run_verifier(self, inst, reader, p, rng, meter):
        if inst.model != "adjlist":
            raise ValueError("tri-adj needs adjacency-list input")
        t, s, n, sc = self.t, self.s, self.n, self.sc
        r1, r2 = fe_random(rng, p), fe_random(rng, p)
        i1 = impulse_table(r1, t, p)
        i2 = impulse_table(r2, t, p)
        meter.alloc("pair_sketch", s * s)
        meter.alloc("line_rows", 2 * s)
        meter.alloc("registers", 4)
        pair = np.zeros((s, s), dtype=np.int64)
        b1 = np.zeros(s, dtype=np.int64)
        b2 = np.zeros(s, dtype=np.int64)
        acc = 0
        row = 0

        def close_row():
            nonlocal acc
            acc = (acc + int(b1 @ (pair @ b2 % p) % p)) % p

        for tok in inst.tokens:
            if not isinstance(tok, AdjItem):
                raise ValueError("unexpected token in adjacency input")
            if tok.v != row:
                if row:
                    close_row()
                row = tok.v
                b1[:] = 0
                b2[:] = 0
            u = tok.u
            xu, yu = sc.shape(u)
            b1[yu - 1] = (b1[yu - 1] + i1[xu - 1]) % p
            b2[yu - 1] = (b2[yu - 1] + i2[xu - 1]) % p
            if u > tok.v:  # first reveal of this edge
                xv, yv = sc.shape(tok.v)
                pair[yv - 1, yu - 1] = (pair[yv - 1, yu - 1]
                                        + i1[xv - 1] * i2[xu - 1]) % p
                pair[yu - 1, yv - 1] = (pair[yu - 1, yv - 1]
                                        + i1[xu - 1] * i2[xv - 1]) % p
        if row:
            close_row()
        wt = 2 * t - 1
        tensor = reader.coeffs("charge_poly", (wt, wt))
        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        if nd_eval(tensor, (r1, r2), p) != acc % p:
            raise RejectError("charge polynomial disagrees at random point")
        total = nd_grid_sum(tensor, (t, t), p)
        if total % 4 != 0:
            raise RejectError("pair total is not a multiple of four")
        return total // 4

    def mutate_output(self, inst, transcript, p, rng):
        out = _clone_transcript(transcript)
        t = self.t
        shift = 4 * rng.randrange(1, max(2, inst.n))
        bump = np.outer(grid_bump(t, p), grid_bump(t, p)) * shift % p
        tensor = np.zeros((2 * t - 1, 2 * t - 1), dtype=np.int64)
        tensor[:t, :t] = bump
        out.blocks[0].values = (out.blocks[0].values
                                + coeffs_to_serial(tensor)) % p
        return out
