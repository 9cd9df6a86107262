"""Shortest-path label certification via round-by-round ball growth.

The unweighted schemes replay breadth-first search: each round carries a
bivariate polynomial restricting the adjacency extension to the current
ball, and a degree vector naming which vertices the next ball contains.
The verifier audits every round with one random-point evaluation plus a
fingerprint tying the degree vector to the polynomial's partial sums, so
it never stores a ball explicitly, only an s-cell line restriction and a
running set fingerprint. Labels sent up front are compared against the
ball history through a second fingerprint in two fresh variables.

The weighted variants trade sketch width for per-vertex state. The
turnstile one aggregates update deltas into edge weights and composes a
weight-selector impulse with each vertex's weight-row extension; the
vanilla one stores one row sketch per (vertex, weight) class, which
makes every round check an exact polynomial identity rather than a
sum over selectors. Both close with an intersection check proving no
edge leaves the discovered region, which is what certifies the claimed
horizon and the unreachable remainder.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache

import networkx as nx
import numpy as np

from .extension import (ShapeConfig, _check_numpy_modulus,
                        coeffs_from_values_1d, coeffs_from_values_nd,
                        impulse_block, impulse_table, mat_mulmod, nd_eval,
                        resolve_shape)
from .field import FieldConfig, fe_inv, fe_random
from .graphapps import _adj_matrix, _cached, _edge_tokens
from .oracle import oracle_bfs, oracle_dijkstra
from .protocol import Scheme, register, _clone_transcript
from .setops import (LineCheck, dense_indicator, line_check_help, power_sums,
                     undirected_key, weighted_key)
from .stream import EdgeToken, ProofTranscript, RejectError


def _weighted_tokens(inst):
    if inst.model != "weighted":
        raise ValueError(f"scheme cannot run on {inst.model} input")
    for tok in inst.tokens:
        if isinstance(tok, EdgeToken):
            yield tok.u, tok.v, tok.w
        else:
            raise ValueError("unexpected query-set tokens in input")


def _require_source(inst):
    if inst.source is None:
        raise ValueError("scheme needs a source vertex in the header")
    return inst.source


@lru_cache(maxsize=None)
def _weight_inv_denominators(W: int, p: int) -> tuple:
    """inv of prod_{j in 0..W, j != w} (w - j) for each w in 0..W."""
    fact = [1] * (W + 1)
    for i in range(1, W + 1):
        fact[i] = fact[i - 1] * i % p
    out = []
    for w in range(W + 1):
        den = fact[w] * fact[W - w] % p
        if (W - w) % 2:
            den = (p - den) % p
        out.append(fe_inv(den, p))
    return tuple(out)


def _weight_impulse_vec(w: int, xs: np.ndarray, W: int, p: int) -> np.ndarray:
    """Selector polynomial over the weight nodes {0..W}, evaluated at xs.

    Value 1 where xs == w, 0 at the other nodes; degree W.
    """
    inv = _weight_inv_denominators(W, p)[w]
    out = np.full(xs.shape, inv, dtype=np.int64)
    for j in range(W + 1):
        if j != w:
            out = out * ((xs - j) % p) % p
    return out


def _weight_impulse(w: int, x: int, W: int, p: int) -> int:
    inv = _weight_inv_denominators(W, p)[w]
    for j in range(W + 1):
        if j != w:
            inv = inv * ((x - j) % p) % p
    return inv


def _eval_on_vertices(coeffs: np.ndarray, rho: int, n: int, p: int):
    """Horner pass giving the values on [n] plus the value at rho."""
    base = np.arange(1, n + 1, dtype=np.int64)
    grid = np.zeros(n, dtype=np.int64)
    pt = 0
    rho %= p
    for c in coeffs[::-1].tolist():
        grid = (grid * base + c) % p
        pt = (pt * rho + c) % p
    return grid, pt


def _mult_weighted_graph(inst) -> nx.Graph:
    """Aggregated turnstile stream as a weighted graph."""
    def build():
        G = nx.Graph()
        G.add_nodes_from(range(1, inst.n + 1))
        for (u, v), c in inst.final_edges().items():
            G.add_edge(u, v, weight=int(c))
        return G
    return _cached(inst, "wgraph", build)


@register
class SsspUnweighted(Scheme):
    """Single-source distances on an unweighted edge stream.

    Transcript: claimed horizon, the label vector, the source degree
    row, then one (ball polynomial, degree vector) pair per round. The
    verifier keeps two s-cell lines: the adjacency restriction
    a(r1, y, r2) filled during the stream, and the current ball
    restriction b(r1, y) rebuilt in place after every round.
    """

    name = "sssp-unweighted"
    output_kind = "labels"
    model = "turnstile"
    mutations = ("coefficient_flip", "block_truncation", "output_value_lie",
                 "qd_scalar_flip")
    scalar_flip_labels = ("source_degrees", "round_degrees")

    def __init__(self, n: int, t: int, s: int):
        self.n = n
        self.sc = ShapeConfig(n, t, s)

    @classmethod
    def configure(cls, inst, t=None, s=None, **kw):
        t, s = resolve_shape(inst.n, t, s)
        return cls(inst.n, t, s)

    def field_config(self, inst, p=None):
        if p is not None:
            return FieldConfig(p)
        return FieldConfig.auto_from_n(inst.n, D=inst.n)

    def oracle_value(self, inst):
        return tuple(oracle_bfs(inst)[1:])

    # prover ------------------------------------------------------------

    def _distances(self, inst) -> list:
        def build():
            src = _require_source(inst)
            adj = [[] for _ in range(inst.n + 1)]
            for (u, v) in inst.final_edges():
                adj[u].append(v)
                adj[v].append(u)
            dist = [None] * (inst.n + 1)
            dist[src] = 0
            queue = deque([src])
            while queue:
                v = queue.popleft()
                for u in adj[v]:
                    if dist[u] is None:
                        dist[u] = dist[v] + 1
                        queue.append(u)
            return dist
        return _cached(inst, f"bfs:{inst.source}", build)

    def _horizon(self, inst) -> int:
        dist = self._distances(inst)
        return max(d for d in dist[1:] if d is not None) if any(
            d is not None for d in dist[1:]) else 0

    def _assemble(self, inst, Dhat: int, labels, p: int) -> ProofTranscript:
        n, t, s = self.n, self.sc.t, self.sc.s
        src = _require_source(inst)
        tr = ProofTranscript()
        tr.add_scalars("horizon", [Dhat])
        if labels is not None:
            tr.add_scalars("distance_labels", labels)
        Amat = _adj_matrix(inst, p)
        q = Amat[src - 1].copy()
        tr.add_scalars("source_degrees", q.tolist())
        Dt = impulse_block(np.arange(1, 2 * t), t, p)
        Agrid = np.zeros((t, s, n), dtype=np.int64)
        for v in range(1, n + 1):
            xv, yv = self.sc.shape(v)
            Agrid[xv - 1, yv - 1, :] = Amat[v - 1]
        Avals = np.einsum('wx,xyu->wyu', Dt, Agrid) % p
        ball = {src} | {int(u) + 1 for u in np.flatnonzero(q)
                        if int(u) + 1 != src}
        wt = 2 * t - 1
        chi = np.zeros((wt, s), dtype=np.int64)
        for _ in range(Dhat):
            chi[:] = 0
            for v in ball:
                xv, yv = self.sc.shape(v)
                chi[:, yv - 1] = (chi[:, yv - 1] + Dt[:, xv - 1]) % p
            pvals = np.einsum('wy,wyu->wu', chi, Avals) % p
            tr.add_coeffs("ball_poly", coeffs_from_values_nd(pvals, p))
            ind = np.zeros(n, dtype=np.int64)
            ind[[v - 1 for v in ball]] = 1
            q = Amat @ ind % p
            tr.add_scalars("round_degrees", q.tolist())
            ball = {src} | {int(u) + 1 for u in np.flatnonzero(q)}
        return tr

    def prove(self, inst, p: int) -> ProofTranscript:
        dist = self._distances(inst)
        Dhat = self._horizon(inst)
        labels = [dist[v] if dist[v] is not None else Dhat + 1
                  for v in range(1, inst.n + 1)]
        return self._assemble(inst, Dhat, labels, p)

    def hcost_bound(self, inst) -> int:
        Dhat = self._horizon(inst)
        n, wt = self.n, 2 * self.sc.t - 1
        return 1 + 2 * n + Dhat * (wt * n + n)

    def vcost_bound(self, inst) -> int:
        return 2 * self.sc.s + 16

    # verifier ----------------------------------------------------------

    def run_verifier(self, inst, reader, p, rng, meter):
        n, t, s = self.n, self.sc.t, self.sc.s
        src = _require_source(inst)
        _check_numpy_modulus(p)
        r1, r2 = fe_random(rng, p), fe_random(rng, p)
        beta = fe_random(rng, p)
        b0 = fe_random(rng, p)
        b1, b2 = fe_random(rng, p), fe_random(rng, p)
        i1 = np.array(impulse_table(r1, t, p), dtype=np.int64)
        impn = np.array(impulse_table(r2, n, p), dtype=np.int64)
        b0pow = np.array([pow(b0, v, p) for v in range(1, n + 1)],
                         dtype=np.int64)
        b1pow = [pow(b1, v, p) for v in range(1, n + 1)]
        betapow = np.array([pow(beta, v, p) for v in range(1, n + 1)],
                           dtype=np.int64)
        asketch = np.zeros(s, dtype=np.int64)
        ball = np.zeros(s, dtype=np.int64)
        meter.alloc("adjacency_line", s)
        meter.alloc("ball_line", s)
        meter.alloc("registers", 16)
        g0 = 0
        for (u, v, delta) in _edge_tokens(inst):
            d_ = delta % p
            xu, yu = self.sc.shape(u)
            xv, yv = self.sc.shape(v)
            asketch[yu - 1] = (asketch[yu - 1]
                               + d_ * i1[xu - 1] % p * impn[v - 1]) % p
            asketch[yv - 1] = (asketch[yv - 1]
                               + d_ * i1[xv - 1] % p * impn[u - 1]) % p
            if u == src:
                g0 = (g0 + d_ * int(b0pow[v - 1])) % p
            if v == src:
                g0 = (g0 + d_ * int(b0pow[u - 1])) % p

        Dhat = reader.scalar("horizon")
        if not 0 <= Dhat <= max(n - 1, 0):
            raise RejectError("distance horizon out of range")
        b2pow = [pow(b2, d, p) for d in range(Dhat + 2)]
        span = [0] * (Dhat + 2)
        for d in range(Dhat, 0, -1):
            span[d] = (span[d + 1] + b2pow[d]) % p
        labels = reader.scalars("distance_labels", n)
        value = []
        phi_hat = 0
        for v in range(1, n + 1):
            lab = int(labels[v - 1])
            if not 0 <= lab <= Dhat + 1:
                raise RejectError("distance label out of range")
            if (lab == 0) != (v == src):
                raise RejectError("label zero must mark the source alone")
            value.append(lab if lab <= Dhat else None)
            phi_hat = (phi_hat + b1pow[v - 1] * span[max(1, lab)]) % p

        q0 = reader.scalars("source_degrees", n) % p
        if int((q0 * b0pow % p).sum() % p) != g0:
            raise RejectError("source degree row does not match the stream")
        xs, ys = self.sc.shape(src)
        ball[ys - 1] = i1[xs - 1]
        psi_prev = b1pow[src - 1]
        psi_cur = psi_prev
        for u in range(1, n + 1):
            if u != src and q0[u - 1]:
                xu, yu = self.sc.shape(u)
                ball[yu - 1] = (ball[yu - 1] + i1[xu - 1]) % p
                psi_cur = (psi_cur + b1pow[u - 1]) % p
        phi = b2pow[1] * psi_cur % p if Dhat >= 1 else 0

        S_X = power_sums(t, 2 * t - 1, p)
        tau = np.zeros(n, dtype=np.int64)
        up = np.ones(n, dtype=np.int64)
        base = np.arange(1, n + 1, dtype=np.int64) % p
        for j in range(n):
            tau[j] = int((up * betapow % p).sum() % p)
            up = up * base % p

        wt = 2 * t - 1
        for d in range(1, Dhat + 1):
            C = reader.coeffs("ball_poly", (wt, n)) % p
            rhs = int((ball * asketch % p).sum() % p)
            if nd_eval(C, (r1, r2), p) != rhs:
                raise RejectError(
                    f"round {d}: ball polynomial wrong at random point")
            rows = (S_X[:, None] * C % p) * tau[None, :] % p
            link = int((rows.sum(axis=1) % p).sum() % p)
            qd = reader.scalars("round_degrees", n) % p
            if int((qd * betapow % p).sum() % p) != link:
                raise RejectError(f"round {d}: degree fingerprints disagree")
            psi_prev = psi_cur
            ball[:] = 0
            ball[ys - 1] = i1[xs - 1]
            psi_cur = b1pow[src - 1]
            for u in range(1, n + 1):
                if u != src and qd[u - 1]:
                    xu, yu = self.sc.shape(u)
                    ball[yu - 1] = (ball[yu - 1] + i1[xu - 1]) % p
                    psi_cur = (psi_cur + b1pow[u - 1]) % p
            if d + 1 <= Dhat:
                phi = (phi + b2pow[d + 1] * psi_cur) % p

        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        if psi_cur != psi_prev:
            raise RejectError("ball still growing at the claimed horizon")
        if phi != phi_hat:
            raise RejectError("labels do not match the discovered balls")
        return tuple(value)

    # adversary ---------------------------------------------------------

    def mutate_output(self, inst, transcript, p, rng):
        src = _require_source(inst)
        out = _clone_transcript(transcript)
        Dhat = int(out.blocks[0].values[0])
        blk = out.blocks[1]
        cands = []
        for v in range(1, inst.n + 1):
            if v == src:
                continue
            lab = int(blk.values[v - 1])
            alts = [x for x in range(1, Dhat + 2) if x != lab]
            if alts:
                cands.append((v, alts))
        if not cands:
            return None
        v, alts = cands[rng.randrange(len(cands))]
        blk.values[v - 1] = alts[rng.randrange(len(alts))]
        return out


@register
class StPath(SsspUnweighted):
    """Source-to-target distance; rounds stop at the first target hit.

    Same machinery as the full-labels scheme minus the label block: the
    answer is read off the first degree vector with a nonzero target
    entry. An unreachable target is only ever declared through the
    stabilization check, and surfaces as a reject verdict.
    """

    name = "stpath"
    output_kind = "value"

    def oracle_value(self, inst):
        if inst.target is None:
            raise ValueError("scheme needs a target vertex in the header")
        return oracle_bfs(inst)[inst.target]

    def _claimed_horizon(self, inst) -> int:
        dist = self._distances(inst)
        K = dist[inst.target]
        if inst.target == inst.source:
            return 0
        if K is not None:
            return K - 1
        return self._horizon(inst)

    def prove(self, inst, p: int) -> ProofTranscript:
        if inst.target is None:
            raise ValueError("scheme needs a target vertex in the header")
        return self._assemble(inst, self._claimed_horizon(inst), None, p)

    def hcost_bound(self, inst) -> int:
        n, wt = self.n, 2 * self.sc.t - 1
        return 1 + n + self._claimed_horizon(inst) * (wt * n + n)

    def run_verifier(self, inst, reader, p, rng, meter):
        n, t, s = self.n, self.sc.t, self.sc.s
        src = _require_source(inst)
        vt = inst.target
        if vt is None:
            raise ValueError("scheme needs a target vertex in the header")
        _check_numpy_modulus(p)
        r1, r2 = fe_random(rng, p), fe_random(rng, p)
        beta = fe_random(rng, p)
        b0 = fe_random(rng, p)
        b1 = fe_random(rng, p)
        i1 = np.array(impulse_table(r1, t, p), dtype=np.int64)
        impn = np.array(impulse_table(r2, n, p), dtype=np.int64)
        b0pow = np.array([pow(b0, v, p) for v in range(1, n + 1)],
                         dtype=np.int64)
        b1pow = [pow(b1, v, p) for v in range(1, n + 1)]
        betapow = np.array([pow(beta, v, p) for v in range(1, n + 1)],
                           dtype=np.int64)
        asketch = np.zeros(s, dtype=np.int64)
        ball = np.zeros(s, dtype=np.int64)
        meter.alloc("adjacency_line", s)
        meter.alloc("ball_line", s)
        meter.alloc("registers", 16)
        g0 = 0
        for (u, v, delta) in _edge_tokens(inst):
            d_ = delta % p
            xu, yu = self.sc.shape(u)
            xv, yv = self.sc.shape(v)
            asketch[yu - 1] = (asketch[yu - 1]
                               + d_ * i1[xu - 1] % p * impn[v - 1]) % p
            asketch[yv - 1] = (asketch[yv - 1]
                               + d_ * i1[xv - 1] % p * impn[u - 1]) % p
            if u == src:
                g0 = (g0 + d_ * int(b0pow[v - 1])) % p
            if v == src:
                g0 = (g0 + d_ * int(b0pow[u - 1])) % p

        Dhat = reader.scalar("horizon")
        if not 0 <= Dhat <= max(n - 1, 0):
            raise RejectError("distance horizon out of range")
        q0 = reader.scalars("source_degrees", n) % p
        if int((q0 * b0pow % p).sum() % p) != g0:
            raise RejectError("source degree row does not match the stream")
        hit = 0 if vt == src else None
        if hit is None and q0[vt - 1]:
            hit = 1
        xs, ys = self.sc.shape(src)
        ball[ys - 1] = i1[xs - 1]
        psi_prev = b1pow[src - 1]
        psi_cur = psi_prev
        for u in range(1, n + 1):
            if u != src and q0[u - 1]:
                xu, yu = self.sc.shape(u)
                ball[yu - 1] = (ball[yu - 1] + i1[xu - 1]) % p
                psi_cur = (psi_cur + b1pow[u - 1]) % p

        S_X = power_sums(t, 2 * t - 1, p)
        tau = np.zeros(n, dtype=np.int64)
        up = np.ones(n, dtype=np.int64)
        base = np.arange(1, n + 1, dtype=np.int64) % p
        for j in range(n):
            tau[j] = int((up * betapow % p).sum() % p)
            up = up * base % p

        wt = 2 * t - 1
        for d in range(1, Dhat + 1):
            C = reader.coeffs("ball_poly", (wt, n)) % p
            rhs = int((ball * asketch % p).sum() % p)
            if nd_eval(C, (r1, r2), p) != rhs:
                raise RejectError(
                    f"round {d}: ball polynomial wrong at random point")
            rows = (S_X[:, None] * C % p) * tau[None, :] % p
            link = int((rows.sum(axis=1) % p).sum() % p)
            qd = reader.scalars("round_degrees", n) % p
            if int((qd * betapow % p).sum() % p) != link:
                raise RejectError(f"round {d}: degree fingerprints disagree")
            if hit is None and qd[vt - 1]:
                hit = d + 1
            psi_prev = psi_cur
            ball[:] = 0
            ball[ys - 1] = i1[xs - 1]
            psi_cur = b1pow[src - 1]
            for u in range(1, n + 1):
                if u != src and qd[u - 1]:
                    xu, yu = self.sc.shape(u)
                    ball[yu - 1] = (ball[yu - 1] + i1[xu - 1]) % p
                    psi_cur = (psi_cur + b1pow[u - 1]) % p

        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        if hit is not None:
            return int(hit)
        if psi_cur != psi_prev:
            raise RejectError("path status unresolved at the claimed horizon")
        raise RejectError("unreachable: ball stabilized before the target")

    def mutate_output(self, inst, transcript, p, rng):
        src, vt = inst.source, inst.target
        if vt == src:
            return None
        out = _clone_transcript(transcript)
        qblocks = [b for b in out.blocks
                   if b.label in ("source_degrees", "round_degrees")]
        K = self._distances(inst)[vt]
        if K is not None and 2 <= K <= len(qblocks):
            qblocks[K - 2].values[vt - 1] = 1
        else:
            blk = qblocks[-1]
            blk.values[vt - 1] = (int(blk.values[vt - 1]) + 1) % p
        return out


@register
class SsspWeightedTurnstile(Scheme):
    """Weighted distances where updates accumulate into edge weights.

    The verifier spends a cell per vertex: one sketch of each weight
    row, the label table it fills itself, and the source row kept
    exactly for bootstrapping the first ball. Round d sends one
    univariate polynomial, the sum of weight selectors over vertices
    that could relax a neighbor to distance d+1; the verifier checks it
    at a random point against its row sketches, then reads new labels
    off the vertex grid values.
    """

    name = "sssp-wturnstile"
    output_kind = "labels"
    model = "turnstile"
    mutations = ("coefficient_flip", "block_truncation", "output_value_lie")

    def __init__(self, n: int, W: int):
        self.n = n
        self.W = W

    @classmethod
    def configure(cls, inst, t=None, s=None, **kw):
        return cls(inst.n, inst.W)

    def field_config(self, inst, p=None):
        if p is not None:
            return FieldConfig(p)
        return FieldConfig.auto_from_n(inst.n, D=inst.W * (inst.n - 1),
                                       W=inst.W)

    def oracle_value(self, inst):
        return tuple(oracle_dijkstra(inst)[1:])

    # prover ------------------------------------------------------------

    def _distances(self, inst) -> list:
        def build():
            src = _require_source(inst)
            dmap = nx.single_source_dijkstra_path_length(
                _mult_weighted_graph(inst), src)
            dist = [None] * (inst.n + 1)
            for v, d in dmap.items():
                dist[v] = int(d)
            return dist
        return _cached(inst, f"wdist:{inst.source}", build)

    def _horizon(self, inst) -> int:
        dist = self._distances(inst)
        return max(d for d in dist[1:] if d is not None) if any(
            d is not None for d in dist[1:]) else 0

    def _weight_matrix(self, inst) -> np.ndarray:
        def build():
            n = inst.n
            Wmat = np.zeros((n, n), dtype=np.int64)
            for (u, v), c in inst.final_edges().items():
                Wmat[u - 1, v - 1] = c
                Wmat[v - 1, u - 1] = c
            return Wmat
        return _cached(inst, "wmat", build)

    def prove(self, inst, p: int) -> ProofTranscript:
        n, W = self.n, self.W
        dist = self._distances(inst)
        Dhat = self._horizon(inst)
        tr = ProofTranscript()
        tr.add_scalars("horizon", [Dhat])
        M = W * (n - 1) + 1
        Wmat = self._weight_matrix(inst) % p
        IB = impulse_block(np.arange(1, M + 1), n, p)
        Vals = mat_mulmod(IB, Wmat, p)
        for d in range(1, Dhat):
            pv = np.zeros(M, dtype=np.int64)
            for v in range(1, n + 1):
                dv = dist[v]
                if dv is None or dv > d:
                    continue
                w = d + 1 - dv
                if 1 <= w <= W:
                    pv = (pv + _weight_impulse_vec(w, Vals[:, v - 1],
                                                   W, p)) % p
            tr.add_coeffs("round_poly", coeffs_from_values_1d(pv, p))
        crossing = [(undirected_key(u, v, n), 1)
                    for u in range(1, n + 1) for v in range(u + 1, n + 1)
                    if (dist[u] is None) != (dist[v] is None)]
        weights = [(undirected_key(u, v, n), c)
                   for (u, v), c in inst.final_edges().items()]
        tr.add_coeffs("frontier_inter", line_check_help(
            dense_indicator(weights, (n, n)),
            dense_indicator(crossing, (n, n)), p, "intersect"))
        return tr

    def hcost_bound(self, inst) -> int:
        n, W = self.n, self.W
        M = W * (n - 1) + 1
        return 1 + max(self._horizon(inst) - 1, 0) * M + (2 * n - 1)

    def vcost_bound(self, inst) -> int:
        return 5 * self.n + 16

    # verifier ----------------------------------------------------------

    def run_verifier(self, inst, reader, p, rng, meter):
        n, W = self.n, self.W
        src = _require_source(inst)
        _check_numpy_modulus(p)
        rho = fe_random(rng, p)
        rho_e = fe_random(rng, p)
        impn = np.array(impulse_table(rho, n, p), dtype=np.int64)
        row = np.zeros(n, dtype=np.int64)
        wrow = np.zeros(n, dtype=np.int64)
        inter = LineCheck((n, n), rho_e, p, "intersect")
        meter.alloc("distance_labels", n)
        meter.alloc("row_sketch", n)
        meter.alloc("source_row", n)
        meter.alloc("frontier_lines", inter.cells)
        meter.alloc("registers", 16)
        for (u, v, delta) in _edge_tokens(inst, models=("turnstile",)):
            d_ = delta % p
            row[u - 1] = (row[u - 1] + d_ * impn[v - 1]) % p
            row[v - 1] = (row[v - 1] + d_ * impn[u - 1]) % p
            if u == src:
                wrow[v - 1] += delta
            if v == src:
                wrow[u - 1] += delta
            inter.add_left(undirected_key(u, v, n), delta)

        Dhat = reader.scalar("horizon")
        if not 0 <= Dhat <= W * (n - 1):
            raise RejectError("distance horizon out of range")
        dist = [None] * (n + 1)
        dist[src] = 0
        for u in range(1, n + 1):
            if u != src and wrow[u - 1] == 1:
                dist[u] = 1
        meter.free("source_row")

        M = W * (n - 1) + 1
        meter.alloc("round_values", n)
        for d in range(1, Dhat):
            C = reader.coeffs("round_poly", (M,)) % p
            grid, pt = _eval_on_vertices(C, rho, n, p)
            rhs = 0
            for v in range(1, n + 1):
                dv = dist[v]
                if dv is None or dv > d:
                    continue
                w = d + 1 - dv
                if 1 <= w <= W:
                    rhs = (rhs + _weight_impulse(w, int(row[v - 1]),
                                                 W, p)) % p
            if pt != rhs:
                raise RejectError(
                    f"round {d}: relaxation polynomial wrong at random point")
            for u in range(1, n + 1):
                if dist[u] is None and grid[u - 1]:
                    dist[u] = d + 1
        meter.free("round_values")
        meter.free("row_sketch")

        for u in range(1, n + 1):
            for v in range(u + 1, n + 1):
                if (dist[u] is None) != (dist[v] is None):
                    inter.add_right(undirected_key(u, v, n))
        if inter.finish(reader.coeffs("frontier_inter", (2 * n - 1,)),
                        "frontier") != 0:
            raise RejectError("an edge leaves the discovered region")
        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        return tuple(dist[1:])

    # adversary ---------------------------------------------------------

    def mutate_output(self, inst, transcript, p, rng):
        n, W = self.n, self.W
        src = _require_source(inst)
        dist = self._distances(inst)
        Dhat = int(transcript.blocks[0].values[0])
        if Dhat < 2:
            return None
        cands = [u for u in range(1, n + 1)
                 if u != src and (dist[u] is None or dist[u] > 2)]
        if not cands:
            return None
        u = cands[rng.randrange(len(cands))]
        out = _clone_transcript(transcript)
        blk = next(b for b in out.blocks if b.label == "round_poly")
        M = W * (n - 1) + 1
        vals = np.zeros(M, dtype=np.int64)
        vals[u - 1] = 1
        blk.values = (np.asarray(blk.values, dtype=np.int64)
                      + coeffs_from_values_1d(vals, p)) % p
        return out


@register
class SsspWeightedVanilla(Scheme):
    """Weighted distances with one row sketch per weight class.

    Labels and parent pointers arrive first; parents induce weighted
    edges that must sit inside the stream (containment check), which
    upper-bounds every label. Round polynomials are label-relaxation
    counts whose point check against the per-weight sketches is an
    exact identity, and a nonzero count at a vertex forces its label
    down, which lower-bounds the labels. A final intersection proves
    the unlabeled remainder is cut off.
    """

    name = "sssp-wvanilla"
    output_kind = "labels"
    model = "weighted"
    mutations = ("coefficient_flip", "block_truncation", "output_value_lie",
                 "qd_scalar_flip")
    scalar_flip_labels = ("distance_labels", "parent_labels")

    def __init__(self, n: int, W: int):
        self.n = n
        self.W = W

    @classmethod
    def configure(cls, inst, t=None, s=None, **kw):
        return cls(inst.n, inst.W)

    def field_config(self, inst, p=None):
        if p is not None:
            return FieldConfig(p)
        return FieldConfig.auto_from_n(inst.n, D=inst.W * (inst.n - 1),
                                       W=inst.W)

    def oracle_value(self, inst):
        return tuple(oracle_dijkstra(inst)[1:])

    # prover ------------------------------------------------------------

    def _graph(self, inst) -> nx.Graph:
        def build():
            G = nx.Graph()
            G.add_nodes_from(range(1, inst.n + 1))
            for (u, v, w) in inst.weighted_edges():
                G.add_edge(u, v, weight=int(w))
            return G
        return _cached(inst, "wvgraph", build)

    def _labels(self, inst):
        def build():
            src = _require_source(inst)
            preds, dmap = nx.dijkstra_predecessor_and_distance(
                self._graph(inst), src)
            dist = [None] * (inst.n + 1)
            prev = [0] * (inst.n + 1)
            for v, d in dmap.items():
                dist[v] = int(d)
            for v in range(1, inst.n + 1):
                if v != src and dist[v] is not None:
                    prev[v] = min(preds[v])
            return dist, prev
        return _cached(inst, f"wvlabels:{inst.source}", build)

    def _weight_matrix(self, inst) -> np.ndarray:
        def build():
            n = inst.n
            Wmat = np.zeros((n, n), dtype=np.int64)
            for (u, v, w) in inst.weighted_edges():
                Wmat[u - 1, v - 1] = w
                Wmat[v - 1, u - 1] = w
            return Wmat
        return _cached(inst, "wvmat", build)

    def _assemble(self, inst, dist, prev, p, zero_entry=None):
        n, W = self.n, self.W
        src = _require_source(inst)
        SENT = W * (n - 1) + 1
        finite = [d for d in dist[1:] if d is not None]
        Dhat = max(finite) if finite else 0
        tr = ProofTranscript()
        tr.add_scalars("distance_labels",
                       [dist[v] if dist[v] is not None else SENT
                        for v in range(1, n + 1)])
        tr.add_scalars("parent_labels", list(prev[1:]))
        Wmat = self._weight_matrix(inst)
        for d in range(Dhat):
            cv = np.zeros(n, dtype=np.int64)
            for v in range(1, n + 1):
                dv = dist[v]
                if dv is None or dv > d:
                    continue
                w = d + 1 - dv
                if 1 <= w <= W:
                    cv += (Wmat[v - 1] == w).astype(np.int64)
            if zero_entry is not None and zero_entry[0] == d:
                cv[zero_entry[1] - 1] = 0
            tr.add_coeffs("round_poly", coeffs_from_values_1d(cv % p, p))
        tree = [(weighted_key(prev[v], v, dist[v] - dist[prev[v]], n, W), 1)
                for v in range(1, n + 1)
                if v != src and dist[v] is not None]
        edges = [(weighted_key(u, v, w, n, W), 1)
                 for (u, v, w) in inst.weighted_edges()]
        wdims = (n * W, n)
        tr.add_coeffs("tree_subset", line_check_help(
            dense_indicator(tree, wdims),
            dense_indicator(edges, wdims), p, "subset"))
        crossing = [(undirected_key(u, v, n), 1)
                    for u in range(1, n + 1) for v in range(u + 1, n + 1)
                    if (dist[u] is None) != (dist[v] is None)]
        plain = [(undirected_key(u, v, n), 1)
                 for (u, v, w) in inst.weighted_edges()]
        tr.add_coeffs("frontier_inter", line_check_help(
            dense_indicator(plain, (n, n)),
            dense_indicator(crossing, (n, n)), p, "intersect"))
        return tr

    def prove(self, inst, p: int) -> ProofTranscript:
        dist, prev = self._labels(inst)
        return self._assemble(inst, dist, prev, p)

    def hcost_bound(self, inst) -> int:
        n, W = self.n, self.W
        dist, _ = self._labels(inst)
        finite = [d for d in dist[1:] if d is not None]
        Dhat = max(finite) if finite else 0
        return 2 * n + Dhat * n + (2 * n * W - 1) + (2 * n - 1)

    def vcost_bound(self, inst) -> int:
        return self.n * self.W + 8 * self.n + 16

    # verifier ----------------------------------------------------------

    def run_verifier(self, inst, reader, p, rng, meter):
        n, W = self.n, self.W
        src = _require_source(inst)
        _check_numpy_modulus(p)
        rho = fe_random(rng, p)
        rho_w = fe_random(rng, p)
        rho_e = fe_random(rng, p)
        impn = np.array(impulse_table(rho, n, p), dtype=np.int64)
        F = np.zeros((n, W), dtype=np.int64)
        sub = LineCheck((n * W, n), rho_w, p, "subset")
        inter = LineCheck((n, n), rho_e, p, "intersect")
        meter.alloc("weight_table", n * W)
        meter.alloc("labels", 2 * n)
        meter.alloc("tree_lines", sub.cells)
        meter.alloc("frontier_lines", inter.cells)
        meter.alloc("registers", 16)
        for (u, v, w) in _weighted_tokens(inst):
            F[u - 1, w - 1] = (F[u - 1, w - 1] + impn[v - 1]) % p
            F[v - 1, w - 1] = (F[v - 1, w - 1] + impn[u - 1]) % p
            sub.add_right(weighted_key(u, v, w, n, W))
            inter.add_left(undirected_key(u, v, n))

        SENT = W * (n - 1) + 1
        labs = reader.scalars("distance_labels", n)
        prevs = reader.scalars("parent_labels", n)
        lab = [0] * (n + 1)
        for v in range(1, n + 1):
            lab[v] = int(labs[v - 1])
            if not 0 <= lab[v] <= SENT:
                raise RejectError("distance label out of range")
            if (lab[v] == 0) != (v == src):
                raise RejectError("label zero must mark the source alone")
        for v in range(1, n + 1):
            pv = int(prevs[v - 1])
            if v == src or lab[v] == SENT:
                if pv != 0:
                    raise RejectError("parent set on source or unreachable "
                                      "vertex")
                continue
            if not 1 <= pv <= n or pv == v:
                raise RejectError("parent label out of range")
            w = lab[v] - lab[pv]
            if not 1 <= w <= W:
                raise RejectError("implied tree weight out of range")
            sub.add_left(weighted_key(pv, v, w, n, W))

        Dhat = max((lab[v] for v in range(1, n + 1) if lab[v] < SENT),
                   default=0)
        meter.alloc("round_values", n)
        for d in range(Dhat):
            C = reader.coeffs("round_poly", (n,)) % p
            grid, pt = _eval_on_vertices(C, rho, n, p)
            rhs = 0
            for v in range(1, n + 1):
                if lab[v] == SENT or lab[v] > d:
                    continue
                w = d + 1 - lab[v]
                if 1 <= w <= W:
                    rhs = (rhs + int(F[v - 1, w - 1])) % p
            if pt != rhs:
                raise RejectError(
                    f"round {d}: relaxation count wrong at sketch point")
            for u in range(1, n + 1):
                if grid[u - 1] and lab[u] > d + 1:
                    raise RejectError(
                        f"round {d}: a label exceeds its relaxation round")
        meter.free("round_values")

        sub.finish(reader.coeffs("tree_subset", (2 * n * W - 1,)),
                   "parent edges")
        for u in range(1, n + 1):
            for v in range(u + 1, n + 1):
                if (lab[u] == SENT) != (lab[v] == SENT):
                    inter.add_right(undirected_key(u, v, n))
        if inter.finish(reader.coeffs("frontier_inter", (2 * n - 1,)),
                        "frontier") != 0:
            raise RejectError("an edge leaves the labeled region")
        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        return tuple(lab[v] if lab[v] < SENT else None
                     for v in range(1, n + 1))

    # adversary ---------------------------------------------------------

    def mutate_output(self, inst, transcript, p, rng):
        n, W = self.n, self.W
        src = _require_source(inst)
        dist, prev = self._labels(inst)
        Wmat = self._weight_matrix(inst)
        children = {prev[x] for x in range(1, n + 1)
                    if x != src and dist[x] is not None}
        cands = []
        for u in range(1, n + 1):
            if u == src or dist[u] is None or u in children:
                continue
            # second-best relaxation value, so no round between the true
            # label and the lie can expose the switch by itself
            relax = {}
            for v in range(1, n + 1):
                w = int(Wmat[u - 1, v - 1])
                if w and dist[v] is not None:
                    relax.setdefault(dist[v] + w, v)
            vals = sorted(relax)
            if len(vals) >= 2 and vals[1] <= W * (n - 1):
                cands.append((u, relax[vals[1]], vals[1]))
        if not cands:
            return None
        u, v, lie = cands[rng.randrange(len(cands))]
        dist2, prev2 = list(dist), list(prev)
        dist2[u], prev2[u] = lie, v
        return self._assemble(inst, dist2, prev2, p,
                              zero_entry=(dist[u] - 1, u))
