"""Certified graph predicates: matchings, independent sets, orderings,
connectivity.

These schemes wrap the set machinery around combinatorial certificates:

* maximum matching uses matching edges as the lower-bound witness and a
  vertex set plus component partition for the Tutte-Berge upper bound
  2k = |U| + n - odd(G - U);
* maximal independent set checks independence (no induced pairs) and
  maximality (a pointer into the set from every outside vertex);
* topological order counts prefix-to-next edges, which reaches the
  stream's edge total only when every edge points forward;
* acyclicity branches on a claimed verdict: an order certificate, or a
  cycle whose edges are checked against the stream;
* component counting verifies one spanning-tree block per component,
  with back-referencing records so the verifier never stores the tree.

Vertex lists that the verifier must check for distinctness are tied by
fingerprint to a strictly increasing copy, or to the full vertex set
when they must partition it. Edge containment rides on line-restricted
subset checks; pair counts ride on the bilinear pair sketch.
"""

from __future__ import annotations

import heapq
import math

import networkx as nx
import numpy as np

from .edgecount import (LineArray, PairSketch, member_matrix, pair_charge,
                        vertex_grid_index)
from .extension import (ShapeConfig, coeffs_from_values_nd, grid_bump,
                        impulse_block, nd_eval, nd_grid_sum, resolve_shape)
from .field import fe_random
from .oracle import (oracle_acyclic, oracle_components, oracle_is_mis,
                     oracle_is_toposort, oracle_max_matching)
from .protocol import Scheme, register, _clone_transcript
from .setops import (Fingerprint, LineCheck, dense_indicator, directed_key,
                     line_check_dims, line_check_help, monomial,
                     undirected_key)
from .stream import EdgeToken, ProofTranscript, RejectError


def _edge_tokens(inst, models=("turnstile", "vanilla")):
    if inst.model not in models:
        raise ValueError(f"scheme cannot run on {inst.model} input")
    for tok in inst.tokens:
        if isinstance(tok, EdgeToken):
            yield tok.u, tok.v, tok.delta
        else:
            raise ValueError("unexpected query-set tokens in input")


def inner_split(n: int, s: int):
    """Pair-sketch grid whose table fits in about s cells."""
    sp = max(1, math.isqrt(s))
    tp = -(-n // sp)
    return tp, sp


def _cached(inst, key: str, build):
    cache = getattr(inst, "_prover_cache", None)
    if cache is None:
        cache = {}
        setattr(inst, "_prover_cache", cache)
    if key not in cache:
        cache[key] = build()
    return cache[key]


def _final_graph(inst) -> nx.Graph:
    def build():
        G = nx.Graph()
        G.add_nodes_from(range(1, inst.n + 1))
        G.add_edges_from(inst.final_edges())
        return G
    return _cached(inst, "graph", build)


def _matching_edges(G) -> list:
    m = nx.max_weight_matching(G, maxcardinality=True)
    return sorted((min(a, b), max(a, b)) for a, b in m)


def _deficiency_witness(inst) -> list:
    """Vertex set attaining the matching-number duality minimum.

    Standard structure argument: the witness is the neighborhood of the
    inessential vertices (those avoided by some maximum matching) minus
    those vertices themselves.
    """
    def build():
        G = _final_graph(inst)
        base = len(nx.max_weight_matching(G, maxcardinality=True))
        dset = []
        for v in G:
            H = G.copy()
            H.remove_node(v)
            if len(nx.max_weight_matching(H, maxcardinality=True)) == base:
                dset.append(v)
        nbrs = set()
        for v in dset:
            nbrs.update(G.neighbors(v))
        return sorted(nbrs - set(dset))
    return _cached(inst, "witness", build)


def _components_outside(inst, witness) -> list:
    G = _final_graph(inst)
    H = G.subgraph([v for v in G if v not in set(witness)])
    return sorted((sorted(c) for c in nx.connected_components(H)),
                  key=lambda c: c[0])


def _adj_matrix(inst, p, directed=False) -> np.ndarray:
    n = inst.n
    adj = np.zeros((n, n), dtype=np.int64)
    if directed:
        for (u, v) in inst.directed_edges():
            adj[u - 1][v - 1] += 1
    else:
        for (u, v), c in inst.final_edges().items():
            adj[u - 1][v - 1] = c % p
            adj[v - 1][u - 1] = c % p
    return adj % p


def _edge_key_items(inst, n):
    return [(undirected_key(u, v, n), c)
            for (u, v), c in inst.final_edges().items()]


class _SplitMixin:
    """Schemes carrying a pair sketch on the inner split plus line checks
    of width s over the edge-key universe."""

    def __init__(self, n: int, t: int, s: int):
        self.n = n
        self.t = t
        self.s = s
        self.tp, self.sp = inner_split(n, s)
        self.isc = ShapeConfig(n, self.tp, self.sp)
        self.edge_dims = line_check_dims(n * n, s)

    @classmethod
    def configure(cls, inst, t=None, s=None, **kw):
        t, s = resolve_shape(inst.n, t, s)
        return cls(inst.n, t, s)

    def _charge_help(self, inst, member_lists, p, directed=False):
        """Summed pair polynomial over the given member lists."""
        tp = self.tp
        Dt = impulse_block(np.arange(1, 2 * tp), tp, p)
        x_idx, y_idx = vertex_grid_index(self.isc)
        adj = _adj_matrix(inst, p, directed=directed)
        wt = 2 * tp - 1
        P = np.zeros((wt, wt), dtype=np.int64)
        for members in member_lists:
            if not members:
                continue
            G = member_matrix(members, self.isc, Dt, x_idx, y_idx, p)
            P = (P + pair_charge(G, adj, G, p)) % p
        return coeffs_from_values_nd(P, p)


@register
class MatchingFrugal(_SplitMixin, Scheme):
    """Maximum matching size with s-cell verifier state.

    Transcript: k, the matching, its endpoints sorted, the duality
    witness set, the component partition of the rest, then a containment
    polynomial for the matching and the two pair-count polynomials whose
    equality pins the partition to the true components.
    """

    name = "maxmatch-frugal"
    model = "vanilla"
    mutations = ("coefficient_flip", "block_truncation", "output_value_lie",
                 "vertex_list_permutation_lie")

    def oracle_value(self, inst):
        return oracle_max_matching(inst)

    def hcost_bound(self, inst) -> int:
        k = oracle_max_matching(inst)
        H = self.edge_dims[0]
        return 2 + 4 * k + inst.n + (2 * H - 1) + 2 * (2 * self.tp - 1) ** 2

    def vcost_bound(self, inst) -> int:
        return 3 * self.s + 4 * self.sp + 24

    # prover ------------------------------------------------------------

    def _certificate(self, inst):
        matching = _cached(inst, "matching",
                           lambda: _matching_edges(_final_graph(inst)))
        witness = _deficiency_witness(inst)
        blocks = _components_outside(inst, witness)
        return matching, witness, blocks

    def prove(self, inst, p: int) -> ProofTranscript:
        matching, witness, blocks = self._certificate(inst)
        return self._assemble(inst, matching, witness, blocks, p)

    def _assemble(self, inst, matching, witness, blocks, p,
                  forge_pair_gap: int = 0) -> ProofTranscript:
        n = inst.n
        tr = ProofTranscript()
        tr.add_scalars("k", [len(matching)])
        flat = [v for e in matching for v in e]
        tr.add_vertices("matching", flat)
        tr.add_vertices("endpoints", sorted(flat))
        tr.add_vertices("witness", witness)
        tr.add_scalars("component_count", [len(blocks)])
        for blk in blocks:
            tr.add_vertices("component", blk)
        sub = dense_indicator([(undirected_key(a, b, n), 1)
                               for (a, b) in matching], self.edge_dims)
        sup = dense_indicator(_edge_key_items(inst, n), self.edge_dims)
        tr.add_coeffs("matching_subset",
                      line_check_help(sub, sup, p, "subset"))
        outside = [v for v in range(1, n + 1) if v not in set(witness)]
        tr.add_coeffs("inside_pairs", self._charge_help(inst, [outside], p))
        block_poly = self._charge_help(inst, blocks, p)
        if forge_pair_gap:
            tp = self.tp
            bump = np.outer(grid_bump(tp, p), grid_bump(tp, p))
            block_poly[:tp, :tp] = (block_poly[:tp, :tp]
                                    + forge_pair_gap * bump) % p
        tr.add_coeffs("block_pairs", block_poly)
        return tr

    # verifier ----------------------------------------------------------

    def run_verifier(self, inst, reader, p, rng, meter):
        n, tp = inst.n, self.tp
        r1, r2 = fe_random(rng, p), fe_random(rng, p)
        rho = fe_random(rng, p)
        gamma = fe_random(rng, p)
        sketch = PairSketch(self.isc, r1, r2, p)
        sub = LineCheck(self.edge_dims, rho, p, "subset")
        out1 = LineArray(self.isc, r1, p)
        out2 = LineArray(self.isc, r2, p)
        blk1 = LineArray(self.isc, r1, p)
        blk2 = LineArray(self.isc, r2, p)
        meter.alloc("pair_sketch", sketch.cells)
        meter.alloc("subset_lines", sub.cells)
        meter.alloc("set_lines", out1.cells * 4)
        meter.alloc("registers", 12)
        for (u, v, delta) in _edge_tokens(inst):
            sketch.add_sym(u, v, delta)
            sub.add_right(undirected_key(u, v, n), delta)
        for v in range(1, n + 1):
            out1.add(v)
            out2.add(v)

        k = reader.scalar("k")
        if not 0 <= k <= n // 2:
            raise RejectError("claimed matching size out of range")
        fp_flat = Fingerprint(gamma, p)
        pairs = reader.vertices("matching", 2 * k)
        for i in range(k):
            a, b = int(pairs[2 * i]), int(pairs[2 * i + 1])
            if not (1 <= a <= n and 1 <= b <= n) or a == b:
                raise RejectError("bad matching pair")
            sub.add_left(undirected_key(a, b, n))
            fp_flat.add(a)
            fp_flat.add(b)
        fp_sorted = Fingerprint(gamma, p)
        prev = 0
        for v in reader.vertices("endpoints", 2 * k).tolist():
            if not prev < v <= n:
                raise RejectError("endpoint list not strictly increasing")
            prev = v
            fp_sorted.add(v)
        if fp_sorted.value != fp_flat.value:
            raise RejectError("endpoint list does not match the matching")

        fp_part = Fingerprint(gamma, p)
        fp_all = Fingerprint(gamma, p)
        for v in range(1, n + 1):
            fp_all.add(v)
        usize = 0
        for v in reader.vertices("witness").tolist():
            if not 1 <= v <= n:
                raise RejectError("witness vertex out of range")
            usize += 1
            fp_part.add(v)
            out1.add(v, -1)
            out2.add(v, -1)
        acc_inside = sketch.bilinear(out1.arr, out2.arr)

        cblocks = reader.scalar("component_count")
        if not 0 <= cblocks <= n:
            raise RejectError("component count out of range")
        odd = 0
        acc_blocks = 0
        for _ in range(cblocks):
            members = reader.vertices("component")
            blk1.arr[:] = 0
            blk2.arr[:] = 0
            for v in members.tolist():
                if not 1 <= v <= n:
                    raise RejectError("component vertex out of range")
                fp_part.add(v)
                blk1.add(v)
                blk2.add(v)
            odd += len(members) % 2
            acc_blocks = (acc_blocks
                          + sketch.bilinear(blk1.arr, blk2.arr)) % p
        if fp_part.value != fp_all.value:
            raise RejectError("witness and components do not partition V")
        if 2 * k != usize + n - odd:
            raise RejectError("duality count does not match claimed size")

        sub.finish(reader.coeffs("matching_subset",
                                 (2 * self.edge_dims[0] - 1,)),
                   "matching containment")
        wt = 2 * tp - 1
        t_in = reader.coeffs("inside_pairs", (wt, wt))
        if nd_eval(t_in, (r1, r2), p) != acc_inside:
            raise RejectError("outside-pair polynomial wrong at random point")
        total_in = nd_grid_sum(t_in, (tp, tp), p)
        t_blk = reader.coeffs("block_pairs", (wt, wt))
        if nd_eval(t_blk, (r1, r2), p) != acc_blocks:
            raise RejectError("block-pair polynomial wrong at random point")
        total_blk = nd_grid_sum(t_blk, (tp, tp), p)
        if total_in != total_blk:
            raise RejectError("components leave cross edges unaccounted")
        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        return k

    # lies ---------------------------------------------------------------

    def mutate_output(self, inst, transcript, p, rng):
        matching, witness, blocks = self._certificate(inst)
        if not matching:
            return None
        evens = [i for i, b in enumerate(blocks) if len(b) >= 2
                 and len(b) % 2 == 0]
        if not evens:
            return None
        # underclaim by one: drop a matched pair, split an even component
        # so the duality count still balances, patch the pair total
        matching = matching[:-1]
        blocks = [list(b) for b in blocks]
        tgt = blocks[rng.choice(evens)]
        lone = tgt.pop(rng.randrange(len(tgt)))
        blocks.append([lone])
        G = _final_graph(inst)
        gap = 2 * sum(1 for u in G.neighbors(lone) if u in set(tgt))
        return self._assemble(inst, matching, witness, blocks, p,
                              forge_pair_gap=gap)

    def mutate_vertices(self, inst, transcript, p, rng):
        out = _clone_transcript(transcript)
        blk = out.blocks[1]  # the matching ids
        if blk.values.size == 0:
            return None
        pos = rng.randrange(blk.values.size)
        old = int(blk.values[pos])
        repl = rng.choice([v for v in range(1, inst.n + 1) if v != old])
        blk.values[pos] = repl
        return out


@register
class MatchingLaconic(Scheme):
    """Maximum matching with short help; verifier may hold n-sized state.

    The matching, witness set and a spanning edge set for the rest are
    stored outright, so only edge containment and the two pair counts
    need polynomial help. Verifier space is a few arrays of width s
    (default n) plus the stored certificate.
    """

    name = "maxmatch-laconic"
    model = "vanilla"
    mutations = ("coefficient_flip", "block_truncation", "output_value_lie",
                 "vertex_list_permutation_lie")

    def __init__(self, n: int, s: int):
        self.n = n
        self.s = s
        self.edge_dims = line_check_dims(n * n, s)

    @classmethod
    def configure(cls, inst, t=None, s=None, **kw):
        if s is None:
            s = inst.n
        if s < 1:
            raise ValueError("line width must be positive")
        return cls(inst.n, s)

    def oracle_value(self, inst):
        return oracle_max_matching(inst)

    def _forest(self, inst, witness):
        def build():
            blocks = _components_outside(inst, witness)
            G = _final_graph(inst)
            edges = []
            for blk in blocks:
                T = nx.bfs_tree(G.subgraph(blk), blk[0])
                edges.extend((min(a, b), max(a, b)) for a, b in T.edges())
            return sorted(edges)
        return _cached(inst, "forest", build)

    def hcost_bound(self, inst) -> int:
        k = oracle_max_matching(inst)
        witness = _deficiency_witness(inst)
        f = len(self._forest(inst, witness))
        H = self.edge_dims[0]
        return 2 * k + len(witness) + 2 * f + 4 * (2 * H - 1)

    def vcost_bound(self, inst) -> int:
        return 3 * inst.n + 8 * self.s + 24

    def prove(self, inst, p: int) -> ProofTranscript:
        matching = _cached(inst, "matching",
                           lambda: _matching_edges(_final_graph(inst)))
        witness = _deficiency_witness(inst)
        forest = self._forest(inst, witness)
        return self._assemble(inst, matching, witness, forest, p)

    def _pair_universe(self, members) -> list:
        out = []
        mem = sorted(members)
        for i, u in enumerate(mem):
            for v in mem[i + 1:]:
                out.append((undirected_key(u, v, self.n), 1))
        return out

    def _assemble(self, inst, matching, witness, forest, p,
                  forge_gap: int = 0) -> ProofTranscript:
        n = self.n
        tr = ProofTranscript()
        tr.add_vertices("matching", [v for e in matching for v in e])
        tr.add_vertices("witness", witness)
        tr.add_vertices("forest", [v for e in forest for v in e])
        sup = dense_indicator(_edge_key_items(inst, n), self.edge_dims)
        sub_m = dense_indicator([(undirected_key(a, b, n), 1)
                                 for (a, b) in matching], self.edge_dims)
        tr.add_coeffs("matching_subset",
                      line_check_help(sub_m, sup, p, "subset"))
        sub_f = dense_indicator([(undirected_key(a, b, n), 1)
                                 for (a, b) in forest], self.edge_dims)
        tr.add_coeffs("forest_subset",
                      line_check_help(sub_f, sup, p, "subset"))
        outside = [v for v in range(1, n + 1) if v not in set(witness)]
        comp = self._forest_components(forest, outside)
        t1 = dense_indicator(self._pair_universe(outside), self.edge_dims)
        tr.add_coeffs("inside_inter",
                      line_check_help(sup, t1, p, "intersect"))
        items2: list = []
        for blk in comp:
            items2.extend(self._pair_universe(blk))
        t2 = dense_indicator(items2, self.edge_dims)
        g2 = line_check_help(sup, t2, p, "intersect")
        if forge_gap:
            H = self.edge_dims[0]
            bump = np.zeros(2 * H - 1, dtype=np.int64)
            bump[:H] = grid_bump(H, p)
            g2 = (g2 + forge_gap * bump) % p
        tr.add_coeffs("block_inter", g2)
        return tr

    @staticmethod
    def _forest_components(forest, outside) -> list:
        parent = {v: v for v in outside}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for (u, v) in forest:
            if u in parent and v in parent:
                parent[find(u)] = find(v)
        groups: dict = {}
        for v in outside:
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values(), key=lambda g: g[0])

    def run_verifier(self, inst, reader, p, rng, meter):
        n = self.n
        rho = fe_random(rng, p)
        sub_m = LineCheck(self.edge_dims, rho, p, "subset")
        sub_f = LineCheck(self.edge_dims, rho, p, "subset")
        int_1 = LineCheck(self.edge_dims, rho, p, "intersect")
        int_2 = LineCheck(self.edge_dims, rho, p, "intersect")
        meter.alloc("line_instances",
                    sub_m.cells + sub_f.cells + int_1.cells + int_2.cells)
        meter.alloc("stored_certificate", 3 * n)
        meter.alloc("registers", 8)
        for (u, v, delta) in _edge_tokens(inst):
            key = undirected_key(u, v, n)
            sub_m.add_right(key, delta)
            sub_f.add_right(key, delta)
            int_1.add_left(key, delta)
            int_2.add_left(key, delta)

        flat = reader.vertices("matching").tolist()
        if len(flat) % 2:
            raise RejectError("odd matching id list")
        k = len(flat) // 2
        seen: set = set()
        for i in range(k):
            a, b = flat[2 * i], flat[2 * i + 1]
            if not (1 <= a <= n and 1 <= b <= n) or a == b:
                raise RejectError("bad matching pair")
            if a in seen or b in seen:
                raise RejectError("matching endpoints collide")
            seen.update((a, b))
            sub_m.add_left(undirected_key(a, b, n))
        witness = reader.vertices("witness").tolist()
        wset = set(witness)
        if len(wset) != len(witness) or not all(1 <= v <= n for v in witness):
            raise RejectError("bad witness set")
        fl = reader.vertices("forest").tolist()
        if len(fl) % 2:
            raise RejectError("odd forest id list")
        outside = [v for v in range(1, n + 1) if v not in wset]
        parent = {v: v for v in outside}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i in range(len(fl) // 2):
            a, b = fl[2 * i], fl[2 * i + 1]
            if a in wset or b in wset or a == b \
                    or not (1 <= a <= n and 1 <= b <= n):
                raise RejectError("forest edge leaves the outside set")
            sub_f.add_left(undirected_key(a, b, n))
            parent[find(a)] = find(b)
        groups: dict = {}
        for v in outside:
            groups.setdefault(find(v), []).append(v)
        blocks = list(groups.values())
        odd = sum(len(b) % 2 for b in blocks)
        if 2 * k != len(wset) + n - odd:
            raise RejectError("duality count does not match claimed size")
        for i, u in enumerate(outside):
            for v in outside[i + 1:]:
                int_1.add_right(undirected_key(u, v, n))
        for blk in blocks:
            bs = sorted(blk)
            for i, u in enumerate(bs):
                for v in bs[i + 1:]:
                    int_2.add_right(undirected_key(u, v, n))

        H = self.edge_dims[0]
        sub_m.finish(reader.coeffs("matching_subset", (2 * H - 1,)),
                     "matching containment")
        sub_f.finish(reader.coeffs("forest_subset", (2 * H - 1,)),
                     "forest containment")
        m1 = int_1.finish(reader.coeffs("inside_inter", (2 * H - 1,)),
                          "outside pair count")
        m2 = int_2.finish(reader.coeffs("block_inter", (2 * H - 1,)),
                          "block pair count")
        if m1 != m2:
            raise RejectError("components leave cross edges unaccounted")
        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        return k

    def mutate_output(self, inst, transcript, p, rng):
        matching = _cached(inst, "matching",
                           lambda: _matching_edges(_final_graph(inst)))
        witness = _deficiency_witness(inst)
        forest = list(self._forest(inst, witness))
        if not matching or not forest:
            return None
        blocks = _components_outside(inst, witness)
        evens = [b for b in blocks if len(b) >= 2 and len(b) % 2 == 0]
        if not evens:
            return None
        blk = evens[0]
        G = _final_graph(inst)
        # detach a leaf of the block's tree to fake an extra odd component
        tree = [e for e in forest if e[0] in set(blk) or e[1] in set(blk)]
        degs: dict = {}
        for (a, b) in tree:
            degs[a] = degs.get(a, 0) + 1
            degs[b] = degs.get(b, 0) + 1
        leaves = [v for v, d in degs.items() if d == 1]
        if not leaves:
            return None
        lone = leaves[0]
        forest = [e for e in forest if lone not in e]
        gap = sum(1 for u in G.neighbors(lone) if u in set(blk) and u != lone)
        return self._assemble(inst, matching[:-1], witness, forest, p,
                              forge_gap=gap)

    def mutate_vertices(self, inst, transcript, p, rng):
        out = _clone_transcript(transcript)
        blk = out.blocks[0]
        if blk.values.size == 0:
            return None
        pos = rng.randrange(blk.values.size)
        old = int(blk.values[pos])
        blk.values[pos] = rng.choice([v for v in range(1, inst.n + 1)
                                      if v != old])
        return out


@register
class MaximalIndependentSet(_SplitMixin, Scheme):
    """Validates a claimed maximal independent set and outputs it.

    Independence: the pair polynomial over the set totals zero.
    Maximality: every outside vertex names an edge into the set; the
    named partners must avoid the outside set, whose identity is pinned
    by the partition fingerprint.
    """

    name = "mis"
    model = "vanilla"
    mutations = ("coefficient_flip", "block_truncation",
                 "vertex_list_permutation_lie")

    def __init__(self, n, t, s):
        super().__init__(n, t, s)
        self.vert_dims = line_check_dims(n, s)

    def oracle_value(self, inst):
        members = self._greedy(inst)
        return tuple(members)

    def output_correct(self, inst, value) -> bool:
        return oracle_is_mis(inst, value)

    def _greedy(self, inst) -> list:
        def build():
            G = _final_graph(inst)
            chosen: list = []
            taken: set = set()
            for v in range(1, inst.n + 1):
                if not (set(G.neighbors(v)) & taken):
                    chosen.append(v)
                    taken.add(v)
            return chosen
        return _cached(inst, "mis", build)

    def hcost_bound(self, inst) -> int:
        u = len(self._greedy(inst))
        H = self.edge_dims[0]
        Hv = self.vert_dims[0]
        return (inst.n + (inst.n - u) + (2 * self.tp - 1) ** 2
                + (2 * H - 1) + (2 * Hv - 1))

    def vcost_bound(self, inst) -> int:
        return 5 * self.s + 2 * self.sp + 24

    def _pointers(self, inst, members) -> list:
        G = _final_graph(inst)
        mem = set(members)
        out = []
        for v in range(1, inst.n + 1):
            if v in mem:
                continue
            inside = sorted(u for u in G.neighbors(v) if u in mem)
            if inside:
                out.append((v, inside[0]))
            else:
                nb = sorted(G.neighbors(v))
                out.append((v, nb[0] if nb else v % inst.n + 1))
        return out

    def _assemble(self, inst, members, p) -> ProofTranscript:
        n = self.n
        pointers = self._pointers(inst, members)
        tr = ProofTranscript()
        tr.add_vertices("independent_set", members)
        tr.add_vertices("pointers", [x for pr in pointers for x in pr])
        tr.add_coeffs("independent_pairs", self._charge_help(inst, [members], p))
        sup = dense_indicator(_edge_key_items(inst, n), self.edge_dims)
        sub = dense_indicator([(undirected_key(v, u, n), 1)
                               for (v, u) in pointers], self.edge_dims)
        tr.add_coeffs("pointer_subset",
                      line_check_help(sub, sup, p, "subset"))
        partners = dense_indicator([(u, 1) for (_, u) in pointers],
                                   self.vert_dims)
        sources = dense_indicator([(v, 1) for (v, _) in pointers],
                                  self.vert_dims)
        tr.add_coeffs("partner_inter",
                      line_check_help(partners, sources, p, "intersect"))
        return tr

    def prove(self, inst, p: int) -> ProofTranscript:
        return self._assemble(inst, self._greedy(inst), p)

    def run_verifier(self, inst, reader, p, rng, meter):
        n, tp = self.n, self.tp
        r1, r2 = fe_random(rng, p), fe_random(rng, p)
        rho, rho_v = fe_random(rng, p), fe_random(rng, p)
        gamma = fe_random(rng, p)
        sketch = PairSketch(self.isc, r1, r2, p)
        l1 = LineArray(self.isc, r1, p)
        l2 = LineArray(self.isc, r2, p)
        sub = LineCheck(self.edge_dims, rho, p, "subset")
        inter = LineCheck(self.vert_dims, rho_v, p, "intersect")
        meter.alloc("pair_sketch", sketch.cells)
        meter.alloc("set_lines", l1.cells + l2.cells)
        meter.alloc("subset_lines", sub.cells)
        meter.alloc("partner_lines", inter.cells)
        meter.alloc("registers", 8)
        for (u, v, delta) in _edge_tokens(inst):
            sketch.add_sym(u, v, delta)
            sub.add_right(undirected_key(u, v, n), delta)

        fp_part = Fingerprint(gamma, p)
        fp_all = Fingerprint(gamma, p)
        for v in range(1, n + 1):
            fp_all.add(v)
        members = reader.vertices("independent_set").tolist()
        for v in members:
            if not 1 <= v <= n:
                raise RejectError("set member out of range")
            fp_part.add(v)
            l1.add(v)
            l2.add(v)
        acc = sketch.bilinear(l1.arr, l2.arr)
        ptr = reader.vertices("pointers").tolist()
        if len(ptr) != 2 * (n - len(members)):
            raise RejectError("pointer list has wrong length")
        for i in range(len(ptr) // 2):
            v, u = ptr[2 * i], ptr[2 * i + 1]
            if not (1 <= v <= n and 1 <= u <= n) or v == u:
                raise RejectError("bad pointer pair")
            fp_part.add(v)
            sub.add_left(undirected_key(v, u, n))
            inter.add_left(u)
            inter.add_right(v)
        if fp_part.value != fp_all.value:
            raise RejectError("set and pointer sources do not partition V")

        wt = 2 * tp - 1
        t_set = reader.coeffs("independent_pairs", (wt, wt))
        if nd_eval(t_set, (r1, r2), p) != acc:
            raise RejectError("set-pair polynomial wrong at random point")
        if nd_grid_sum(t_set, (tp, tp), p) != 0:
            raise RejectError("claimed set is not independent")
        H = self.edge_dims[0]
        sub.finish(reader.coeffs("pointer_subset", (2 * H - 1,)),
                   "pointer containment")
        Hv = self.vert_dims[0]
        overlap = inter.finish(reader.coeffs("partner_inter", (2 * Hv - 1,)),
                               "partner overlap")
        if overlap != 0:
            raise RejectError("a pointer partner lies outside the set")
        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        return tuple(members)

    def mutate_vertices(self, inst, transcript, p, rng):
        members = list(self._greedy(inst))
        if rng.random() < 0.5 and members:
            members.remove(rng.choice(members))
        else:
            extra = [v for v in range(1, inst.n + 1) if v not in set(members)]
            if not extra:
                return None
            members = sorted(members + [rng.choice(extra)])
        return self._assemble(inst, members, p)


@register
class TopoSort(_SplitMixin, Scheme):
    """Validates a claimed topological order of a DAG edge stream.

    The order must be a permutation (fingerprint against V) and the
    prefix-into-next pair count must reach the stream's edge total,
    which happens exactly when every edge points forward.
    """

    name = "toposort"
    model = "vanilla"
    mutations = ("coefficient_flip", "block_truncation", "output_value_lie",
                 "vertex_list_permutation_lie")

    def oracle_value(self, inst):
        return tuple(self._kahn(inst))

    def output_correct(self, inst, value) -> bool:
        return oracle_is_toposort(inst, value)

    def _kahn(self, inst) -> list:
        def build():
            n = inst.n
            indeg = [0] * (n + 1)
            out: dict = {v: [] for v in range(1, n + 1)}
            for (u, v) in inst.directed_edges():
                out[u].append(v)
                indeg[v] += 1
            heap = [v for v in range(1, n + 1) if indeg[v] == 0]
            heapq.heapify(heap)
            order = []
            while heap:
                v = heapq.heappop(heap)
                order.append(v)
                for w in out[v]:
                    indeg[w] -= 1
                    if indeg[w] == 0:
                        heapq.heappush(heap, w)
            return order
        return _cached(inst, "toposort", build)

    def hcost_bound(self, inst) -> int:
        return inst.n + (2 * self.tp - 1) ** 2

    def vcost_bound(self, inst) -> int:
        return self.s + 2 * self.sp + 16

    def _forward_help(self, inst, order, p) -> np.ndarray:
        tp = self.tp
        Dt = impulse_block(np.arange(1, 2 * tp), tp, p)
        x_idx, y_idx = vertex_grid_index(self.isc)
        adj = _adj_matrix(inst, p, directed=True)
        wt = 2 * tp - 1
        P = np.zeros((wt, wt), dtype=np.int64)
        chi = np.zeros((wt, self.isc.s), dtype=np.int64)
        for i in range(1, len(order)):
            v = order[i - 1]
            xv, yv = self.isc.shape(v)
            chi[:, yv - 1] = (chi[:, yv - 1] + Dt[:, xv - 1]) % p
            Gpre = Dt[:, x_idx] * chi[:, y_idx] % p
            Gone = member_matrix([order[i]], self.isc, Dt, x_idx, y_idx, p)
            P = (P + pair_charge(Gpre, adj, Gone, p)) % p
        return coeffs_from_values_nd(P, p)

    def _assemble(self, inst, order, p, forge_gap: int = 0):
        tr = ProofTranscript()
        tr.add_vertices("order", order)
        poly = self._forward_help(inst, order, p)
        if forge_gap:
            tp = self.tp
            poly[:tp, :tp] = (poly[:tp, :tp] + forge_gap
                              * np.outer(grid_bump(tp, p),
                                         grid_bump(tp, p))) % p
        tr.add_coeffs("forward_pairs", poly)
        return tr

    def prove(self, inst, p: int) -> ProofTranscript:
        order = self._kahn(inst)
        if len(order) != inst.n:
            raise ValueError("input stream is not acyclic")
        return self._assemble(inst, order, p)

    def run_verifier(self, inst, reader, p, rng, meter):
        n, tp = self.n, self.tp
        r1, r2 = fe_random(rng, p), fe_random(rng, p)
        gamma = fe_random(rng, p)
        sketch = PairSketch(self.isc, r1, r2, p)
        pre1 = LineArray(self.isc, r1, p)
        meter.alloc("pair_sketch", sketch.cells)
        meter.alloc("prefix_line", pre1.cells)
        meter.alloc("registers", 8)
        m = 0
        for (u, v, delta) in _edge_tokens(inst, models=("vanilla",)):
            sketch.add(u, v, delta)
            m += delta
        fp_all = Fingerprint(gamma, p)
        for v in range(1, n + 1):
            fp_all.add(v)
        fp_ord = Fingerprint(gamma, p)
        order = reader.vertices("order", n).tolist()
        acc = 0
        for i, v in enumerate(order):
            if not 1 <= v <= n:
                raise RejectError("order entry out of range")
            fp_ord.add(v)
            xv, yv = self.isc.shape(v)
            if i > 0:
                col = sketch.table[:, yv - 1]
                hit = int((pre1.arr * col % p).sum() % p)
                acc = (acc + hit * sketch.i2[xv - 1]) % p
            pre1.add(v)
        if fp_ord.value != fp_all.value:
            raise RejectError("order is not a permutation of V")
        wt = 2 * tp - 1
        poly = reader.coeffs("forward_pairs", (wt, wt))
        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        if nd_eval(poly, (r1, r2), p) != acc:
            raise RejectError("forward-pair polynomial wrong at random point")
        if nd_grid_sum(poly, (tp, tp), p) != m % p:
            raise RejectError("an edge points backward in the order")
        return tuple(order)

    def _violating_order(self, inst, rng):
        order = list(self._kahn(inst))
        edges = inst.directed_edges()
        if not edges:
            return None
        u, v = edges[rng.randrange(len(edges))]
        iu, iv = order.index(u), order.index(v)
        order[iu], order[iv] = order[iv], order[iu]
        return order, (u, v)

    def mutate_vertices(self, inst, transcript, p, rng):
        got = self._violating_order(inst, rng)
        if got is None:
            return None
        return self._assemble(inst, got[0], p)

    def mutate_output(self, inst, transcript, p, rng):
        got = self._violating_order(inst, rng)
        if got is None:
            return None
        order = got[0]
        pos = {v: i for i, v in enumerate(order)}
        forward = sum(1 for (a, b) in inst.directed_edges()
                      if pos[a] < pos[b])
        gap = len(inst.directed_edges()) - forward
        return self._assemble(inst, order, p, forge_gap=gap)


@register
class Acyclicity(_SplitMixin, Scheme):
    """Claimed verdict plus certificate: an order when acyclic, a cycle
    checked edge-by-edge against the stream otherwise."""

    name = "acyclicity"
    model = "vanilla"
    mutations = ("coefficient_flip", "block_truncation", "output_value_lie",
                 "vertex_list_permutation_lie")

    def __init__(self, n, t, s):
        super().__init__(n, t, s)
        self._topo = None

    def _sorter(self) -> TopoSort:
        if self._topo is None:
            self._topo = TopoSort(self.n, self.t, self.s)
        return self._topo

    def oracle_value(self, inst):
        return oracle_acyclic(inst)

    def hcost_bound(self, inst) -> int:
        if oracle_acyclic(inst):
            return 1 + self._sorter().hcost_bound(inst)
        cyc = len(self._find_cycle(inst))
        return 1 + 2 * cyc + (2 * self.edge_dims[0] - 1)

    def vcost_bound(self, inst) -> int:
        return 2 * self.s + 2 * self.sp + 24

    def _find_cycle(self, inst) -> list:
        def build():
            n = inst.n
            out: dict = {v: [] for v in range(1, n + 1)}
            for (u, v) in inst.directed_edges():
                out[u].append(v)
            color = [0] * (n + 1)
            stack: list = []

            def dfs(v):
                color[v] = 1
                stack.append(v)
                for w in out[v]:
                    if color[w] == 1:
                        return stack[stack.index(w):]
                    if color[w] == 0:
                        got = dfs(w)
                        if got:
                            return got
                color[v] = 2
                stack.pop()
                return None

            for v in range(1, n + 1):
                if color[v] == 0:
                    got = dfs(v)
                    if got:
                        return got
            return []
        return _cached(inst, "cycle", build)

    def prove(self, inst, p: int) -> ProofTranscript:
        if oracle_acyclic(inst):
            inner = self._sorter().prove(inst, p)
            tr = ProofTranscript()
            tr.add_scalars("verdict", [1])
            tr.blocks.extend(inner.blocks)
            return tr
        return self._cycle_transcript(inst, self._find_cycle(inst), p)

    def _cycle_transcript(self, inst, cyc, p, forge_gap: int = 0):
        n = self.n
        tr = ProofTranscript()
        tr.add_scalars("verdict", [0])
        tr.add_vertices("cycle", cyc)
        tr.add_vertices("cycle_sorted", sorted(cyc))
        keys = [directed_key(cyc[i], cyc[(i + 1) % len(cyc)], n)
                for i in range(len(cyc))]
        sub = dense_indicator([(k, 1) for k in keys], self.edge_dims)
        sup = dense_indicator(
            [(directed_key(u, v, n), 1) for (u, v) in inst.directed_edges()],
            self.edge_dims)
        g = line_check_help(sub, sup, p, "subset")
        if forge_gap:
            H = self.edge_dims[0]
            bump = np.zeros(2 * H - 1, dtype=np.int64)
            bump[:H] = grid_bump(H, p)
            g = (g + forge_gap * bump) % p
        tr.add_coeffs("cycle_subset", g)
        return tr

    def run_verifier(self, inst, reader, p, rng, meter):
        n = self.n
        verdict = reader.scalar("verdict")
        if verdict not in (0, 1):
            raise RejectError("verdict must be 0 or 1")
        if verdict == 1:
            value = self._sorter().run_verifier(inst, reader, p, rng, meter)
            return True
        rho = fe_random(rng, p)
        gamma = fe_random(rng, p)
        sub = LineCheck(self.edge_dims, rho, p, "subset")
        meter.alloc("subset_lines", sub.cells)
        meter.alloc("registers", 6)
        for (u, v, delta) in _edge_tokens(inst, models=("vanilla",)):
            sub.add_right(directed_key(u, v, n), delta)
        cyc = reader.vertices("cycle").tolist()
        if len(cyc) < 2:
            raise RejectError("cycle too short")
        fp_c = Fingerprint(gamma, p)
        for i, v in enumerate(cyc):
            if not 1 <= v <= n:
                raise RejectError("cycle vertex out of range")
            fp_c.add(v)
            sub.add_left(directed_key(v, cyc[(i + 1) % len(cyc)], n))
        fp_s = Fingerprint(gamma, p)
        prev = 0
        for v in reader.vertices("cycle_sorted", len(cyc)).tolist():
            if not prev < v <= n:
                raise RejectError("cycle list not strictly increasing")
            prev = v
            fp_s.add(v)
        if fp_s.value != fp_c.value:
            raise RejectError("sorted copy does not match the cycle")
        H = self.edge_dims[0]
        sub.finish(reader.coeffs("cycle_subset", (2 * H - 1,)),
                   "cycle containment")
        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        return False

    def mutate_output(self, inst, transcript, p, rng):
        if oracle_acyclic(inst):
            # claim cyclic with a fabricated cycle, patching the zero total
            verts = list(range(1, inst.n + 1))
            rng.shuffle(verts)
            cyc = sorted(verts[:3])
            present = set(inst.directed_edges())
            missing = sum(1 for i in range(3)
                          if (cyc[i], cyc[(i + 1) % 3]) not in present)
            if missing == 0:
                return None
            return self._cycle_transcript(inst, cyc, p,
                                          forge_gap=(-missing) % p)
        # claim acyclic with a forged forward count
        sorter = self._sorter()
        order = list(range(1, inst.n + 1))
        pos = {v: i for i, v in enumerate(order)}
        forward = sum(1 for (a, b) in inst.directed_edges()
                      if pos[a] < pos[b])
        gap = len(inst.directed_edges()) - forward
        inner = sorter._assemble(inst, order, p, forge_gap=gap)
        tr = ProofTranscript()
        tr.add_scalars("verdict", [1])
        tr.blocks.extend(inner.blocks)
        return tr

    def mutate_vertices(self, inst, transcript, p, rng):
        out = _clone_transcript(transcript)
        lists = [b for b in out.blocks if b.kind == "vertices"
                 and b.values.size >= 2]
        if not lists:
            return None
        blk = lists[rng.randrange(len(lists))]
        i, j = rng.sample(range(blk.values.size), 2)
        blk.values[i], blk.values[j] = blk.values[j], blk.values[i]
        return out


@register
class Components(_SplitMixin, Scheme):
    """Connected component count via per-component spanning-tree blocks.

    Each block is a stream of records (vertex, child_count, parent,
    parent_index); index references only point backwards, and a pair of
    fingerprints forces every record to be referenced exactly its
    child_count times, so the records form one tree per block without
    the verifier storing any of it. Tree edges are containment-checked,
    blocks must partition V, and the blocks' internal pair total must
    absorb every stream edge.
    """

    name = "components"
    model = "turnstile"
    mutations = ("coefficient_flip", "block_truncation", "output_value_lie",
                 "vertex_list_permutation_lie")

    def oracle_value(self, inst):
        return oracle_components(inst)

    def hcost_bound(self, inst) -> int:
        c = oracle_components(inst)
        return (1 + 2 * c + 4 * (inst.n - c)
                + (2 * self.edge_dims[0] - 1) + (2 * self.tp - 1) ** 2)

    def vcost_bound(self, inst) -> int:
        return 3 * self.s + 2 * self.sp + 24

    def _blocks(self, inst) -> list:
        def build():
            G = _final_graph(inst)
            blocks = []
            for comp in sorted(nx.connected_components(G), key=min):
                root = min(comp)
                T = nx.bfs_tree(G.subgraph(comp), root)
                order = list(T.nodes())
                idx = {v: i for i, v in enumerate(order)}
                kids = {v: 0 for v in order}
                recs = []
                for v in order:
                    if v == root:
                        continue
                    par = next(iter(T.pred[v]))
                    kids[par] += 1
                    recs.append((v, par, idx[par]))
                block = [root, kids[root]]
                for (v, par, pidx) in recs:
                    block.extend((v, kids[v], par, pidx))
                blocks.append(block)
            return blocks
        return _cached(inst, "comp_blocks", build)

    def _assemble(self, inst, blocks, p, forge_gap: int = 0):
        n = self.n
        tr = ProofTranscript()
        tr.add_scalars("component_count", [len(blocks)])
        members_per_block = []
        tree_edges = []
        for block in blocks:
            tr.add_scalars("tree_block", block)
            mem = [block[0]]
            for j in range(2, len(block), 4):
                v, _, par, _ = block[j:j + 4]
                mem.append(v)
                tree_edges.append((min(v, par), max(v, par)))
            members_per_block.append(mem)
        sup = dense_indicator(_edge_key_items(inst, n), self.edge_dims)
        sub = dense_indicator([(undirected_key(a, b, n), 1)
                               for (a, b) in tree_edges], self.edge_dims)
        tr.add_coeffs("tree_subset", line_check_help(sub, sup, p, "subset"))
        poly = self._charge_help(inst, members_per_block, p)
        if forge_gap:
            tp = self.tp
            poly[:tp, :tp] = (poly[:tp, :tp] + forge_gap
                              * np.outer(grid_bump(tp, p),
                                         grid_bump(tp, p))) % p
        tr.add_coeffs("block_pairs", poly)
        return tr

    def prove(self, inst, p: int) -> ProofTranscript:
        return self._assemble(inst, self._blocks(inst), p)

    def run_verifier(self, inst, reader, p, rng, meter):
        n, tp = self.n, self.tp
        r1, r2 = fe_random(rng, p), fe_random(rng, p)
        rho = fe_random(rng, p)
        g1, g2, g3 = (fe_random(rng, p) for _ in range(3))
        gamma = fe_random(rng, p)
        sketch = PairSketch(self.isc, r1, r2, p)
        sub = LineCheck(self.edge_dims, rho, p, "subset")
        b1 = LineArray(self.isc, r1, p)
        b2 = LineArray(self.isc, r2, p)
        meter.alloc("pair_sketch", sketch.cells)
        meter.alloc("subset_lines", sub.cells)
        meter.alloc("block_lines", b1.cells + b2.cells)
        meter.alloc("registers", 12)
        m_total = 0
        for (u, v, delta) in _edge_tokens(inst):
            sketch.add_sym(u, v, delta)
            sub.add_right(undirected_key(u, v, n), delta)
            m_total += delta

        c = reader.scalar("component_count")
        if not 1 <= c <= n:
            raise RejectError("component count out of range")
        fp_part = Fingerprint(gamma, p)
        fp_all = Fingerprint(gamma, p)
        for v in range(1, n + 1):
            fp_all.add(v)
        supply = 0
        refer = 0
        acc_blocks = 0
        for bi in range(1, c + 1):
            vals = reader.scalars("tree_block").tolist()
            if len(vals) < 2 or (len(vals) - 2) % 4:
                raise RejectError("malformed tree block")
            b1.arr[:] = 0
            b2.arr[:] = 0
            root, kroot = vals[0], vals[1]
            if not 1 <= root <= n or not 0 <= kroot <= n:
                raise RejectError("bad root record")
            fp_part.add(root)
            b1.add(root)
            b2.add(root)
            supply = (supply + kroot
                      * monomial((g1, g2, g3), (root, 0, bi), p)) % p
            pos = 0
            for j in range(2, len(vals), 4):
                v, kv, par, pidx = vals[j:j + 4]
                pos += 1
                if not 1 <= v <= n or not 1 <= par <= n:
                    raise RejectError("tree record vertex out of range")
                if not 0 <= kv <= n:
                    raise RejectError("bad child count")
                if not 0 <= pidx < pos:
                    raise RejectError("tree reference points forward")
                fp_part.add(v)
                b1.add(v)
                b2.add(v)
                supply = (supply + kv
                          * monomial((g1, g2, g3), (v, pos, bi), p)) % p
                refer = (refer
                         + monomial((g1, g2, g3), (par, pidx, bi), p)) % p
                sub.add_left(undirected_key(v, par, n))
            acc_blocks = (acc_blocks + sketch.bilinear(b1.arr, b2.arr)) % p
        if supply != refer:
            raise RejectError("tree references do not match child counts")
        if fp_part.value != fp_all.value:
            raise RejectError("blocks do not partition V")
        H = self.edge_dims[0]
        sub.finish(reader.coeffs("tree_subset", (2 * H - 1,)),
                   "tree containment")
        wt = 2 * tp - 1
        poly = reader.coeffs("block_pairs", (wt, wt))
        if nd_eval(poly, (r1, r2), p) != acc_blocks:
            raise RejectError("block-pair polynomial wrong at random point")
        if nd_grid_sum(poly, (tp, tp), p) != (2 * m_total) % p:
            raise RejectError("blocks do not absorb every stream edge")
        if not reader.at_end():
            raise RejectError("unexpected trailing help")
        return c

    def mutate_output(self, inst, transcript, p, rng):
        blocks = [list(b) for b in self._blocks(inst)]
        splittable = [i for i, b in enumerate(blocks) if len(b) > 2]
        if not splittable:
            return None
        # promote one leaf record to its own block, patch the pair total
        bi = rng.choice(splittable)
        block = blocks[bi]
        recs = [(block[j], block[j + 1], block[j + 2], block[j + 3])
                for j in range(2, len(block), 4)]
        leaves = [r for r in recs if r[1] == 0]
        lone = leaves[-1]
        pos = recs.index(lone) + 1
        newrecs = []
        for q, r in enumerate(recs, start=1):
            if r is lone:
                continue
            if q > pos and r[3] >= pos:
                r = (r[0], r[1], r[2], r[3] - 1)
            newrecs.append(r)
        parent_pos = lone[3]
        fixed = []
        for q, r in enumerate([(block[0], block[1], None, None)] + newrecs):
            if q == parent_pos:
                fixed.append((r[0], r[1] - 1, r[2], r[3]))
            else:
                fixed.append(r)
        head = [fixed[0][0], fixed[0][1]]
        for r in fixed[1:]:
            head.extend(r)
        blocks[bi] = head
        blocks.append([lone[0], 0])
        G = _final_graph(inst)
        others = {v for v in
                  ([block[0]] + [r[0] for r in recs if r is not lone])}
        gap = 2 * sum(1 for u in G.neighbors(lone[0]) if u in others)
        return self._assemble(inst, blocks, p, forge_gap=gap)

    def mutate_vertices(self, inst, transcript, p, rng):
        out = _clone_transcript(transcript)
        trees = [b for b in out.blocks if b.label == "tree_block"]
        donors = [b for b in trees if b.values.size > 2]
        if not donors:
            return None
        blk = donors[rng.randrange(len(donors))]
        pos = 2 + 4 * rng.randrange((blk.values.size - 2) // 4)
        old = int(blk.values[pos])
        blk.values[pos] = old % inst.n + 1
        return out
