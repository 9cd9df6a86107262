"""Scheme harness: runners, space accounting, adversarial trials.

A scheme couples a prover (produces a ProofTranscript from the input
stream) with a verifier (single forward pass over the stream, then a
single forward pass over the transcript, small mutable state). The
runner charges the verifier for every registered mutable cell via the
SpaceMeter; immutable precomputed tables (impulse tables at the random
point, power-sum constants) are derived from the coin flips alone and
are not charged. Help cost is the transcript element count.

Adversarial trials rerun the verifier with fresh coins against mutated
transcripts. A trial counts against soundness only when the verifier
accepts AND the reported output is wrong for the instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .field import FieldConfig, make_rng
from .stream import GraphInstance, ProofTranscript, RejectError


class SpaceMeter:
    """Peak count of live registered verifier cells."""

    def __init__(self):
        self._cells: dict = {}
        self.peak = 0

    @property
    def current(self) -> int:
        return sum(self._cells.values())

    def _bump(self):
        if self.current > self.peak:
            self.peak = self.current

    def alloc(self, name: str, cells: int):
        if name in self._cells:
            raise ValueError(f"meter group {name!r} already live")
        self._cells[name] = int(cells)
        self._bump()

    def grow(self, name: str, delta: int = 1):
        self._cells[name] = self._cells.get(name, 0) + int(delta)
        self._bump()

    def free(self, name: str):
        self._cells.pop(name, None)


@dataclass
class RunResult:
    scheme: str
    status: str            # "output" or "reject"
    value: object = None
    reason: str = ""
    hcost: int = 0
    vcost: int = 0
    p: int = 0

    @property
    def accepted(self) -> bool:
        return self.status == "output"


@dataclass
class TrialStats:
    scheme: str
    policy: str
    trials: int = 0
    accepted: int = 0
    accepted_wrong: int = 0
    rejected: int = 0

    @property
    def wrong_rate(self) -> float:
        return self.accepted_wrong / self.trials if self.trials else 0.0

    def wilson_upper(self, z: float = 2.576) -> float:
        """Upper 99% Wilson bound on the accept-wrong probability."""
        n, k = self.trials, self.accepted_wrong
        if n == 0:
            return 1.0
        phat = k / n
        denom = 1 + z * z / n
        center = phat + z * z / (2 * n)
        half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n))
        return (center + half) / denom


class Scheme:
    """Base interface; concrete schemes subclass and register."""

    name = ""
    model = "turnstile"
    mutations: tuple = ("coefficient_flip", "block_truncation")
    # scalars blocks with these labels may be hit by qd_scalar_flip
    scalar_flip_labels: tuple = ()
    # "labels" marks per-vertex distance outputs; the CLI prints those as
    # one `v dist prev` line per vertex instead of a single value
    output_kind = "value"

    @classmethod
    def configure(cls, inst: GraphInstance,
                  t: Optional[int] = None, s: Optional[int] = None,
                  **kw) -> "Scheme":
        raise NotImplementedError

    def field_config(self, inst: GraphInstance,
                     p: Optional[int] = None) -> FieldConfig:
        if p is not None:
            return FieldConfig(p)
        return FieldConfig.auto_from_n(inst.n)

    def prove(self, inst: GraphInstance, p: int) -> ProofTranscript:
        raise NotImplementedError

    def run_verifier(self, inst: GraphInstance, reader, p: int, rng,
                     meter: SpaceMeter):
        """Returns the output value; raises RejectError to reject."""
        raise NotImplementedError

    def oracle_value(self, inst: GraphInstance):
        raise NotImplementedError

    def output_correct(self, inst: GraphInstance, value) -> bool:
        return value == self.oracle_value(inst)

    def hcost_bound(self, inst: GraphInstance) -> int:
        raise NotImplementedError

    def vcost_bound(self, inst: GraphInstance) -> int:
        raise NotImplementedError

    # scheme-specific lies; return None when not applicable ----------------

    def mutate_output(self, inst, transcript, p, rng):
        return None

    def mutate_vertices(self, inst, transcript, p, rng):
        return None


SCHEMES: dict = {}


def register(cls):
    if cls.name in SCHEMES:
        raise ValueError(f"duplicate scheme name {cls.name}")
    SCHEMES[cls.name] = cls
    return cls


def get_scheme(name: str):
    try:
        return SCHEMES[name]
    except KeyError:
        raise KeyError(f"unknown scheme {name!r}; known: "
                       + ", ".join(sorted(SCHEMES))) from None


def _clone_transcript(transcript: ProofTranscript) -> ProofTranscript:
    out = ProofTranscript()
    for b in transcript.blocks:
        out.blocks.append(type(b)(b.label, b.kind, b.values.copy(), b.shape))
    return out


# --- mutation policies ------------------------------------------------------


def _flip_coefficient(scheme, inst, transcript, p, rng):
    out = _clone_transcript(transcript)
    idxs = [i for i, b in enumerate(out.blocks) if b.kind == "coeffs"
            and b.values.size]
    if not idxs:
        return None
    b = out.blocks[rng.choice(idxs)]
    pos = rng.randrange(b.values.size)
    b.values[pos] = (int(b.values[pos]) + rng.randrange(1, p)) % p
    return out


def _truncate_block(scheme, inst, transcript, p, rng):
    out = _clone_transcript(transcript)
    if not out.blocks:
        return None
    if rng.random() < 0.5:
        cut = rng.randrange(len(out.blocks))
        out.blocks = out.blocks[:cut]
    else:
        sized = [i for i, b in enumerate(out.blocks) if b.values.size > 1]
        if sized:
            b = out.blocks[rng.choice(sized)]
            keep = rng.randrange(1, b.values.size)
            b.values = b.values[:keep]
        else:
            out.blocks = out.blocks[:-1]
    return out


def _lie_output(scheme, inst, transcript, p, rng):
    return scheme.mutate_output(inst, transcript, p, rng)


def _lie_vertices(scheme, inst, transcript, p, rng):
    return scheme.mutate_vertices(inst, transcript, p, rng)


def _flip_round_scalar(scheme, inst, transcript, p, rng):
    out = _clone_transcript(transcript)
    idxs = [i for i, b in enumerate(out.blocks)
            if b.kind == "scalars" and b.label in scheme.scalar_flip_labels
            and b.values.size]
    if not idxs:
        return None
    b = out.blocks[rng.choice(idxs)]
    pos = rng.randrange(b.values.size)
    b.values[pos] = (int(b.values[pos]) + rng.randrange(1, p)) % p
    return out


MUTATIONS = {
    "coefficient_flip": _flip_coefficient,
    "block_truncation": _truncate_block,
    "output_value_lie": _lie_output,
    "vertex_list_permutation_lie": _lie_vertices,
    "qd_scalar_flip": _flip_round_scalar,
}


# --- runners ----------------------------------------------------------------


def _verify(scheme, inst, transcript, p, seed) -> RunResult:
    meter = SpaceMeter()
    rng = make_rng(seed, f"verifier/{scheme.name}")
    reader = transcript.reader()
    try:
        value = scheme.run_verifier(inst, reader, p, rng, meter)
        status, reason = "output", ""
    except RejectError as exc:
        value, status, reason = None, "reject", exc.reason
    return RunResult(scheme=scheme.name, status=status, value=value,
                     reason=reason, hcost=transcript.element_count(),
                     vcost=meter.peak, p=p)


def run_honest(scheme, inst: GraphInstance, seed: int = 0,
               p: Optional[int] = None) -> RunResult:
    cfg = scheme.field_config(inst, p)
    transcript = scheme.prove(inst, cfg.p)
    return _verify(scheme, inst, transcript, cfg.p, seed)


def run_with_transcript(scheme, inst: GraphInstance,
                        transcript: ProofTranscript, seed: int = 0,
                        p: Optional[int] = None) -> RunResult:
    cfg = scheme.field_config(inst, p)
    return _verify(scheme, inst, transcript, cfg.p, seed)


def run_adversarial(scheme, inst: GraphInstance, policy: str,
                    trials: int, seed: int = 0,
                    p: Optional[int] = None) -> TrialStats:
    if policy not in MUTATIONS:
        raise KeyError(f"unknown mutation policy {policy!r}")
    if policy not in scheme.mutations:
        raise ValueError(f"policy {policy} not applicable to {scheme.name}")
    cfg = scheme.field_config(inst, p)
    honest = scheme.prove(inst, cfg.p)
    mutate = MUTATIONS[policy]
    stats = TrialStats(scheme=scheme.name, policy=policy)
    for i in range(trials):
        arng = make_rng(seed, f"adversary/{scheme.name}/{policy}/{i}")
        mutated = mutate(scheme, inst, honest, cfg.p, arng)
        if mutated is None:
            raise ValueError(f"policy {policy} produced no mutation for "
                             f"{scheme.name} on this instance")
        res = _verify(scheme, inst, mutated, cfg.p,
                      seed=((seed << 16) ^ (i + 1)))
        stats.trials += 1
        if res.accepted:
            stats.accepted += 1
            if not scheme.output_correct(inst, res.value):
                stats.accepted_wrong += 1
        else:
            stats.rejected += 1
    return stats


def sweep_costs(name: str, inst: GraphInstance, shapes,
                seed: int = 0, p: Optional[int] = None) -> list:
    """Honest runs across (t, s) shapes; returns cost rows for the CSV."""
    rows = []
    for t, s in shapes:
        scheme = get_scheme(name).configure(inst, t=t, s=s)
        cfg = scheme.field_config(inst, p)
        res = run_honest(scheme, inst, seed=seed, p=cfg.p)
        if not res.accepted:
            raise RuntimeError(f"honest run rejected during sweep: "
                               f"{name} t={t} s={s}: {res.reason}")
        bits = cfg.bits_per_element
        rows.append({
            "scheme": name, "n": inst.n, "t": t, "s": s,
            "hcost_elems": res.hcost, "vcost_elems": res.vcost,
            "hbits": res.hcost * bits, "vbits": res.vcost * bits,
            "product_bits": res.hcost * bits * res.vcost * bits,
        })
    return rows
