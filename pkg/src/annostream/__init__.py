"""Annotated-stream protocols for graph problems.

A space-bounded verifier reads an edge stream once, keeping only
fingerprints and low-degree-extension sketches, then checks a short
proof transcript supplied by an untrusted prover.  Honest transcripts
always pass; a transcript for a wrong output survives only with
probability O(poly(n))/p over the verifier's coin tosses.

Importing the package registers every scheme in `SCHEMES`.
"""

from . import edgecount, graphapps, sssp, triangles  # noqa: F401
from .field import FieldConfig, is_prime, next_prime
from .generators import (adjlist_instance, clique_edges, cycle_edges,
                         dag_instance, digraph_instance, gnp_edges,
                         path_edges, star_edges, turnstile_instance,
                         vanilla_instance, weighted_instance,
                         weighted_turnstile_instance, with_query_set)
from .protocol import (MUTATIONS, SCHEMES, RunResult, SpaceMeter, TrialStats,
                       get_scheme, run_adversarial, run_honest,
                       run_with_transcript, sweep_costs)
from .stream import (AdjItem, EdgeToken, GraphInstance, ParseError,
                     ProofTranscript, RejectError, SetQuery, parse_stream,
                     serialize_stream)

__all__ = [
    "AdjItem", "EdgeToken", "FieldConfig", "GraphInstance", "MUTATIONS",
    "ParseError", "ProofTranscript", "RejectError", "RunResult", "SCHEMES",
    "SetQuery", "SpaceMeter", "TrialStats", "adjlist_instance",
    "clique_edges", "cycle_edges", "dag_instance", "digraph_instance",
    "get_scheme", "gnp_edges", "is_prime", "next_prime", "parse_stream",
    "path_edges", "run_adversarial", "run_honest", "run_with_transcript",
    "serialize_stream", "star_edges", "sweep_costs", "turnstile_instance",
    "vanilla_instance", "weighted_instance", "weighted_turnstile_instance",
    "with_query_set",
]
