"""Built-in example models used by the bundled verification suite and tests.

* ``traffic_light`` — the four-phase controller R → RY → G → Y → R with
  stop/go labels.
* ``five_state_pqr`` — five states with a branching head (1 → 2, 1 → 3,
  2 → 2, 2 → 3) feeding the 4 ↔ 5 tail loop; labels p, q, r.
* ``five_state_pq`` — the same transition graph with labels p = {1..4},
  q = {5}.
* ``three_chain`` — 1 → 2 → 3 with a self-loop at 3, all states labeled p.
"""

from __future__ import annotations

from .kripke import KripkeModel
from .lattice import AbstractDomain, SetFamily


def traffic_light() -> KripkeModel:
    return KripkeModel.of(
        ["R", "RY", "G", "Y"],
        [("R", "RY"), ("RY", "G"), ("G", "Y"), ("Y", "R")],
        {"stop": ["R", "RY"], "go": ["G", "Y"]},
    )


_FIVE_STATES = ["1", "2", "3", "4", "5"]
_FIVE_EDGES = [
    ("1", "2"),
    ("1", "3"),
    ("2", "2"),
    ("2", "3"),
    ("3", "4"),
    ("4", "5"),
    ("5", "4"),
]


def five_state_pqr() -> KripkeModel:
    return KripkeModel.of(
        _FIVE_STATES,
        _FIVE_EDGES,
        {"p": ["1", "2", "3"], "q": ["3", "5"], "r": ["4"]},
    )


def five_state_pq() -> KripkeModel:
    return KripkeModel.of(
        _FIVE_STATES,
        _FIVE_EDGES,
        {"p": ["1", "2", "3", "4"], "q": ["5"]},
    )


def three_chain() -> KripkeModel:
    return KripkeModel.of(
        ["1", "2", "3"],
        [("1", "2"), ("2", "3"), ("3", "3")],
        {"p": ["1", "2", "3"]},
    )


def five_state_nondisjunctive_domain(model: KripkeModel) -> AbstractDomain:
    """A seven-member non-partitioning, non-disjunctive domain over the
    five-state space: {∅, 12, 3, 34, 123, 345, Σ}."""
    family = SetFamily.from_names(
        model.space,
        [[], ["1", "2"], ["3"], ["3", "4"], ["1", "2", "3"], ["3", "4", "5"],
         ["1", "2", "3", "4", "5"]],
    )
    return AbstractDomain(model.space, image=family.masks)


BUILTIN_MODELS = {
    "traffic_light": traffic_light,
    "five_state_pqr": five_state_pqr,
    "five_state_pq": five_state_pq,
    "three_chain": three_chain,
}
