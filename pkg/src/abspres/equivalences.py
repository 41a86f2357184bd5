"""Bisimulation, divergence-blind stuttering and simulation.

Each relation comes with three routes that must agree:

* a naive refinement (splitter loop / gfp over pairs) computing the
  coarsest relation,
* the literal per-pair definition as a checker, and
* a forward-completeness characterization of the induced domain:
  bisimulation ↔ {atoms} ∪ {pre}, stuttering ↔ {atoms} ∪ {EU},
  simulation ↔ {atoms} ∪ {pre~} on the preorder domain.

Disagreement between routes raises InternalConsistencyError; the report
object exposes the verdict of every route.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .abstraction import completeness_check
from .errors import InternalConsistencyError, SpaceMismatchError, ValidationError
from .kripke import KripkeModel, label_partition
from .lattice import Mask, SetFamily, StateSet, moore_close
from .languages import Operator, builtin_operator, const_operator, until_mask
from .partitions import Partition, Preorder, add, adp, pr
from .shells import forward_complete_shell


def _atom_constants(model: KripkeModel) -> list[Operator]:
    return [
        const_operator(name, StateSet(model.space, mask))
        for name, mask in model.label_items
    ]


def _split_once(model: KripkeModel, blocks: list[Mask], split_mask_fn) -> bool:
    """One deterministic refinement step: lowest-index block, lowest-index
    splitter.  Returns True when a block was split."""
    for i, b1 in enumerate(blocks):
        for b2 in blocks:
            x = split_mask_fn(b1, b2)
            if x and x != b1:
                rest = b1 & ~x
                blocks[i : i + 1] = [x, rest]
                blocks.sort(key=model.space.lex_key)
                return True
    return False


def bisim_partition(model: KripkeModel) -> Partition:
    """Coarsest bisimulation partition by naive splitter refinement:
    start from the label partition, split B1 by pre(B2) ∩ B1 while proper."""
    blocks = sorted(label_partition(model).blocks, key=model.space.lex_key)

    def splitter(b1: Mask, b2: Mask) -> Mask:
        return b1 & model.pre(b2)

    while _split_once(model, blocks, splitter):
        pass
    return Partition.from_masks(model.space, blocks)


def _definitional_bisim(p: Partition, model: KripkeModel) -> bool:
    for block in p.blocks:
        members = [s for s in range(model.n) if (block >> s) & 1]
        labels = {model.label_of_state(s) for s in members}
        if len(labels) > 1:
            return False
        for s in members:
            for t in range(model.n):
                if not (model.succ[s] >> t) & 1:
                    continue
                t_block = p.block_containing(1 << t)
                for s2 in members:
                    if not model.succ[s2] & t_block:
                        return False
    return True


def check_bisimulation(p: Partition, model: KripkeModel) -> bool:
    """Definitional per-pair check and the forward-completeness check of
    adp(P) for {atoms} ∪ {pre}; the two must agree."""
    if p.space != model.space:
        raise SpaceMismatchError("partition over a different space than the model")
    definitional = _definitional_bisim(p, model)
    ops = _atom_constants(model) + [builtin_operator("pre")]
    complete = completeness_check("forward", adp(p), ops, model).holds
    if definitional != complete:
        raise InternalConsistencyError(
            f"bisimulation routes disagree on {p!r}: "
            f"definitional={definitional}, completeness={complete}"
        )
    return definitional


def dbs_partition(model: KripkeModel) -> Partition:
    """Coarsest divergence-blind stuttering partition: start from the label
    partition; split B1 by EU(B1, B2) ∩ B1 while that intersection is proper."""
    blocks = sorted(label_partition(model).blocks, key=model.space.lex_key)

    def splitter(b1: Mask, b2: Mask) -> Mask:
        if b1 == b2:
            return b1
        return until_mask(model, b1, b2) & b1

    while _split_once(model, blocks, splitter):
        pass
    return Partition.from_masks(model.space, blocks)


def _definitional_dbs(p: Partition, model: KripkeModel) -> bool:
    # Label condition plus the block criterion: for B1 ≠ B2 the set
    # EU(B1,B2) ∩ B1 is empty or all of B1 (members reach B2 inside B1
    # together, or none does).
    for block in p.blocks:
        members = [s for s in range(model.n) if (block >> s) & 1]
        if len({model.label_of_state(s) for s in members}) > 1:
            return False
    for b1 in p.blocks:
        for b2 in p.blocks:
            if b1 == b2:
                continue
            x = until_mask(model, b1, b2) & b1
            if x not in (0, b1):
                return False
    return True


def check_dbs(p: Partition, model: KripkeModel) -> bool:
    """Definitional EU-based block criterion and forward completeness of
    adp(P) for {atoms} ∪ {EU}; the two must agree."""
    if p.space != model.space:
        raise SpaceMismatchError("partition over a different space than the model")
    definitional = _definitional_dbs(p, model)
    ops = _atom_constants(model) + [builtin_operator("EU")]
    complete = completeness_check("forward", adp(p), ops, model).holds
    if definitional != complete:
        raise InternalConsistencyError(
            f"stuttering routes disagree on {p!r}: "
            f"definitional={definitional}, completeness={complete}"
        )
    return definitional


def _similarity_rows(model: KripkeModel, equal_labels: bool) -> tuple[Mask, ...]:
    n = model.n
    labels = [model.label_of_state(s) for s in range(n)]
    rows = []
    for s in range(n):
        row = 0
        for s2 in range(n):
            related = labels[s2] == labels[s] if equal_labels else labels[s2] <= labels[s]
            if related:
                row |= 1 << s2
        rows.append(row)
    changed = True
    while changed:
        changed = False
        for s in range(n):
            row = rows[s]
            for s2 in range(n):
                if not (row >> s2) & 1:
                    continue
                ok = True
                for t in range(n):
                    if (model.succ[s] >> t) & 1 and not model.succ[s2] & rows[t]:
                        ok = False
                        break
                if not ok:
                    row &= ~(1 << s2)
                    changed = True
            rows[s] = row
    return tuple(rows)


def largest_simulation(model: KripkeModel) -> Preorder:
    """The similarity preorder by gfp refinement over pairs.

    Start from R₀ = {(s,s') | ℓ(s') ⊆ ℓ(s)} and drop (s,s') while some move
    of s cannot be matched by s'.  Note the label condition compares by
    inclusion, so a state with fewer labels may simulate one with more.
    """
    return Preorder(model.space, _similarity_rows(model, equal_labels=False))


def equal_label_simulation(model: KripkeModel) -> Preorder:
    """Similarity restricted to equal label sets; its kernel is simulation
    equivalence in the classical sense, the one matched by literal-seeded
    shells.  On partition-induced labelings it coincides with
    :func:`largest_simulation`."""
    return Preorder(model.space, _similarity_rows(model, equal_labels=True))


def _definitional_simulation(r: Preorder, model: KripkeModel) -> bool:
    n = model.n
    labels = [model.label_of_state(s) for s in range(n)]
    for s in range(n):
        for s2 in range(n):
            if not (r.rows[s] >> s2) & 1:
                continue
            if not labels[s2] <= labels[s]:
                return False
            for t in range(n):
                if (model.succ[s] >> t) & 1 and not model.succ[s2] & r.rows[t]:
                    return False
    return True


def check_simulation(r: Preorder, model: KripkeModel) -> bool:
    """Definitional simulation conditions and forward completeness of
    add(R) for {atoms} ∪ {pre~}; the two must agree."""
    if r.space != model.space:
        raise SpaceMismatchError("preorder over a different space than the model")
    definitional = _definitional_simulation(r, model)
    ops = _atom_constants(model) + [builtin_operator("pre~")]
    complete = completeness_check("forward", add(r), ops, model).holds
    if definitional != complete:
        raise InternalConsistencyError(
            f"simulation routes disagree: definitional={definitional}, "
            f"completeness={complete}"
        )
    return definitional


def bisim_shell_partition(model: KripkeModel) -> Partition:
    """Bisimulation through the shell route: pr(S_{∁,pre}(M(P_ℓ)))."""
    seed = moore_close(label_partition(model).family)
    ops = [builtin_operator("not"), builtin_operator("pre")]
    return pr(forward_complete_shell(seed, ops, model).domain)


def dbs_shell_partition(model: KripkeModel) -> Partition:
    """Stuttering through the shell route: pr(S_{∁,EU}(M(P_ℓ)))."""
    seed = moore_close(label_partition(model).family)
    ops = [builtin_operator("not"), builtin_operator("EU")]
    return pr(forward_complete_shell(seed, ops, model).domain)


def simeq_shell_partition(model: KripkeModel) -> Partition:
    """Simulation equivalence through the shell route:
    pr(S_{∪,pre~}(M({p, ∁p | p ∈ AP})))."""
    space = model.space
    literals = {space.full_mask}
    for _, mask in model.label_items:
        literals.add(mask)
        literals.add(space.full_mask & ~mask)
    seed = moore_close(SetFamily.of(space, literals))
    ops = [builtin_operator("or"), builtin_operator("pre~")]
    return pr(forward_complete_shell(seed, ops, model).domain)


def simeq_partition(model: KripkeModel) -> Partition:
    """Simulation-equivalence partition: symmetric kernel of the (equal
    label) similarity preorder, cross-checked against the shell route.

    The inclusion-labeled similarity of :func:`largest_simulation` would
    give a coarser kernel on overlapping labelings, because its witnessing
    simulations may pass through pairs with strictly fewer labels; the
    literal-seeded shell pins the classical notion.
    """
    kernel = equal_label_simulation(model).kernel()
    shell = simeq_shell_partition(model)
    if kernel != shell:
        raise InternalConsistencyError(
            f"simulation-equivalence routes disagree: kernel={kernel!r}, "
            f"shell={shell!r}"
        )
    return kernel


@dataclass(frozen=True)
class EquivalenceReport:
    """One behavioural-equivalence computation with its cross-check verdicts."""

    kind: str
    partition: Optional[Partition]
    preorder: Optional[Preorder]
    routes: dict[str, bool]
    consistent: bool


def equivalence_report(kind: str, model: KripkeModel) -> EquivalenceReport:
    if kind == "bisim":
        p = bisim_partition(model)
        shell_ok = bisim_shell_partition(model) == p
        checker_ok = check_bisimulation(p, model)
        routes = {"refinement_equals_shell": shell_ok, "checker_accepts": checker_ok}
        return EquivalenceReport(kind, p, None, routes, all(routes.values()))
    if kind == "dbs":
        p = dbs_partition(model)
        shell_ok = dbs_shell_partition(model) == p
        checker_ok = check_dbs(p, model)
        routes = {"refinement_equals_shell": shell_ok, "checker_accepts": checker_ok}
        return EquivalenceReport(kind, p, None, routes, all(routes.values()))
    if kind == "sim":
        r = largest_simulation(model)
        routes = {"checker_accepts": check_simulation(r, model)}
        return EquivalenceReport(kind, None, r, routes, all(routes.values()))
    if kind == "simeq":
        p = simeq_partition(model)  # raises on route disagreement
        routes = {"kernel_equals_shell": True}
        return EquivalenceReport(kind, p, None, routes, True)
    raise ValidationError(f"unknown equivalence kind {kind!r}")
