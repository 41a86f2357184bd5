"""Forward complete shells, language semantic closures, the most abstract
strongly preserving domain and the block-relation search.

The shell of a domain A for a set F of transformers is the most abstract
refinement of A that is forward complete for every f ∈ F.  On these finite
lattices it is computed by the obvious worklist: repeatedly add images of F
on the family and re-close under intersection until nothing new appears.
The result is the greatest fixpoint of ρ ↦ μ_A ⊓ M(F(ρ)), reached from
above; maximality is exhaustively verified at n = 3 by the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .abstraction import AbstractStructure, paired_semantic_closure
from .errors import CapacityError, SpaceMismatchError, ValidationError
from .kripke import KripkeModel, block_name
from .lattice import (
    AbstractDomain,
    DEFAULT_MAX_FAMILY,
    Mask,
    SetFamily,
    StateSpace,
    moore_close,
)
from .languages import LanguageSpec, Operator, apply_operator
from .partitions import Partition, adp, pr

#: Candidate bound for the abstract-relation search (2^{b²} relations).
MAX_SEARCH_CANDIDATES = 1 << 25


@dataclass(frozen=True)
class ShellTrace:
    """Iteration snapshots of a shell computation.

    Image sizes strictly increase until the last step; the final snapshot
    repeats the fixpoint, so the last two entries are equal and the last
    new-set count is 0.
    """

    iterations: tuple[AbstractDomain, ...]
    new_counts: tuple[int, ...]
    converged: bool = True

    def to_json(self) -> list[list[str]]:
        out = []
        for dom in self.iterations:
            fam = dom.image
            out.append([dom.space.format_mask(m) for m in fam.masks])
        return out


@dataclass(frozen=True)
class ShellResult:
    domain: AbstractDomain
    trace: ShellTrace


def _close_new_masks(masks: set[Mask], fresh: set[Mask]) -> set[Mask]:
    """Meet-close ``masks ∪ fresh`` incrementally; returns everything added."""
    added = set()
    pending = [m for m in fresh if m not in masks]
    while pending:
        m = pending.pop()
        if m in masks:
            continue
        masks.add(m)
        added.add(m)
        for other in list(masks):
            meet = m & other
            if meet not in masks:
                pending.append(meet)
    return added


def forward_complete_shell(
    domain: AbstractDomain,
    fs: Sequence[Operator],
    model: KripkeModel,
    *,
    max_size: int = DEFAULT_MAX_FAMILY,
) -> ShellResult:
    """Most abstract refinement of the domain forward complete for every f.

    Worklist closure: X := image(A); repeat X := M(X ∪ F(X)) to fixpoint.
    Unary operators are processed before higher arities to delay tuple
    blowup; the fixpoint is order-independent but the trace records the
    chosen order.
    """
    if model.space != domain.space:
        raise SpaceMismatchError("model over a different space than the domain")
    masks: set[Mask] = set(domain.masks)
    ops = sorted(fs, key=lambda op: op.arity)
    snapshots = [AbstractDomain(domain.space, image=frozenset(masks))]
    counts: list[int] = []
    frontier: set[Mask] = set(masks)
    first_round = True
    while True:
        produced: set[Mask] = set()
        known = sorted(masks, key=domain.space.lex_key)
        front = sorted(frontier, key=domain.space.lex_key)
        for op in ops:
            if op.arity == 0:
                tuples: Iterable[tuple[Mask, ...]] = [()] if first_round else []
            elif op.arity == 1:
                tuples = ((x,) for x in front)
            else:
                fset = frontier
                tuples = (
                    t
                    for t in product(known, repeat=op.arity)
                    if any(x in fset for x in t)
                )
            for args in tuples:
                r = apply_operator(op, model, args)
                if r not in masks:
                    produced.add(r)
        first_round = False
        if not produced:
            snapshots.append(snapshots[-1])
            counts.append(0)
            break
        frontier = _close_new_masks(masks, produced)
        if len(masks) > max_size:
            raise CapacityError(
                f"shell image exceeded {max_size} sets (now {len(masks)})"
            )
        snapshots.append(AbstractDomain(domain.space, image=frozenset(masks)))
        counts.append(len(frontier))
    trace = ShellTrace(tuple(snapshots), tuple(counts))
    return ShellResult(snapshots[-1], trace)


def semantic_closure(lang: LanguageSpec, model: KripkeModel) -> SetFamily:
    """The exact set {⟦φ⟧ | φ ∈ L}: atom denotations closed under the
    language's operators (no Moore closure here)."""
    if lang.open_ops:
        raise ValidationError("semantic closure needs a closed language")
    masks: set[Mask] = {s.mask for _, s in lang.atoms}
    frontier = set(masks)
    first_round = True
    while frontier:
        produced: set[Mask] = set()
        known = sorted(masks, key=model.space.lex_key)
        front = sorted(frontier, key=model.space.lex_key)
        for op in sorted(lang.operators, key=lambda op: op.arity):
            if op.arity == 0:
                tuples: Iterable[tuple[Mask, ...]] = [()] if first_round else []
            elif op.arity == 1:
                tuples = ((x,) for x in front)
            else:
                fset = frontier
                tuples = (
                    t
                    for t in product(known, repeat=op.arity)
                    if any(x in fset for x in t)
                )
            for args in tuples:
                r = apply_operator(op, model, args)
                if r not in masks:
                    produced.add(r)
        first_round = False
        masks |= produced
        frontier = produced
        if len(masks) > DEFAULT_MAX_FAMILY:
            raise CapacityError("semantic closure exceeded the family bound")
    return SetFamily.of(model.space, masks)


def ad_of_language(lang: LanguageSpec, model: KripkeModel) -> AbstractDomain:
    """The most abstract strongly preserving domain: M({⟦φ⟧ | φ ∈ L}).

    Σ is always a member through the empty meet, matching the convention
    that a conjunction-closed language expresses the tautology.
    """
    return moore_close(semantic_closure(lang, model))


def coarsest_sp_partition(lang: LanguageSpec, model: KripkeModel) -> Partition:
    """P_L: states grouped by logical equivalence, via pr of the domain."""
    return pr(ad_of_language(lang, model))


def sp_abstract_kripke_search(
    p: Partition,
    lang: LanguageSpec,
    model: KripkeModel,
    mode: str = "all",
) -> list[frozenset[tuple[int, int]]]:
    """Enumerate every abstract transition relation on the blocks of ``p``
    and return those whose abstract Kripke structure is strongly preserving.

    Abstract atoms follow the existential labeling (the block union of
    every block meeting the atom's denotation); operators are interpreted
    over the candidate block relation through the language's transformer
    bodies.  Relations are returned as index pairs over ``p.blocks``.
    """
    if mode not in ("all", "first"):
        raise ValidationError(f"unknown search mode {mode!r}")
    if p.space != model.space:
        raise SpaceMismatchError("partition over a different space than the model")
    blocks = p.blocks
    b = len(blocks)
    if (1 << (b * b)) > MAX_SEARCH_CANDIDATES:
        raise CapacityError(
            f"{b} blocks means 2^{b * b} candidate relations; bound is 2^25"
        )

    # Strong preservation forces γ(I♯(p)) = ⟦p⟧ already at the atoms, and
    # atom interpretations do not depend on the candidate relation: if some
    # atom is not a union of blocks, no relation can work.
    for _, s in lang.atoms:
        if p.block_containing(s.mask) != s.mask:
            return []

    bspace = StateSpace(tuple(block_name(model, m) for m in blocks))
    blabels = []
    for label, mask in model.label_items:
        bm = 0
        for j, blk in enumerate(blocks):
            if blk & mask:
                bm |= 1 << j
        blabels.append((label, bm))
    blabel_items = tuple(blabels)

    adp_domain = adp(p)
    atom_values = {name: p.block_containing(s.mask) for name, s in lang.atoms}

    def to_blocks(mask: Mask) -> Mask:
        bm = 0
        for i, blk in enumerate(blocks):
            if blk & ~mask == 0:
                bm |= 1 << i
        return bm

    def to_union(bm: Mask) -> Mask:
        acc = 0
        for i, blk in enumerate(blocks):
            if (bm >> i) & 1:
                acc |= blk
        return acc

    hits: list[frozenset[tuple[int, int]]] = []
    for bits in range(1 << (b * b)):
        succ = tuple(((bits >> (i * b)) & ((1 << b) - 1)) for i in range(b))
        qmodel = KripkeModel(bspace, succ, blabel_items)

        def apply_fn(op: Operator, args: tuple[Mask, ...], qmodel=qmodel) -> Mask:
            bargs = tuple(to_blocks(a) for a in args)
            return to_union(apply_operator(op, qmodel, bargs))

        structure = AbstractStructure(adp_domain, lang, atom_values, apply_fn, "search")
        closure = paired_semantic_closure(
            model, structure, lang, abort_on_violation=True
        )
        if closure.strong:
            rel = frozenset(
                (i, j) for i in range(b) for j in range(b) if (succ[i] >> j) & 1
            )
            hits.append(rel)
            if mode == "first":
                break
    return hits
