"""Abstract semantic structures, best correct approximations and the
completeness / strong-preservation checks.

Because abstract values are the closed sets themselves, the best correct
approximation of an operator f is simply μ∘f on closed arguments, and a
domain is forward complete for f exactly when f maps closed tuples to
closed sets.

Strong preservation of a structure is decided exactly (no formula-depth
bound) through the *paired semantic closure*: the least set of pairs
(⟦φ⟧, γ⟦φ⟧♯) containing the atom pairs and closed under paired operator
application.  It is finite (⊆ ℘(Σ)×℘(Σ)) and covers every formula of the
language; the verdict reads off the pairs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Optional, Sequence

from .errors import CapacityError, SpaceMismatchError, ValidationError
from .formulas import App, Atom, Formula
from .kripke import KripkeModel, Quotient
from .lattice import AbstractDomain, Mask, StateSet, powerset_domain
from .languages import LanguageSpec, Operator, apply_operator, eval_formula
from .partitions import adp

DEFAULT_MAX_TUPLES = 1 << 20
DEFAULT_MAX_PAIRS = 1 << 16


def bca_apply(
    domain: AbstractDomain,
    f: Operator,
    args: Sequence[StateSet],
    model: KripkeModel,
) -> StateSet:
    """Best correct approximation μ(f(γ(args))) on closed arguments."""
    masks = []
    for s in args:
        if s.space != domain.space:
            raise SpaceMismatchError("argument over a different space")
        if not domain.contains(s.mask):
            raise ValidationError(f"{s!r} is not a closed set of the domain")
        masks.append(s.mask)
    raw = apply_operator(f, model, masks)
    return StateSet(domain.space, domain.closure_mask(raw))


def eval_abstract(
    phi: Formula,
    domain: AbstractDomain,
    model: KripkeModel,
    lang: LanguageSpec,
) -> StateSet:
    """⟦φ⟧ under the structure induced by the domain: atoms are abstracted
    by μ and operators by their best correct approximations."""
    mask = eval_formula(
        phi,
        lang,
        lambda name: domain.closure_mask(lang.atom_mask(name)),
        lambda op, args: domain.closure_mask(apply_operator(op, model, args)),
    )
    return StateSet(domain.space, mask)


class AbstractStructure:
    """An abstract semantic structure (A, I♯) over closed sets.

    Atom interpretations are closed sets; operator interpretations are
    functions on closed sets.  Construct through one of
    :meth:`best_approximation`, :meth:`from_quotient` or :meth:`from_tables`.
    """

    def __init__(
        self,
        domain: AbstractDomain,
        lang: LanguageSpec,
        atom_values: dict[str, Mask],
        apply_fn: Callable[[Operator, tuple[Mask, ...]], Mask],
        kind: str,
    ):
        self.domain = domain
        self.lang = lang
        self.kind = kind
        self._apply_fn = apply_fn
        self.atom_values = atom_values
        for name, mask in atom_values.items():
            if not domain.contains(mask):
                raise ValidationError(f"atom {name!r} is interpreted by a non-closed set")

    @staticmethod
    def best_approximation(
        domain: AbstractDomain, model: KripkeModel, lang: LanguageSpec
    ) -> "AbstractStructure":
        atoms = {
            name: domain.closure_mask(s.mask) for name, s in lang.atoms
        }

        def apply_fn(op: Operator, args: tuple[Mask, ...]) -> Mask:
            return domain.closure_mask(apply_operator(op, model, args))

        return AbstractStructure(domain, lang, atoms, apply_fn, "best-approximation")

    @staticmethod
    def from_quotient(q: Quotient, lang: LanguageSpec) -> "AbstractStructure":
        """The structure induced by an abstract Kripke structure on blocks.

        Atom interpretations follow the existential labeling (every block
        meeting the concrete atom set); operators are evaluated over the
        block-level model and mapped back through the union of blocks.
        """
        domain = adp(q.partition)
        blocks = q.blocks

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

        atoms = {}
        for name, s in lang.atoms:
            bm = 0
            for i, blk in enumerate(blocks):
                if blk & s.mask:
                    bm |= 1 << i
            atoms[name] = to_union(bm)

        def apply_fn(op: Operator, args: tuple[Mask, ...]) -> Mask:
            bargs = tuple(to_blocks(a) for a in args)
            return to_union(apply_operator(op, q.model, bargs))

        return AbstractStructure(domain, lang, atoms, apply_fn, f"quotient-{q.kind}")

    @staticmethod
    def from_tables(
        domain: AbstractDomain,
        lang: LanguageSpec,
        atom_values: dict[str, Mask],
        tables: dict[str, dict[tuple[Mask, ...], Mask]],
    ) -> "AbstractStructure":
        """An explicitly tabulated interpretation (used to enumerate I♯)."""

        def apply_fn(op: Operator, args: tuple[Mask, ...]) -> Mask:
            try:
                return tables[op.name][args]
            except KeyError:
                raise ValidationError(
                    f"interpretation table for {op.name!r} lacks entry {args}"
                ) from None

        return AbstractStructure(domain, lang, atom_values, apply_fn, "tabulated")

    def atom_value(self, name: str) -> Mask:
        try:
            return self.atom_values[name]
        except KeyError:
            raise ValidationError(f"structure does not interpret atom {name!r}") from None

    def apply(self, op: Operator, args: tuple[Mask, ...]) -> Mask:
        out = self._apply_fn(op, args)
        if not self.domain.contains(out):
            raise ValidationError(
                f"operator {op.name!r} produced a non-closed set"
            )
        return out

    def semantics(self, phi: Formula) -> StateSet:
        mask = eval_formula(phi, self.lang, self.atom_value, self.apply)
        return StateSet(self.domain.space, mask)


@dataclass(frozen=True)
class PairedClosure:
    """Result of the paired semantic closure."""

    pairs: tuple[tuple[Mask, Mask], ...]
    formulas: tuple[Formula, ...]
    strong: bool
    weak: bool
    witness: Optional[Formula]
    aborted: bool


def paired_semantic_closure(
    model: KripkeModel,
    structure: AbstractStructure,
    lang: LanguageSpec,
    *,
    abort_on_violation: bool = False,
    max_pairs: int = DEFAULT_MAX_PAIRS,
) -> PairedClosure:
    """Compute the least pair set; track the first strongness violation.

    With ``abort_on_violation`` the closure stops at the first pair whose
    abstract side differs from its concrete side (used by the relation
    search, which only needs a strong/not-strong verdict).
    """
    if lang.open_ops:
        raise ValidationError("strong-preservation checks need a closed language")
    seen: dict[tuple[Mask, Mask], int] = {}
    pairs: list[tuple[Mask, Mask]] = []
    formulas: list[Formula] = []
    strong = True
    weak = True
    witness: Optional[Formula] = None

    def push(c: Mask, a: Mask, phi: Formula) -> bool:
        nonlocal strong, weak, witness
        key = (c, a)
        if key in seen:
            return False
        if len(pairs) >= max_pairs:
            raise CapacityError(f"paired closure exceeded {max_pairs} pairs")
        seen[key] = len(pairs)
        pairs.append(key)
        formulas.append(phi)
        if a != c:
            if witness is None:
                witness = phi
            strong = False
            if a & ~c:
                weak = False
        return True

    for name, s in lang.atoms:
        push(s.mask, structure.atom_value(name), Atom(name))
        if abort_on_violation and not strong:
            return PairedClosure(tuple(pairs), tuple(formulas), False, weak, witness, True)

    ops = sorted(lang.operators, key=lambda op: op.arity)
    frontier = list(range(len(pairs)))
    round_no = 0
    while frontier:
        created: list[int] = []
        for op in ops:
            if op.arity == 0:
                tuples: Iterable[tuple[int, ...]] = [()] if round_no == 0 else []
            elif op.arity == 1:
                tuples = ((i,) for i in frontier)
            else:
                known = range(len(pairs))
                fset = set(frontier)
                tuples = (
                    t
                    for t in product(known, repeat=op.arity)
                    if any(i in fset for i in t)
                )
            for t in list(tuples):
                cargs = tuple(pairs[i][0] for i in t)
                aargs = tuple(pairs[i][1] for i in t)
                c = apply_operator(op, model, cargs)
                a = structure.apply(op, aargs)
                phi = App(op.name, tuple(formulas[i] for i in t))
                if push(c, a, phi):
                    created.append(len(pairs) - 1)
                if abort_on_violation and not strong:
                    return PairedClosure(
                        tuple(pairs), tuple(formulas), False, weak, witness, True
                    )
        frontier = created
        round_no += 1
    return PairedClosure(tuple(pairs), tuple(formulas), strong, weak, witness, False)


@dataclass(frozen=True)
class SpCheckReport:
    """Outcome of a strong-preservation check on an abstract structure."""

    verdict: str  # "strong" | "weak-only" | "neither"
    witness: Optional[Formula]
    pair_count: int
    closure: PairedClosure

    @property
    def strong(self) -> bool:
        return self.verdict == "strong"


def paired_sp_check(
    model: KripkeModel,
    abstract: "AbstractStructure | Quotient",
    lang: LanguageSpec,
    *,
    max_pairs: int = DEFAULT_MAX_PAIRS,
) -> SpCheckReport:
    """Exact strong/weak preservation verdict for an abstract model.

    ``abstract`` is either an :class:`AbstractStructure` or a block-level
    :class:`Quotient` (then the induced structure with existential labeling
    is checked).  The verdict quantifies over the full language.
    """
    if isinstance(abstract, Quotient):
        if abstract.parent.space != model.space:
            raise SpaceMismatchError("quotient of a different model")
        structure = AbstractStructure.from_quotient(abstract, lang)
    else:
        structure = abstract
    closure = paired_semantic_closure(model, structure, lang, max_pairs=max_pairs)
    if closure.strong:
        verdict = "strong"
    elif closure.weak:
        verdict = "weak-only"
    else:
        verdict = "neither"
    return SpCheckReport(verdict, closure.witness, len(closure.pairs), closure)


@dataclass(frozen=True)
class CompletenessCounterexample:
    """First tuple violating the defining equation.

    Forward: lhs = f(args) on closed args, rhs = μ(f(args)).
    Backward: lhs = μ(f(args)) on raw args, rhs = μ(f(μ(args))).
    """

    op: str
    args: tuple[StateSet, ...]
    lhs: StateSet
    rhs: StateSet


@dataclass(frozen=True)
class CompletenessReport:
    direction: str
    holds: bool
    counterexample: Optional[CompletenessCounterexample]
    checked: int
    exhaustive: bool

    def __bool__(self) -> bool:
        return self.holds


def completeness_check(
    direction: str,
    domain: AbstractDomain,
    fs: Sequence[Operator],
    model: KripkeModel,
    *,
    max_tuples: int = DEFAULT_MAX_TUPLES,
    sample_seed: int = 2654435769,
) -> CompletenessReport:
    """Check forward (f∘μ⃗ = μ∘f∘μ⃗) or backward (μ∘f = μ∘f∘μ⃗) completeness.

    Forward ranges over tuples of image members in canonical order and
    reports the first counterexample.  Backward ranges over all argument
    tuples when (2^n)^arity fits the bound, otherwise over a seeded random
    sample (the report says which).
    """
    if direction not in ("forward", "backward"):
        raise ValidationError(f"unknown direction {direction!r}")
    space = domain.space
    checked = 0
    exhaustive = True

    if direction == "forward":
        members = sorted(domain.masks, key=space.lex_key)
        for f in fs:
            count = len(members) ** f.arity
            if count > max_tuples:
                raise CapacityError(
                    f"forward check for {f.name!r} needs {count} tuples"
                )
            for args in product(members, repeat=f.arity):
                checked += 1
                raw = apply_operator(f, model, args)
                closed = domain.closure_mask(raw)
                if closed != raw:
                    return CompletenessReport(
                        direction,
                        False,
                        CompletenessCounterexample(
                            f.name,
                            tuple(StateSet(space, a) for a in args),
                            StateSet(space, raw),
                            StateSet(space, closed),
                        ),
                        checked,
                        True,
                    )
        return CompletenessReport(direction, True, None, checked, True)

    subsets = 1 << space.n
    rng = random.Random(sample_seed)
    for f in fs:
        count = subsets**f.arity
        if count <= max_tuples:
            tuples: Iterable[tuple[Mask, ...]] = product(range(subsets), repeat=f.arity)
        else:
            exhaustive = False
            tuples = (
                tuple(rng.randrange(subsets) for _ in range(f.arity))
                for _ in range(max_tuples)
            )
        for args in tuples:
            checked += 1
            lhs = domain.closure_mask(apply_operator(f, model, args))
            closed_args = tuple(domain.closure_mask(a) for a in args)
            rhs = domain.closure_mask(apply_operator(f, model, closed_args))
            if lhs != rhs:
                return CompletenessReport(
                    direction,
                    False,
                    CompletenessCounterexample(
                        f.name,
                        tuple(StateSet(space, a) for a in args),
                        StateSet(space, lhs),
                        StateSet(space, rhs),
                    ),
                    checked,
                    exhaustive,
                )
    return CompletenessReport(direction, True, None, checked, exhaustive)


def is_sp_domain(domain: AbstractDomain, lang: LanguageSpec, model: KripkeModel) -> bool:
    """True iff the domain is strongly preserving for the language: it must
    contain every member of the most abstract strongly preserving domain."""
    from .shells import ad_of_language  # deferred: shells builds on this module

    return ad_of_language(lang, model).masks <= domain.masks


@dataclass(frozen=True)
class GfpTransferReport:
    """Outcome of the fixpoint-transfer check α(gfp f) = gfp(f^A)."""

    applicable: bool  # forward completeness hypothesis holds
    gfp_holds: Optional[bool]
    lfp_checked: bool  # γ(⊥_A) = ⊥ held, so the lfp direction was checked too
    lfp_holds: Optional[bool]
    detail: str

    @property
    def holds(self) -> bool:
        return bool(self.applicable and self.gfp_holds and self.lfp_holds is not False)


def gfp_transfer_check(
    domain: AbstractDomain, f: Operator, model: KripkeModel
) -> GfpTransferReport:
    """Verify fixpoint transfer for a monotone unary f the domain is forward
    complete for; vacuous (no claim) when the hypothesis fails.

    On these finite lattices the continuity side conditions hold, so when
    ∅ is closed (γ(⊥) = ⊥) the least-fixpoint direction is verified too.
    """
    if f.arity != 1:
        raise ValidationError("fixpoint transfer checks unary operators")
    fwd = completeness_check("forward", domain, [f], model)
    if not fwd.holds:
        return GfpTransferReport(
            False, None, False, None, "hypothesis fails: domain is not forward complete"
        )
    full = domain.space.full_mask

    def concrete(z: Mask) -> Mask:
        return apply_operator(f, model, (z,))

    def abstract(z: Mask) -> Mask:
        return domain.closure_mask(concrete(z))

    def iterate(step: Callable[[Mask], Mask], start: Mask) -> Mask:
        z = start
        for _ in range(2 + (1 << domain.space.n)):
            nxt = step(z)
            if nxt == z:
                return z
            z = nxt
        raise ValidationError("fixpoint iteration failed to converge (f monotone?)")

    gfp_c = iterate(concrete, full)
    gfp_a = iterate(abstract, domain.closure_mask(full))
    gfp_ok = domain.closure_mask(gfp_c) == gfp_a

    lfp_checked = domain.contains(0)
    lfp_ok: Optional[bool] = None
    if lfp_checked:
        lfp_c = iterate(concrete, 0)
        lfp_a = iterate(abstract, 0)
        lfp_ok = domain.closure_mask(lfp_c) == lfp_a
    detail = f"gfp {'=' if gfp_ok else '≠'}"
    if lfp_checked:
        detail += f", lfp {'=' if lfp_ok else '≠'}"
    else:
        detail += ", lfp skipped (∅ not closed)"
    return GfpTransferReport(True, gfp_ok, lfp_checked, lfp_ok, detail)


def identity_structure(model: KripkeModel, lang: LanguageSpec) -> AbstractStructure:
    """The concrete semantics as an abstract structure over ℘(Σ)."""
    return AbstractStructure.best_approximation(
        powerset_domain(model.space), model, lang
    )
