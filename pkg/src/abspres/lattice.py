"""Finite powerset lattices, Moore families and the lattice of abstract domains.

The concrete domain is ℘(Σ) for a finite state space Σ.  Subsets of Σ are
characteristic bit vectors packed into Python ints (bit i = state with
index i).  An abstract domain is represented by its Moore family of closed
sets: the image of an upper closure operator μ, meet-closed and containing
Σ.  With this representation γ is the identity on closed sets and
α(S) = μ(S) is the least closed superset, so every Galois-insertion law is
decidable by plain set arithmetic.

Domains are compared in the precision order: A1 ⊑ A2 ("A1 is more precise")
iff image(A2) ⊆ image(A1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

from .errors import CapacityError, SpaceMismatchError, ValidationError

Mask = int

#: Default bound on |Σ|.  Worst-case family size 2^|Σ| is accepted at desk scale.
DEFAULT_MAX_STATES = 24

#: Default bound on the number of sets a single family may materialize.
DEFAULT_MAX_FAMILY = 1 << 20

#: Largest n accepted by enumerate_moore_families (count explodes beyond).
MAX_ENUMERATION_STATES = 4


@dataclass(frozen=True)
class StateSpace:
    """A named finite universe Σ with a fixed index order.

    Indices are stable for the lifetime of the space; all sets, families,
    partitions and models are relative to one space.  An empty space is
    permitted (it only occurs when enumerating families over Σ = ∅).
    """

    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValidationError(f"duplicate state names in {self.names!r}")
        if len(self.names) > DEFAULT_MAX_STATES:
            raise CapacityError(
                f"state space of size {len(self.names)} exceeds the "
                f"{DEFAULT_MAX_STATES}-state bound"
            )

    @staticmethod
    def of(*names: str) -> "StateSpace":
        return StateSpace(tuple(names))

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def full_mask(self) -> Mask:
        return (1 << self.n) - 1

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValidationError(f"unknown state name {name!r}") from None

    def mask_of(self, names: Iterable[str]) -> Mask:
        mask = 0
        for name in names:
            mask |= 1 << self.index(name)
        return mask

    def names_of(self, mask: Mask) -> tuple[str, ...]:
        return tuple(self.names[i] for i in range(self.n) if (mask >> i) & 1)

    def set_of(self, names: Iterable[str]) -> "StateSet":
        return StateSet(self, self.mask_of(names))

    def set_from_mask(self, mask: Mask) -> "StateSet":
        return StateSet(self, mask)

    @property
    def full(self) -> "StateSet":
        return StateSet(self, self.full_mask)

    @property
    def empty(self) -> "StateSet":
        return StateSet(self, 0)

    def lex_key(self, mask: Mask) -> int:
        """Order key: lexicographic on the characteristic vector."""
        key = 0
        for i in range(self.n):
            key = (key << 1) | ((mask >> i) & 1)
        return key

    def format_mask(self, mask: Mask) -> str:
        return "{" + ",".join(self.names_of(mask)) + "}"


@dataclass(frozen=True)
class StateSet:
    """A subset of Σ as a characteristic vector over a fixed space."""

    space: StateSpace
    mask: Mask

    def __post_init__(self):
        if self.mask < 0 or self.mask > self.space.full_mask:
            raise ValidationError(f"mask {self.mask:#x} is not over {self.space.names}")

    def _check(self, other: "StateSet") -> None:
        if self.space != other.space:
            raise SpaceMismatchError(
                f"sets over different spaces: {self.space.names} vs {other.space.names}"
            )

    def __and__(self, other: "StateSet") -> "StateSet":
        self._check(other)
        return StateSet(self.space, self.mask & other.mask)

    def __or__(self, other: "StateSet") -> "StateSet":
        self._check(other)
        return StateSet(self.space, self.mask | other.mask)

    def __invert__(self) -> "StateSet":
        return StateSet(self.space, self.space.full_mask & ~self.mask)

    def __le__(self, other: "StateSet") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def __contains__(self, name: str) -> bool:
        return (self.mask >> self.space.index(name)) & 1 == 1

    def __iter__(self) -> Iterator[str]:
        return iter(self.space.names_of(self.mask))

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __repr__(self) -> str:
        return self.space.format_mask(self.mask)

    @property
    def names(self) -> tuple[str, ...]:
        return self.space.names_of(self.mask)


SetLike = Union[StateSet, Mask]


def _mask_of(space: StateSpace, s: SetLike) -> Mask:
    if isinstance(s, StateSet):
        if s.space != space:
            raise SpaceMismatchError("set over a different space")
        return s.mask
    return s


@dataclass(frozen=True)
class SetFamily:
    """A duplicate-free collection of subsets of one space, canonically ordered.

    The canonical order is lexicographic on characteristic vectors, so
    equality of families is equality of representations.
    """

    space: StateSpace
    masks: tuple[Mask, ...]

    def __post_init__(self):
        ordered = tuple(sorted(set(self.masks), key=self.space.lex_key))
        if ordered != self.masks:
            object.__setattr__(self, "masks", ordered)

    @staticmethod
    def of(space: StateSpace, sets: Iterable[SetLike]) -> "SetFamily":
        return SetFamily(space, tuple(_mask_of(space, s) for s in sets))

    @staticmethod
    def from_names(space: StateSpace, groups: Iterable[Iterable[str]]) -> "SetFamily":
        return SetFamily.of(space, [space.mask_of(g) for g in groups])

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self) -> Iterator[StateSet]:
        return (StateSet(self.space, m) for m in self.masks)

    def __contains__(self, s: SetLike) -> bool:
        return _mask_of(self.space, s) in set(self.masks)

    def __repr__(self) -> str:
        return "{" + ", ".join(self.space.format_mask(m) for m in self.masks) + "}"

    def mask_set(self) -> frozenset[Mask]:
        return frozenset(self.masks)

    def issubset(self, other: "SetFamily") -> bool:
        if self.space != other.space:
            raise SpaceMismatchError("families over different spaces")
        return self.mask_set() <= other.mask_set()


def _moore_close_masks(space: StateSpace, masks: Iterable[Mask]) -> frozenset[Mask]:
    """Least meet-closed superset of ``masks`` containing Σ (the empty meet)."""
    closed = set(masks)
    closed.add(space.full_mask)
    frontier = list(closed)
    while frontier:
        fresh = []
        for a in frontier:
            for b in list(closed):
                meet = a & b
                if meet not in closed:
                    closed.add(meet)
                    fresh.append(meet)
        frontier = fresh
    return frozenset(closed)


def _is_moore(space: StateSpace, masks: frozenset[Mask]) -> bool:
    if space.full_mask not in masks:
        return False
    items = list(masks)
    for i, a in enumerate(items):
        for b in items[i + 1 :]:
            if a & b not in masks:
                return False
    return True


class AbstractDomain:
    """A Moore family of closed sets over one space; houses μ, α and γ.

    The image may be supplied eagerly, or lazily through ``image_fn``
    together with a direct closure function (partition- and preorder-derived
    domains answer closure queries without materializing their 2^k unions).
    Equality, hashing and iteration force materialization.
    """

    __slots__ = ("space", "_masks", "_image_fn", "_closure_fn", "_hash")

    def __init__(
        self,
        space: StateSpace,
        image: Optional[Iterable[SetLike]] = None,
        *,
        image_fn: Optional[Callable[[], frozenset[Mask]]] = None,
        closure_fn: Optional[Callable[[Mask], Mask]] = None,
    ):
        if (image is None) == (image_fn is None):
            raise ValidationError("exactly one of image/image_fn is required")
        self.space = space
        self._image_fn = image_fn
        self._closure_fn = closure_fn
        self._hash: Optional[int] = None
        if image is not None:
            masks = frozenset(_mask_of(space, s) for s in image)
            if not _is_moore(space, masks):
                raise ValidationError(
                    "image is not a Moore family (must contain the whole space "
                    "and be closed under intersection)"
                )
            self._masks: Optional[frozenset[Mask]] = masks
        else:
            self._masks = None

    @property
    def masks(self) -> frozenset[Mask]:
        if self._masks is None:
            masks = self._image_fn()
            if len(masks) > DEFAULT_MAX_FAMILY:
                raise CapacityError(
                    f"materializing a family of {len(masks)} sets exceeds the bound"
                )
            if not _is_moore(self.space, masks):
                raise ValidationError("lazily built image is not a Moore family")
            self._masks = masks
        return self._masks

    @property
    def image(self) -> SetFamily:
        return SetFamily.of(self.space, self.masks)

    def __len__(self) -> int:
        return len(self.masks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AbstractDomain):
            return NotImplemented
        return self.space == other.space and self.masks == other.masks

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.space, self.masks))
        return self._hash

    def __repr__(self) -> str:
        return f"AbstractDomain({self.image!r})"

    def closure_mask(self, s: SetLike) -> Mask:
        """μ(S): the least image member containing S."""
        mask = _mask_of(self.space, s)
        if self._closure_fn is not None:
            return self._closure_fn(mask)
        acc = self.space.full_mask
        for m in self.masks:
            if mask & ~m == 0:
                acc &= m
        return acc

    def closure(self, s: StateSet) -> StateSet:
        return StateSet(self.space, self.closure_mask(s))

    # α and γ under the closed-set representation.
    alpha = closure

    def gamma(self, s: StateSet) -> StateSet:
        if not self.contains(s):
            raise ValidationError(f"{s!r} is not a member of the domain image")
        return s

    def contains(self, s: SetLike) -> bool:
        mask = _mask_of(self.space, s)
        if self._closure_fn is not None:
            return self._closure_fn(mask) == mask
        return mask in self.masks


def moore_close(family: SetFamily) -> AbstractDomain:
    """Least Moore family containing the input: M(X) = {∧S | S ⊆ X}.

    Always contains Σ (the empty meet) and is idempotent.
    """
    return AbstractDomain(
        family.space, image=_moore_close_masks(family.space, family.masks)
    )


def closure_of(domain: AbstractDomain, s: StateSet) -> StateSet:
    """μ(S) = intersection of all image members containing S."""
    return domain.closure(s)


def domain_leq(a1: AbstractDomain, a2: AbstractDomain) -> bool:
    """A1 ⊑ A2 (A1 at least as precise): image(A2) ⊆ image(A1)."""
    if a1.space != a2.space:
        raise SpaceMismatchError("domains over different spaces")
    return a2.masks <= a1.masks


def domain_meet(a1: AbstractDomain, a2: AbstractDomain) -> AbstractDomain:
    """Greatest lower bound in precision (reduced product): M(img₁ ∪ img₂)."""
    if a1.space != a2.space:
        raise SpaceMismatchError("domains over different spaces")
    return AbstractDomain(
        a1.space, image=_moore_close_masks(a1.space, a1.masks | a2.masks)
    )


def domain_join(a1: AbstractDomain, a2: AbstractDomain) -> AbstractDomain:
    """Least upper bound in precision: img₁ ∩ img₂ (meet-closed automatically)."""
    if a1.space != a2.space:
        raise SpaceMismatchError("domains over different spaces")
    return AbstractDomain(a1.space, image=a1.masks & a2.masks)


def powerset_domain(space: StateSpace) -> AbstractDomain:
    """The identical abstraction ℘(Σ): every subset is closed."""
    if space.n > 20:
        raise CapacityError(f"refusing to materialize ℘(Σ) for |Σ| = {space.n}")
    return AbstractDomain(space, image=frozenset(range(1 << space.n)))


def top_domain(space: StateSpace) -> AbstractDomain:
    """The most abstract domain {Σ} (λx.⊤)."""
    return AbstractDomain(space, image={space.full_mask})


def enumerate_moore_families(n: int) -> Iterator[AbstractDomain]:
    """Yield every Moore family over an n-state space exactly once.

    Candidates are all subsets of ℘(Σ) containing Σ, filtered for
    meet-closure.  n is capped because the count explodes (n = 4 already
    gives 2480 families out of 65536 candidates).
    """
    if n < 0 or n > MAX_ENUMERATION_STATES:
        raise CapacityError(
            f"enumeration supports 0 ≤ n ≤ {MAX_ENUMERATION_STATES}, got {n}"
        )
    space = StateSpace(tuple(str(i + 1) for i in range(n)))
    full = space.full_mask
    subsets = 1 << n
    for candidate in range(1 << subsets):
        if not (candidate >> full) & 1:
            continue
        members = [m for m in range(subsets) if (candidate >> m) & 1]
        ok = True
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                if not (candidate >> (a & b)) & 1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            yield AbstractDomain(space, image=frozenset(members))


def family_of_names(space: StateSpace, compact: Sequence[str]) -> SetFamily:
    """Build a family from compact set strings: "" is ∅, "124" is {1,2,4}.

    Only usable when every state name is a single character; test fixtures
    and built-in examples satisfy that.
    """
    groups = []
    for text in compact:
        groups.append([c for c in text])
    return SetFamily.from_names(space, groups)
