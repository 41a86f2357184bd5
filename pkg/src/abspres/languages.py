"""Language specifications, built-in operator semantics and concrete evaluation.

A language is a set of named atoms with fixed interpretations plus a set of
named operators, each defined by a transformer expression over the built-ins
(complement, meet, join, the four pre/post transformers, the until/release
fixpoints and bounded reachability).  Fixpoints are computed by
Knaster-Tarski iteration, which terminates on these finite lattices.

Shipped presets: L1 (atoms, ∧, ¬, EX), L2 (atoms, ∧, ¬, EU), L3 (atoms and
negated atoms, ∧, ∨, AX), CTL, the traffic-light language ``semaforo``
(atoms + AXX) and the bounded-reachability language ``exef`` (atoms, ∧,
EF[0,2]).  The ``full`` preset resolves every built-in.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .errors import ResolutionError, ValidationError
from .formulas import (
    App,
    Arg,
    Atom,
    Const,
    EF_PATTERN,
    Formula,
    Node,
    max_placeholder,
    parse_transformer,
)
from .kripke import KripkeModel
from .lattice import Mask, StateSet

PRESET_NAMES = ("L1", "L2", "L3", "CTL", "semaforo", "exef", "full")


@dataclass(frozen=True)
class Operator:
    """A named n-ary transformer: a body over built-ins and #k placeholders."""

    name: str
    arity: int
    body: Node

    def __post_init__(self):
        used = max_placeholder(self.body)
        if used > self.arity:
            raise ValidationError(
                f"operator {self.name!r} uses #{used} but has arity {self.arity}"
            )


def operator_from_expr(name: str, arity: int, expr: str) -> Operator:
    return Operator(name, arity, parse_transformer(expr))


def const_operator(name: str, value: StateSet) -> Operator:
    """A 0-ary transformer denoting a fixed set (atom interpretations)."""
    return Operator(name, 0, Const(value))


def _lfp(step: Callable[[Mask], Mask], bottom: Mask) -> Mask:
    z = bottom
    while True:
        nxt = step(z)
        if nxt == z:
            return z
        if z & ~nxt:
            raise ValidationError("lfp iteration is not ascending (operator not monotone?)")
        z = nxt


def _gfp(step: Callable[[Mask], Mask], top: Mask) -> Mask:
    z = top
    while True:
        nxt = step(z)
        if nxt == z:
            return z
        if nxt & ~z:
            raise ValidationError("gfp iteration is not descending (operator not monotone?)")
        z = nxt


def _eu(model: KripkeModel, s1: Mask, s2: Mask) -> Mask:
    return _lfp(lambda z: s2 | (s1 & model.pre(z)), 0)


def _au(model: KripkeModel, s1: Mask, s2: Mask) -> Mask:
    return _lfp(lambda z: s2 | (s1 & model.cpre(z)), 0)


def _er(model: KripkeModel, s1: Mask, s2: Mask) -> Mask:
    return _gfp(lambda z: s2 & (s1 | model.pre(z)), model.space.full_mask)


def _ar(model: KripkeModel, s1: Mask, s2: Mask) -> Mask:
    return _gfp(lambda z: s2 & (s1 | model.cpre(z)), model.space.full_mask)


def until_mask(model: KripkeModel, s1: Mask, s2: Mask) -> Mask:
    """EU(S1, S2) over masks; handy for the stuttering block criterion."""
    return _eu(model, s1, s2)


def _ef_bounded(model: KripkeModel, lo: int, hi: int, s: Mask) -> Mask:
    """EF_[lo,hi](S) = ∪_{i in [lo,hi]} pre^i(S)."""
    acc = 0
    cur = s
    for i in range(hi + 1):
        if i >= lo:
            acc |= cur
        cur = model.pre(cur)
    return acc


_BUILTIN_TABLE: dict[str, tuple[int, Callable[..., Mask]]] = {
    "not": (1, lambda model, full, a: full & ~a),
    "and": (2, lambda model, full, a, b: a & b),
    "or": (2, lambda model, full, a, b: a | b),
    "EX": (1, lambda model, full, a: model.pre(a)),
    "AX": (1, lambda model, full, a: model.cpre(a)),
    "pre": (1, lambda model, full, a: model.pre(a)),
    "post": (1, lambda model, full, a: model.post(a)),
    "pre~": (1, lambda model, full, a: model.cpre(a)),
    "post~": (1, lambda model, full, a: model.cpost(a)),
    "EU": (2, lambda model, full, a, b: _eu(model, a, b)),
    "AU": (2, lambda model, full, a, b: _au(model, a, b)),
    "ER": (2, lambda model, full, a, b: _er(model, a, b)),
    "AR": (2, lambda model, full, a, b: _ar(model, a, b)),
}


def builtin_arity(name: str) -> Optional[int]:
    if name in _BUILTIN_TABLE:
        return _BUILTIN_TABLE[name][0]
    if EF_PATTERN.match(name):
        return 1
    return None


def eval_node(node: Node, model: KripkeModel, args: Sequence[Mask] = ()) -> Mask:
    """Evaluate a transformer body over the model; atoms are not allowed here."""
    full = model.space.full_mask
    if isinstance(node, Const):
        if node.value.space != model.space:
            raise ValidationError("constant set over a different space")
        return node.value.mask
    if isinstance(node, Arg):
        if node.index > len(args):
            raise ValidationError(f"missing argument #{node.index}")
        return args[node.index - 1]
    if isinstance(node, Atom):
        raise ResolutionError(
            f"atom {node.name!r} cannot appear inside an operator definition"
        )
    vals = [eval_node(a, model, args) for a in node.args]
    entry = _BUILTIN_TABLE.get(node.op)
    if entry is not None:
        arity, fn = entry
        if arity != len(vals):
            raise ValidationError(f"{node.op} expects {arity} arguments")
        return fn(model, full, *vals)
    m = EF_PATTERN.match(node.op)
    if m is not None:
        (val,) = vals
        return _ef_bounded(model, int(m.group(1)), int(m.group(2)), val)
    raise ResolutionError(f"unknown built-in operator {node.op!r}")


def apply_operator(op: Operator, model: KripkeModel, args: Sequence[Mask]) -> Mask:
    if len(args) != op.arity:
        raise ValidationError(f"{op.name} expects {op.arity} arguments, got {len(args)}")
    return eval_node(op.body, model, args)


def builtin_operator(name: str) -> Operator:
    arity = builtin_arity(name)
    if arity is None:
        raise ResolutionError(f"unknown built-in operator {name!r}")
    return Operator(name, arity, App(name, tuple(Arg(i + 1) for i in range(arity))))


@dataclass(frozen=True)
class LanguageSpec:
    """Atoms with interpretations plus named operators, bound to one space.

    ``open_ops`` lets resolution fall through to any built-in (the ``full``
    preset); closed languages reject operators they do not list.
    """

    name: str
    atoms: tuple[tuple[str, StateSet], ...]
    operators: tuple[Operator, ...] = ()
    open_ops: bool = False

    def __post_init__(self):
        names = [n for n, _ in self.atoms] + [op.name for op in self.operators]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate atom/operator names in language")

    @property
    def atom_map(self) -> dict[str, StateSet]:
        return dict(self.atoms)

    def atom_mask(self, name: str) -> Mask:
        for n, s in self.atoms:
            if n == name:
                return s.mask
        raise ResolutionError(f"unknown atom {name!r} in language {self.name}")

    def has_atom(self, name: str) -> bool:
        return any(n == name for n, _ in self.atoms)

    def operator(self, name: str) -> Operator:
        for op in self.operators:
            if op.name == name:
                return op
        if self.open_ops and builtin_arity(name) is not None:
            return builtin_operator(name)
        raise ResolutionError(f"unknown operator {name!r} in language {self.name}")

    def has_operator(self, name: str) -> bool:
        if any(op.name == name for op in self.operators):
            return True
        return self.open_ops and builtin_arity(name) is not None


def resolve_application(lang: LanguageSpec, phi: App) -> App | Atom:
    """Map ¬p to a negated-atom literal when the language has one but no ¬."""
    if (
        phi.op == "not"
        and not lang.has_operator("not")
        and len(phi.args) == 1
        and isinstance(phi.args[0], Atom)
        and lang.has_atom("!" + phi.args[0].name)
    ):
        return Atom("!" + phi.args[0].name)
    return phi


def eval_formula(
    phi: Formula,
    lang: LanguageSpec,
    atom_fn: Callable[[str], Mask],
    apply_fn: Callable[[Operator, tuple[Mask, ...]], Mask],
) -> Mask:
    """Shared inductive evaluator; concrete and abstract semantics plug in
    their atom interpretation and operator application."""
    if isinstance(phi, Atom):
        return atom_fn(phi.name)
    if isinstance(phi, (Arg, Const)):
        raise ResolutionError("placeholders are not state formulae")
    resolved = resolve_application(lang, phi)
    if isinstance(resolved, Atom):
        return atom_fn(resolved.name)
    op = lang.operator(resolved.op)
    args = tuple(eval_formula(a, lang, atom_fn, apply_fn) for a in resolved.args)
    return apply_fn(op, args)


def eval_concrete(phi: Formula, model: KripkeModel, lang: LanguageSpec) -> StateSet:
    """⟦φ⟧: the set of states satisfying φ under the language's interpretation."""
    mask = eval_formula(
        phi,
        lang,
        lang.atom_mask,
        lambda op, args: apply_operator(op, model, args),
    )
    return StateSet(model.space, mask)


def _model_atoms(model: KripkeModel) -> tuple[tuple[str, StateSet], ...]:
    return tuple(
        (name, StateSet(model.space, mask)) for name, mask in model.label_items
    )


def _ops(*names: str) -> tuple[Operator, ...]:
    return tuple(builtin_operator(n) for n in names)


def preset_language(name: str, model: KripkeModel) -> LanguageSpec:
    """Instantiate a shipped preset against a model (atoms from its labels)."""
    atoms = _model_atoms(model)
    if name == "L1":
        return LanguageSpec("L1", atoms, _ops("and", "not", "EX"))
    if name == "L2":
        return LanguageSpec("L2", atoms, _ops("and", "not", "EU"))
    if name == "L3":
        literals = list(atoms)
        for label, s in atoms:
            literals.append(("!" + label, ~s))
        return LanguageSpec("L3", tuple(literals), _ops("and", "or", "AX"))
    if name == "CTL":
        return LanguageSpec(
            "CTL", atoms, _ops("and", "not", "AX", "EX", "AU", "EU", "AR", "ER")
        )
    if name == "semaforo":
        axx = operator_from_expr("AXX", 1, "AX AX #1")
        return LanguageSpec("semaforo", atoms, (axx,))
    if name == "exef":
        return LanguageSpec("exef", atoms, _ops("and", "EF[0,2]"))
    if name == "full":
        return LanguageSpec("full", atoms, (), open_ops=True)
    raise ValidationError(f"unknown language preset {name!r}")


def language_from_ops(
    model: KripkeModel,
    op_names: Iterable[str],
    atoms: Optional[Mapping[str, Iterable[str]]] = None,
    name: str = "custom",
) -> LanguageSpec:
    """Convenience builder: built-in operators by name, atoms from the model
    labels unless given explicitly."""
    if atoms is None:
        atom_items = _model_atoms(model)
    else:
        atom_items = tuple(
            (k, model.space.set_of(v)) for k, v in atoms.items()
        )
    return LanguageSpec(name, atom_items, _ops(*op_names))


def language_from_json(doc: object, model: KripkeModel) -> LanguageSpec:
    """Decode the language file format.

    {"atoms": {"p": null | ["s", ...]}, "operators": [{"name": ..,
    "arity": .., "expr": ..}], "preset": "L1|L2|L3|CTL|semaforo|exef|null"}

    A null atom interpretation resolves to the model's label of the same
    name.  A preset provides the base language; atoms/operators in the file
    extend or override it.  Operators without an "expr" must name built-ins.
    """
    if not isinstance(doc, dict):
        raise ValidationError("language file must contain a JSON object")
    preset = doc.get("preset")
    if preset is not None:
        base = preset_language(preset, model)
        atom_items = list(base.atoms)
        operators = list(base.operators)
        open_ops = base.open_ops
        name = preset
    else:
        atom_items = []
        operators = []
        open_ops = False
        name = "file"
        if "atoms" not in doc:
            atom_items = list(_model_atoms(model))
    for atom, interp in (doc.get("atoms") or {}).items():
        if interp is None:
            value = StateSet(model.space, model.label_mask(atom))
        else:
            value = model.space.set_of(interp)
        atom_items = [(n, s) for n, s in atom_items if n != atom]
        atom_items.append((atom, value))
    for entry in doc.get("operators") or []:
        op_name = entry["name"]
        if "expr" in entry and entry["expr"] is not None:
            arity = int(entry.get("arity", max_placeholder(parse_transformer(entry["expr"]))))
            op = Operator(op_name, arity, parse_transformer(entry["expr"]))
        else:
            op = builtin_operator(op_name)
        operators = [o for o in operators if o.name != op_name]
        operators.append(op)
    return LanguageSpec(name, tuple(atom_items), tuple(operators), open_ops)


def load_language(spec: str, model: KripkeModel) -> LanguageSpec:
    """Resolve a --lang value: a preset name or a language-file path."""
    if spec in PRESET_NAMES:
        return preset_language(spec, model)
    with open(spec, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"language file {spec}: {exc}") from None
    return language_from_json(doc, model)
