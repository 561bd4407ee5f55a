"""Plain-text s-expression serialization of field descriptors.

The grammar is documented in docs/descriptor_format.md; floats are printed
with ``repr`` so parse(print(d)) reproduces the descriptor exactly.
Callbacks serialize by registered name only.
"""

from __future__ import annotations

import numpy as np

from . import field as fd
from .profiles import (PiecewiseScalar, PolyProfile, Profile, SharpeningWave,
                       SharpeningWaveIntegral, SquareWave, TriangleWave)


class DescriptorSyntaxError(ValueError):
    """Malformed descriptor text."""


# ---------------------------------------------------------------------------
# printing


def _fmt_float(x: float) -> str:
    return repr(float(x))


def _fmt_nested(data) -> str:
    a = np.asarray(data)
    if a.ndim == 0:
        return _fmt_float(float(a))
    if a.ndim == 1:
        return "(" + " ".join(_fmt_float(v) for v in a) + ")"
    return "(" + " ".join(_fmt_nested(row) for row in a) + ")"


def _print_profile(profile: Profile) -> str:
    if isinstance(profile, PolyProfile):
        return (f"(poly {_fmt_float(profile.c0)} {_fmt_float(profile.c1)} "
                f"{_fmt_float(profile.c2)})")
    if isinstance(profile, PiecewiseScalar):
        breaks = " ".join(_fmt_float(b) for b in profile.breakpoints)
        coeffs = " ".join(_fmt_nested(row) for row in profile.coeffs)
        return (f"(pw (breaks {breaks}) (coeffs {coeffs}) "
                f"{profile.left_tail} {profile.right_tail})")
    names = {SharpeningWave: "(sharpening-wave)",
             SquareWave: "(square-wave)",
             SharpeningWaveIntegral: "(sharpening-integral)",
             TriangleWave: "(triangle-wave)"}
    for cls, text in names.items():
        if type(profile) is cls:
            return text
    raise DescriptorSyntaxError(f"profile {type(profile).__name__} does not "
                                "serialize")


def _print_node(node: fd.Node) -> str:
    if isinstance(node, fd.Constant):
        return f"(const {_fmt_nested(node.data)})"
    if isinstance(node, fd.LinearInX):
        return f"(linear {_fmt_nested(node.matrix)})"
    if isinstance(node, fd.TimeFn):
        return f"(time {_print_profile(node.profile)})"
    if isinstance(node, fd.ShiftCompose):
        return f"(shift {_print_profile(node.profile)} {_fmt_float(node.a)})"
    if isinstance(node, fd.Sum):
        return "(sum " + " ".join(_print_node(t) for t in node.terms) + ")"
    if isinstance(node, fd.ScalarScale):
        return f"(scale {_fmt_float(node.factor)} {_print_node(node.inner)})"
    if isinstance(node, fd.MatrixAssemble):
        rows = " ".join("(" + " ".join(_print_node(e) for e in row) + ")"
                        for row in node.entries)
        return f"(matrix {rows})"
    if isinstance(node, fd.Translate):
        return f"(translate {_fmt_float(node.tau)} {_print_node(node.inner)})"
    if isinstance(node, fd.Callback):
        return f"(callback {node.name})"
    raise DescriptorSyntaxError(f"node {type(node).__name__} does not serialize")


def print_descriptor(d: fd.FieldDescriptor) -> str:
    parts = [f"(field :p {_fmt_float(d.p)} :class {d.class_claim} "
             f":dim {d.dim_in} {_print_node(d.node)}"]
    if d.jacobian is not None:
        parts.append(f":jacobian {_print_node(d.jacobian.node)} "
                     f":jacobian-class {d.jacobian.class_claim}")
    return " ".join(parts) + ")"


# ---------------------------------------------------------------------------
# parsing


def _tokenize(text: str) -> list[str]:
    out = []
    for raw in text.replace("(", " ( ").replace(")", " ) ").split():
        out.append(raw)
    return out


def _read(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise DescriptorSyntaxError("unexpected end of input")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while tokens[pos] != ")":
            item, pos = _read(tokens, pos)
            items.append(item)
            if pos >= len(tokens):
                raise DescriptorSyntaxError("missing closing parenthesis")
        return items, pos + 1
    if tok == ")":
        raise DescriptorSyntaxError("unbalanced parenthesis")
    return tok, pos + 1


def _as_float(atom) -> float:
    try:
        return float(atom)
    except (TypeError, ValueError):
        raise DescriptorSyntaxError(f"expected a number, got {atom!r}") from None


def _nested_floats(item):
    if isinstance(item, list):
        return tuple(_nested_floats(sub) for sub in item)
    return _as_float(item)


def _parse_profile(form) -> Profile:
    if not isinstance(form, list) or not form:
        raise DescriptorSyntaxError(f"bad profile form {form!r}")
    head = form[0]
    if head == "poly":
        return PolyProfile(*[_as_float(v) for v in form[1:4]])
    if head == "pw":
        sections = {sec[0]: sec[1:] for sec in form[1:3]}
        breaks = [_as_float(v) for v in sections["breaks"]]
        coeffs = [_nested_floats(row) for row in sections["coeffs"]]
        left, right = form[3], form[4]
        return PiecewiseScalar(breaks, coeffs, left, right)
    simple = {"sharpening-wave": SharpeningWave,
              "square-wave": SquareWave,
              "sharpening-integral": SharpeningWaveIntegral,
              "triangle-wave": TriangleWave}
    if head in simple:
        return simple[head]()
    raise DescriptorSyntaxError(f"unknown profile {head!r}")


def _parse_node(form) -> fd.Node:
    if not isinstance(form, list) or not form:
        raise DescriptorSyntaxError(f"bad node form {form!r}")
    head, rest = form[0], form[1:]
    if head == "const":
        data = _nested_floats(rest[0])
        return fd.Constant(data if isinstance(data, tuple) else (data,))
    if head == "linear":
        data = _nested_floats(rest[0])
        if not isinstance(data, tuple):
            data = ((data,),)
        elif data and not isinstance(data[0], tuple):
            data = (data,)
        return fd.LinearInX(data)
    if head == "time":
        return fd.TimeFn(_parse_profile(rest[0]))
    if head == "shift":
        return fd.ShiftCompose(_parse_profile(rest[0]), _as_float(rest[1]))
    if head == "sum":
        return fd.Sum(tuple(_parse_node(t) for t in rest))
    if head == "scale":
        return fd.ScalarScale(_as_float(rest[0]), _parse_node(rest[1]))
    if head == "matrix":
        return fd.MatrixAssemble(tuple(tuple(_parse_node(e) for e in row)
                                       for row in rest))
    if head == "translate":
        return fd.Translate(_as_float(rest[0]), _parse_node(rest[1]))
    if head == "callback":
        name = rest[0]
        if name not in fd.CALLBACK_REGISTRY:
            raise DescriptorSyntaxError(f"callback {name!r} is not registered")
        return fd.CALLBACK_REGISTRY[name]
    raise DescriptorSyntaxError(f"unknown node kind {head!r}")


def parse_descriptor(text: str) -> fd.FieldDescriptor:
    form, end = _read(_tokenize(text), 0)
    if end != len(_tokenize(text)):
        raise DescriptorSyntaxError("trailing tokens after descriptor")
    if not isinstance(form, list) or not form or form[0] != "field":
        raise DescriptorSyntaxError("descriptor must be a (field ...) form")
    p, claim, dim = 1.0, fd.SC, 1
    node = None
    jac_node = None
    jac_claim = fd.SC
    items = form[1:]
    i = 0
    while i < len(items):
        item = items[i]
        if item == ":p":
            p, i = _as_float(items[i + 1]), i + 2
        elif item == ":class":
            claim, i = items[i + 1], i + 2
        elif item == ":dim":
            dim, i = int(_as_float(items[i + 1])), i + 2
        elif item == ":jacobian":
            jac_node, i = _parse_node(items[i + 1]), i + 2
        elif item == ":jacobian-class":
            jac_claim, i = items[i + 1], i + 2
        elif isinstance(item, list):
            if node is not None:
                raise DescriptorSyntaxError("descriptor has two expression trees")
            node, i = _parse_node(item), i + 1
        else:
            raise DescriptorSyntaxError(f"unexpected token {item!r}")
    if node is None:
        raise DescriptorSyntaxError("descriptor has no expression tree")
    jac = None
    if jac_node is not None:
        jac = fd.FieldDescriptor(jac_node, dim, p, jac_claim)
    return fd.FieldDescriptor(node, dim, p, claim, jacobian=jac)
