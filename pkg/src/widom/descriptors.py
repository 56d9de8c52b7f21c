"""JSON descriptors for sets, weights and polynomials.

Sets::

    {"type": "intervals", "data": [[a, b], ...]}
    {"type": "unit_circle"}
    {"type": "circle", "center": [re, im], "radius": r}
    {"type": "preimage", "coeffs": [c0, ..., cm]}

A product set is a list of set descriptors, or one of the model-set names
``"polydisk:n"``, ``"ball2"``, ``"realball2"``, ``"simplex:n"``.

Weights::

    {"type": "constant", "value": c}
    {"type": "abs_power", "center": x0, "exponent": p, "scale": s}
    {"type": "piecewise", "breakpoints": [...], "values": [...]}
    {"type": "product", "factors": [weight, ...]}

Polynomials::

    {"terms": [{"alpha": [k1, ..., kn], "re": x, "im": y}, ...]}
"""

from __future__ import annotations

import json
from typing import Any

from . import modelsets, sets1d
from .productnd import ProductSet, ProductWeight, SparsePolyND
from .sets1d import CompactSet1D, Weight1D

MODEL_TYPES = (modelsets.Polydisk, modelsets.EuclideanBall2, modelsets.RealBall2, modelsets.Simplex)


class DescriptorError(ValueError):
    """A malformed descriptor; the message names the offending field."""


def load_json(text_or_obj) -> Any:
    """Accept parsed JSON, a JSON string, or ``@path`` naming a JSON file."""
    if not isinstance(text_or_obj, str):
        return text_or_obj
    s = text_or_obj.strip()
    if s.startswith("@"):
        with open(s[1:], encoding="utf-8") as fh:
            return json.load(fh)
    try:
        return json.loads(s)
    except json.JSONDecodeError:
        return s  # bare model-set names


def _field(d: dict, key: str, where: str):
    try:
        return d[key]
    except (KeyError, TypeError):
        raise DescriptorError(f"{where}: missing field {key!r}") from None


def parse_set(desc) -> CompactSet1D:
    desc = load_json(desc)
    if not isinstance(desc, dict):
        raise DescriptorError(f"set descriptor must be an object, got {desc!r}")
    kind = _field(desc, "type", "set")
    try:
        if kind == "intervals":
            return sets1d.Intervals(tuple(tuple(ab) for ab in _field(desc, "data", "set")))
        if kind == "unit_circle":
            return sets1d.UnitCircle()
        if kind == "circle":
            c = desc.get("center", [0.0, 0.0])
            c = complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
            return sets1d.Circle(c, float(_field(desc, "radius", "set")))
        if kind == "preimage":
            return sets1d.PolynomialPreimage(tuple(float(v) for v in _field(desc, "coeffs", "set")))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DescriptorError):
            raise
        raise DescriptorError(f"set {kind!r}: {exc}") from exc
    raise DescriptorError(f"set: unknown type {kind!r}")


def set_to_json(K: CompactSet1D) -> dict:
    if isinstance(K, sets1d.UnitCircle):
        return {"type": "unit_circle"}
    if isinstance(K, sets1d.Circle):
        return {"type": "circle", "center": [K.center.real, K.center.imag], "radius": K.radius}
    if isinstance(K, sets1d.PolynomialPreimage):
        return {"type": "preimage", "coeffs": list(K.coeffs)}
    return {"type": "intervals", "data": [list(ab) for ab in K.components]}


def parse_product_set(desc):
    """A :class:`ProductSet`, or a model set when ``desc`` is a model name."""
    desc = load_json(desc)
    if isinstance(desc, str):
        try:
            model = modelsets.parse_model(desc)
        except ValueError as exc:
            raise DescriptorError(f"set: {exc}") from None
        return model
    if isinstance(desc, dict):
        return ProductSet((parse_set(desc),))
    if isinstance(desc, list) and desc:
        return ProductSet(tuple(parse_set(d) for d in desc))
    raise DescriptorError(f"set: expected a descriptor, a list of descriptors or a model name, got {desc!r}")


def as_product_set(K) -> ProductSet:
    """Model polydisks become products of unit circles; other model sets are not products."""
    if isinstance(K, ProductSet):
        return K
    if isinstance(K, modelsets.Polydisk):
        return ProductSet((sets1d.UnitCircle(),) * K.n)
    raise DescriptorError(f"set: {modelsets.model_name(K)} is not a product set")


def parse_weight(desc) -> Weight1D:
    desc = load_json(desc)
    if desc is None:
        return sets1d.Constant(1.0)
    if isinstance(desc, (int, float)):
        return sets1d.Constant(float(desc))
    if not isinstance(desc, dict):
        raise DescriptorError(f"weight descriptor must be an object, got {desc!r}")
    kind = _field(desc, "type", "weight")
    try:
        if kind == "constant":
            return sets1d.Constant(float(_field(desc, "value", "weight")))
        if kind == "abs_power":
            return sets1d.AbsPower(float(desc.get("center", 0.0)), float(_field(desc, "exponent", "weight")),
                                   float(desc.get("scale", 1.0)))
        if kind == "piecewise":
            bv = desc.get("break_values")
            return sets1d.PiecewiseConstant(tuple(_field(desc, "breakpoints", "weight")),
                                            tuple(_field(desc, "values", "weight")),
                                            None if bv is None else tuple(bv))
        if kind == "product":
            return sets1d.Product(tuple(parse_weight(f) for f in _field(desc, "factors", "weight")))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DescriptorError):
            raise
        raise DescriptorError(f"weight {kind!r}: {exc}") from exc
    raise DescriptorError(f"weight: unknown type {kind!r}")


def parse_product_weight(desc, n: int) -> ProductWeight:
    desc = load_json(desc)
    if desc is None:
        return ProductWeight.ones(n)
    if isinstance(desc, list):
        if len(desc) != n:
            raise DescriptorError(f"weight: {len(desc)} factors given for a set with {n}")
        return ProductWeight(tuple(parse_weight(d) for d in desc))
    if n == 1:
        return ProductWeight((parse_weight(desc),))
    raise DescriptorError("weight: a product set needs a list of factor weights")


def parse_poly(desc) -> SparsePolyND:
    desc = load_json(desc)
    terms = _field(desc, "terms", "polynomial")
    out = {}
    for t in terms:
        alpha = tuple(int(a) for a in _field(t, "alpha", "polynomial term"))
        re, im = float(t.get("re", 0.0)), float(t.get("im", 0.0))
        out[alpha] = out.get(alpha, 0) + (complex(re, im) if im else re)
    if not out:
        raise DescriptorError("polynomial: no terms")
    return SparsePolyND(out)


def poly_to_json(P: SparsePolyND) -> dict:
    terms = []
    for a in sorted(P.terms):
        c = complex(P.terms[a])
        terms.append({"alpha": list(a), "re": c.real, "im": c.imag})
    return {"terms": terms}
