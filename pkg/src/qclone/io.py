"""JSON serialization: POVM files and report documents.

Complex numbers are written as ``[re, im]`` pairs and matrices row-major;
exact rationals appear as ``"p/q"`` strings next to their decimal value.
"""
import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import QCloneError
from .povm import SUPPORTS, Povm, PovmElement, selector_dim


class PovmFileError(QCloneError):
    """The POVM document is malformed."""


def complex_list(a):
    """Flatten an array row-major into ``[[re, im], ...]``."""
    return [[float(z.real), float(z.imag)] for z in np.asarray(a, dtype=np.complex128).reshape(-1)]


def parse_complex_list(data, shape):
    arr = np.asarray(data, dtype=float)
    n = int(np.prod(shape))
    if arr.shape == tuple(shape) + (2,):
        arr = arr.reshape(n, 2)
    if arr.shape != (n, 2):
        raise PovmFileError(f"expected {n} [re, im] pairs for shape {shape}, got array of shape {arr.shape}")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(shape)


def number(x):
    """JSON-friendly number; fractions carry their exact form."""
    if isinstance(x, Fraction):
        return {"exact": f"{x.numerator}/{x.denominator}", "decimal": float(x)}
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def povm_to_dict(povm):
    return {
        "dim": povm.dim,
        "selector": povm.selector,
        "support": povm.support,
        "labels": list(povm.labels),
        "elements": [complex_list(e.matrix) for e in povm.elements],
    }


def povm_from_dict(doc):
    try:
        dim = int(doc["dim"])
        selector = doc["selector"]
        support = doc.get("support", "full")
        raw = doc["elements"]
    except (KeyError, TypeError, ValueError) as exc:
        raise PovmFileError(f"missing or invalid POVM field: {exc}") from None
    try:
        expected = selector_dim(selector)
    except QCloneError as exc:
        raise PovmFileError(str(exc)) from None
    if dim != expected:
        raise PovmFileError(f"dim {dim} does not match selector {selector!r} (dimension {expected})")
    if support not in SUPPORTS:
        raise PovmFileError(f"unknown support {support!r}")
    if not isinstance(raw, list) or not raw:
        raise PovmFileError("elements must be a non-empty list")
    try:
        elements = tuple(PovmElement(selector, parse_complex_list(m, (dim, dim))) for m in raw)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, PovmFileError):
            raise
        raise PovmFileError(f"bad element data: {exc}") from None
    labels = doc.get("labels") or [str(i) for i in range(len(elements))]
    if len(labels) != len(elements):
        raise PovmFileError("labels and elements differ in length")
    return Povm(elements, support, tuple(labels))


BUILTIN_POVMS = ("six-state", "tetrahedron", "identity")


def load_povm(path):
    """Read a POVM document; ``builtin:<name>`` loads one of the packaged files."""
    path = str(path)
    try:
        if path.startswith("builtin:"):
            name = path.split(":", 1)[1]
            if name not in BUILTIN_POVMS:
                raise PovmFileError(f"unknown builtin POVM {name!r}; have {', '.join(BUILTIN_POVMS)}")
            text = resources.files("qclone").joinpath("data", f"{name}.json").read_text()
        else:
            text = Path(path).read_text()
        doc = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise PovmFileError(f"cannot read POVM file {path}: {exc}") from None
    return povm_from_dict(doc)


def save_povm(povm, path):
    Path(path).write_text(json.dumps(povm_to_dict(povm), indent=2) + "\n")


def _default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, Fraction):
        return number(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps_report(doc):
    """Stable JSON rendering (insertion order preserved, fixed float repr)."""
    return json.dumps(doc, indent=2, allow_nan=True, default=_default) + "\n"
