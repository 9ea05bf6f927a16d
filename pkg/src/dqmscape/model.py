"""Discrete quadratic models: storage, evaluation, random generation and JSON I/O.

A model has ``k`` discrete variables (registers), each taking one of ``l``
values.  Its energy is a sum of coefficients ``C[(i, j, alpha, beta)]`` over
pairs of (variable, value) selections, where ``i >= j``.  Keys are kept in a
canonical form so that every interaction has exactly one storage slot:

* ``0 <= j <= i < k`` and ``0 <= alpha, beta < l``
* when ``i == j`` we require ``alpha >= beta``; ``alpha == beta`` is the
  linear term of value ``alpha`` of register ``i``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from json.decoder import JSONObject
from json.scanner import py_make_scanner
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import FormatError

Key = tuple[int, int, int, int]

__all__ = [
    "DqmInstance",
    "Key",
    "canonical_keys",
    "canonical_key",
    "check_assignment",
    "evaluate_dqm",
    "random_dqm",
    "parse_dqm",
    "serialize_dqm",
    "load_dqm",
    "save_dqm",
]


def canonical_key(i: int, j: int, alpha: int, beta: int) -> Key:
    """Fold an arbitrary interaction key into canonical form."""
    if i < j:
        i, j, alpha, beta = j, i, beta, alpha
    if i == j and alpha < beta:
        alpha, beta = beta, alpha
    return (i, j, alpha, beta)


def canonical_keys(k: int, l: int) -> Iterator[Key]:
    """Yield every canonical key for a ``(k, l)`` model in sorted order."""
    for i in range(k):
        for j in range(i + 1):
            for alpha in range(l):
                for beta in range(l):
                    if i == j and alpha < beta:
                        continue
                    yield (i, j, alpha, beta)


def _check_dims(k, l) -> None:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if isinstance(l, bool) or not isinstance(l, (int, np.integer)) or l < 2:
        raise ValueError(f"l must be an integer >= 2, got {l!r}")


def _key_problem(key, k: int, l: int) -> str | None:
    if not (isinstance(key, tuple) and len(key) == 4):
        return f"key {key!r} is not a 4-tuple"
    if not all(isinstance(v, (int, np.integer)) and not isinstance(v, bool) for v in key):
        return f"key {key!r} has non-integer entries"
    i, j, alpha, beta = key
    if not (0 <= i < k and 0 <= j < k):
        return f"register index out of range in {key!r} (k={k})"
    if not (0 <= alpha < l and 0 <= beta < l):
        return f"value index out of range in {key!r} (l={l})"
    if i < j:
        return f"non-canonical key {key!r}: requires i >= j"
    if i == j and alpha < beta:
        return f"non-canonical key {key!r}: requires alpha >= beta when i == j"
    return None


@dataclass(frozen=True)
class DqmInstance:
    """Immutable discrete quadratic model with uniform register size ``l``."""

    k: int
    l: int
    terms: Mapping[Key, float]

    def __post_init__(self):
        _check_dims(self.k, self.l)
        clean = {}
        for key, value in self.terms.items():
            key = tuple(int(v) for v in key) if isinstance(key, (tuple, list)) else key
            problem = _key_problem(key, self.k, self.l)
            if problem:
                raise ValueError(problem)
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"coefficient for {key} is not finite: {value}")
            clean[key] = value
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "l", int(self.l))
        object.__setattr__(self, "terms", MappingProxyType(dict(sorted(clean.items()))))

    @classmethod
    def from_terms(cls, k: int, l: int, terms: Iterable[tuple[Sequence[int], float]] | Mapping) -> "DqmInstance":
        """Build an instance from possibly non-canonical keys, summing collisions."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Key, float] = {}
        for key, value in items:
            ckey = canonical_key(*key)
            acc[ckey] = acc.get(ckey, 0.0) + float(value)
        return cls(k, l, acc)

    def __add__(self, other: "DqmInstance") -> "DqmInstance":
        if (self.k, self.l) != (other.k, other.l):
            raise ValueError("cannot add models of different dimensions")
        return DqmInstance.from_terms(self.k, self.l, [*self.terms.items(), *other.terms.items()])

    @property
    def num_assignments(self) -> int:
        return self.l**self.k


def check_assignment(k: int, l: int, values: Sequence[int]) -> tuple[int, ...]:
    """Validate a discrete assignment and return it as a tuple."""
    values = tuple(int(v) for v in values)
    if len(values) != k:
        raise ValueError(f"assignment has {len(values)} entries, expected k={k}")
    for i, v in enumerate(values):
        if not 0 <= v < l:
            raise ValueError(f"assignment entry {i} = {v} outside [0, {l})")
    return values


def evaluate_dqm(dqm: DqmInstance, assignment: Sequence[int]) -> float:
    """Energy of a discrete assignment.

    Within a register only the diagonal ``alpha == beta`` key can fire, since
    a register selects exactly one value.
    """
    a = check_assignment(dqm.k, dqm.l, assignment)
    total = 0.0
    for (i, j, alpha, beta), value in dqm.terms.items():
        if a[i] == alpha and a[j] == beta:
            total += value
    return total


def random_dqm(
    k: int,
    l: int,
    coeff_lo: float,
    coeff_hi: float,
    seed=None,
    *,
    continuous: bool = False,
) -> DqmInstance:
    """Dense random instance with every canonical slot filled.

    Coefficients are integers drawn uniformly from ``[coeff_lo, coeff_hi]``
    (inclusive), or reals from the same interval when ``continuous`` is set.
    ``seed`` is anything :func:`numpy.random.default_rng` accepts, including
    an existing ``Generator`` (which is advanced in place).
    """
    _check_dims(k, l)
    if coeff_lo > coeff_hi:
        raise ValueError(f"empty coefficient range [{coeff_lo}, {coeff_hi}]")
    rng = np.random.default_rng(seed)
    keys = list(canonical_keys(k, l))
    if continuous:
        values = rng.uniform(coeff_lo, coeff_hi, size=len(keys))
    else:
        if int(coeff_lo) != coeff_lo or int(coeff_hi) != coeff_hi:
            raise ValueError("integer coefficient bounds required unless continuous=True")
        values = rng.integers(int(coeff_lo), int(coeff_hi), size=len(keys), endpoint=True)
    return DqmInstance(k, l, {key: float(v) for key, v in zip(keys, values)})


# ---------------------------------------------------------------------------
# JSON document format
# ---------------------------------------------------------------------------


class _LocatedDict(dict):
    lineno: int = 0


class _LineTrackingDecoder(json.JSONDecoder):
    """JSON decoder whose objects remember the line they started on."""

    def __init__(self):
        super().__init__()

        def parse_object(s_and_end, *args, **kwargs):
            s, end = s_and_end
            obj, new_end = JSONObject(s_and_end, *args, **kwargs)
            located = _LocatedDict(obj)
            located.lineno = s.count("\n", 0, end) + 1
            return located, new_end

        self.parse_object = parse_object
        self.scan_once = py_make_scanner(self)


def _require_int(obj: dict, name: str, lineno: int) -> int:
    if name not in obj:
        raise FormatError(f"missing field {name!r}", lineno)
    value = obj[name]
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"field {name!r} must be an integer, got {value!r}", lineno)
    return value


def parse_dqm(text: str) -> DqmInstance:
    """Parse a DQM JSON document.

    Terms must already be canonical and unique; errors carry the line number
    of the offending term.
    """
    try:
        doc = _LineTrackingDecoder().decode(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict):
        raise FormatError("top-level value must be an object", 1)
    top = doc.lineno
    k = _require_int(doc, "k", top)
    l = _require_int(doc, "l", top)
    try:
        _check_dims(k, l)
    except ValueError as exc:
        raise FormatError(str(exc), top) from None
    raw_terms = doc.get("terms")
    if not isinstance(raw_terms, list):
        raise FormatError("field 'terms' must be a list", top)

    terms: dict[Key, float] = {}
    for entry in raw_terms:
        lineno = getattr(entry, "lineno", top)
        if not isinstance(entry, dict):
            raise FormatError(f"term must be an object, got {entry!r}", lineno)
        key = tuple(_require_int(entry, f, lineno) for f in ("i", "j", "alpha", "beta"))
        problem = _key_problem(key, k, l)
        if problem:
            raise FormatError(problem, lineno)
        if key in terms:
            raise FormatError(f"duplicate key {key}", lineno)
        value = entry.get("value")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise FormatError(f"term value must be a number, got {value!r}", lineno)
        if not math.isfinite(value):
            raise FormatError(f"term value is not finite: {value!r}", lineno)
        terms[key] = float(value)
    return DqmInstance(k, l, terms)


def serialize_dqm(dqm: DqmInstance) -> str:
    """Render ``dqm`` as a JSON document, one term per line, sorted by key."""
    lines = [f'{{"k": {dqm.k}, "l": {dqm.l}, "terms": [']
    rows = [
        f'  {{"i": {i}, "j": {j}, "alpha": {a}, "beta": {b}, "value": {json.dumps(v)}}}'
        for (i, j, a, b), v in sorted(dqm.terms.items())
    ]
    if rows:
        lines.append(",\n".join(rows))
    lines.append("]}")
    return "\n".join(lines) + "\n"


def load_dqm(path) -> DqmInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_dqm(fh.read())


def save_dqm(dqm: DqmInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_dqm(dqm))
