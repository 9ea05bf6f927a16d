"""QUBO encodings of discrete quadratic models.

An encoded instance is a :class:`QuboPair`: two upper-triangular quadratic
forms over the same binary variables, a cost ``c(x)`` carrying the DQM
energy and a penalty ``p(x)`` that vanishes exactly on valid bitstrings.
The penalty weight ``gamma`` is supplied at evaluation time, so one encoding
serves every ``f(x) = c(x) + gamma * p(x)``.

Bitstrings are indexed by global variable: character ``u`` of ``"1000"`` is
variable ``u``.  Integer indices use bit ``u`` for variable ``u``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .errors import FormatError
from .model import DqmInstance, check_assignment

Pair = tuple[int, int]

__all__ = [
    "EncodingKind",
    "EncodingDescriptor",
    "QuboPair",
    "RegisterViolation",
    "DecodeResult",
    "as_bits",
    "bits_to_str",
    "bits_to_index",
    "index_to_bits",
    "wall_count",
    "encode",
    "encode_one_hot",
    "encode_domain_wall",
    "build_k_hot_penalty",
    "encode_bits",
    "decode",
    "cost_of",
    "penalty_of",
    "evaluate_qubo",
    "export_qubo",
    "import_qubo",
]


class EncodingKind(str, enum.Enum):
    ONE_HOT = "one-hot"
    DOMAIN_WALL = "domain-wall"
    K_HOT = "k-hot"


# ---------------------------------------------------------------------------
# Bitstring helpers
# ---------------------------------------------------------------------------


def as_bits(bits, n: int | None = None) -> tuple[int, ...]:
    """Normalize a ``"0101"`` string or 0/1 sequence to a tuple of ints."""
    if isinstance(bits, str):
        if set(bits) - {"0", "1"}:
            raise ValueError(f"bitstring {bits!r} contains characters other than 0/1")
        out = tuple(int(ch) for ch in bits)
    else:
        out = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in out):
            raise ValueError(f"bits must be 0 or 1, got {out}")
    if n is not None and len(out) != n:
        raise ValueError(f"bitstring has length {len(out)}, expected {n}")
    return out


def bits_to_str(bits: Sequence[int]) -> str:
    return "".join("1" if b else "0" for b in bits)


def bits_to_index(bits: Sequence[int]) -> int:
    return sum(1 << u for u, b in enumerate(bits) if b)


def index_to_bits(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> u) & 1 for u in range(n))


def wall_count(register_bits: Sequence[int]) -> int:
    """Number of ``(1, 0)`` adjacencies in the bordered sequence ``[1, *r, 0]``."""
    seq = (1, *register_bits, 0)
    return sum(1 for a, b in zip(seq, seq[1:]) if a == 1 and b == 0)


# ---------------------------------------------------------------------------
# Descriptor and QUBO container
# ---------------------------------------------------------------------------


def _identity_perms(k: int, l: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(range(l)) for _ in range(k))


@dataclass(frozen=True)
class EncodingDescriptor:
    """Variable layout of an encoding.

    ``perms[i][alpha]`` is the slot (one-hot bit or domain-wall position)
    that represents value ``alpha`` of register ``i``.  A k-hot descriptor
    always has a single register of ``l`` bits.
    """

    kind: EncodingKind
    k: int
    l: int
    perms: tuple[tuple[int, ...], ...] = None
    khot_count: int | None = None

    def __post_init__(self):
        kind = EncodingKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.k < 1 or self.l < 2:
            raise ValueError(f"invalid dimensions k={self.k}, l={self.l}")
        perms = self.perms if self.perms is not None else _identity_perms(self.k, self.l)
        perms = tuple(tuple(int(v) for v in p) for p in perms)
        if len(perms) != self.k:
            raise ValueError(f"expected {self.k} permutations, got {len(perms)}")
        for i, p in enumerate(perms):
            if sorted(p) != list(range(self.l)):
                raise ValueError(f"perms[{i}] = {p} is not a permutation of range({self.l})")
        object.__setattr__(self, "perms", perms)
        if kind is EncodingKind.K_HOT:
            if self.k != 1:
                raise ValueError("k-hot descriptors have exactly one register")
            if self.khot_count is None or not 1 <= self.khot_count <= self.l:
                raise ValueError(f"khot_count must lie in [1, {self.l}], got {self.khot_count}")
        elif self.khot_count is not None:
            raise ValueError("khot_count only applies to k-hot descriptors")

    @property
    def register_length(self) -> int:
        return self.l - 1 if self.kind is EncodingKind.DOMAIN_WALL else self.l

    @property
    def n(self) -> int:
        return self.k * self.register_length

    def register_slice(self, i: int) -> slice:
        m = self.register_length
        return slice(i * m, (i + 1) * m)

    def register_of(self, u: int) -> int:
        return u // self.register_length

    def inverse_perms(self) -> tuple[tuple[int, ...], ...]:
        inv = []
        for p in self.perms:
            q = [0] * self.l
            for alpha, slot in enumerate(p):
                q[slot] = alpha
            inv.append(tuple(q))
        return tuple(inv)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "k": self.k, "l": self.l, "perms": [list(p) for p in self.perms]}
        if self.khot_count is not None:
            d["khot_count"] = self.khot_count
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "EncodingDescriptor":
        return cls(d["kind"], d["k"], d["l"], d.get("perms"), d.get("khot_count"))


def _clean_terms(terms: Mapping, n: int, label: str) -> Mapping[Pair, float]:
    out = {}
    for key, value in terms.items():
        u, v = (int(x) for x in key)
        if not 0 <= u <= v < n:
            raise ValueError(f"{label} entry ({u}, {v}) violates 0 <= u <= v < {n}")
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"{label} entry ({u}, {v}) is not finite")
        if value != 0.0:
            out[(u, v)] = value
    return MappingProxyType(dict(sorted(out.items())))


@dataclass(frozen=True)
class QuboPair:
    """Separate cost and penalty quadratic forms over ``n`` binary variables.

    Term maps are upper-triangular ``(u, v) -> value`` with ``u <= v``;
    explicit zeros are dropped so equality is defined on the nonzero set.
    """

    n: int
    cost_terms: Mapping[Pair, float]
    cost_offset: float = 0.0
    penalty_terms: Mapping[Pair, float] = field(default_factory=dict)
    penalty_offset: float = 0.0
    descriptor: EncodingDescriptor | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.descriptor is not None and self.descriptor.n != self.n:
            raise ValueError(f"descriptor has n={self.descriptor.n}, QUBO has n={self.n}")
        object.__setattr__(self, "cost_terms", _clean_terms(self.cost_terms, self.n, "cost"))
        object.__setattr__(self, "penalty_terms", _clean_terms(self.penalty_terms, self.n, "penalty"))
        object.__setattr__(self, "cost_offset", float(self.cost_offset))
        object.__setattr__(self, "penalty_offset", float(self.penalty_offset))

    @cached_property
    def cost_matrix(self) -> np.ndarray:
        """Dense upper-triangular cost matrix (offset excluded)."""
        return _dense(self.cost_terms, self.n)

    @cached_property
    def penalty_matrix(self) -> np.ndarray:
        return _dense(self.penalty_terms, self.n)

    def max_abs_cost_coefficient(self) -> float:
        return max((abs(v) for v in self.cost_terms.values()), default=0.0)


def _dense(terms: Mapping[Pair, float], n: int) -> np.ndarray:
    m = np.zeros((n, n))
    for (u, v), value in terms.items():
        m[u, v] = value
    m.flags.writeable = False
    return m


class _Accumulator:
    def __init__(self):
        self.terms: dict[Pair, float] = {}
        self.offset = 0.0

    def add(self, u: int, v: int, value: float) -> None:
        if u > v:
            u, v = v, u
        self.terms[(u, v)] = self.terms.get((u, v), 0.0) + value


# ---------------------------------------------------------------------------
# Encoders
# ---------------------------------------------------------------------------


def encode_one_hot(dqm: DqmInstance, perms=None) -> QuboPair:
    """One-hot encoding: ``l`` bits per register, penalty ``sum_i (sum_a b_ia - 1)^2``."""
    desc = EncodingDescriptor(EncodingKind.ONE_HOT, dqm.k, dqm.l, perms)
    l = dqm.l
    cost = _Accumulator()
    for (i, j, alpha, beta), value in dqm.terms.items():
        cost.add(i * l + desc.perms[i][alpha], j * l + desc.perms[j][beta], value)

    pen = _Accumulator()
    for i in range(dqm.k):
        base = i * l
        for a in range(l):
            pen.add(base + a, base + a, -1.0)
            for b in range(a + 1, l):
                pen.add(base + a, base + b, 2.0)
        pen.offset += 1.0
    return QuboPair(desc.n, cost.terms, cost.offset, pen.terms, pen.offset, desc)


def _wall_form(i: int, position: int, m: int) -> tuple[float, dict[int, float]]:
    """Linear form ``b_{i,p-1} - b_{i,p}`` with boundary bits substituted.

    Returns ``(constant, {global variable: coefficient})`` for a register of
    ``m = l - 1`` physical bits, where ``b_{i,-1} = 1`` and ``b_{i,m} = 0``.
    """
    const = 0.0
    coeffs: dict[int, float] = {}
    if position == 0:
        const += 1.0
    else:
        coeffs[i * m + position - 1] = 1.0
    if position < m:
        coeffs[i * m + position] = coeffs.get(i * m + position, 0.0) - 1.0
    return const, coeffs


def encode_domain_wall(dqm: DqmInstance, perms=None) -> QuboPair:
    """Domain-wall encoding: ``l - 1`` bits per register.

    Each DQM term is multiplied out with every sub-variable replaced by its
    wall form; constant-times-constant products land in ``cost_offset``.
    """
    desc = EncodingDescriptor(EncodingKind.DOMAIN_WALL, dqm.k, dqm.l, perms)
    m = dqm.l - 1
    cost = _Accumulator()
    for (i, j, alpha, beta), value in dqm.terms.items():
        c1, f1 = _wall_form(i, desc.perms[i][alpha], m)
        c2, f2 = _wall_form(j, desc.perms[j][beta], m)
        cost.offset += value * c1 * c2
        for u, a in f1.items():
            cost.add(u, u, value * a * c2)
        for v, b in f2.items():
            cost.add(v, v, value * c1 * b)
        for u, a in f1.items():
            for v, b in f2.items():
                cost.add(u, v, value * a * b)  # u == v collapses via b*b = b

    pen = _Accumulator()
    for i in range(dqm.k):
        base = i * m
        for a in range(1, m):
            pen.add(base + a, base + a, 1.0)
            pen.add(base + a - 1, base + a, -1.0)
    return QuboPair(desc.n, cost.terms, cost.offset, pen.terms, pen.offset, desc)


def build_k_hot_penalty(l: int, khot_count: int) -> QuboPair:
    """Penalty ``(sum_a b_a - khot_count)^2`` on a single ``l``-bit register."""
    if not 1 <= khot_count <= l:
        raise ValueError(f"khot_count must lie in [1, {l}], got {khot_count}")
    desc = EncodingDescriptor(EncodingKind.K_HOT, 1, l, None, khot_count)
    pen = _Accumulator()
    for a in range(l):
        pen.add(a, a, 1.0 - 2.0 * khot_count)
        for b in range(a + 1, l):
            pen.add(a, b, 2.0)
    return QuboPair(l, {}, 0.0, pen.terms, float(khot_count**2), desc)


def encode(dqm: DqmInstance, kind, perms=None) -> QuboPair:
    kind = EncodingKind(kind)
    if kind is EncodingKind.ONE_HOT:
        return encode_one_hot(dqm, perms)
    if kind is EncodingKind.DOMAIN_WALL:
        return encode_domain_wall(dqm, perms)
    raise ValueError("k-hot registers carry no DQM cost; use build_k_hot_penalty")


# ---------------------------------------------------------------------------
# Encoding and decoding bitstrings
# ---------------------------------------------------------------------------


def encode_bits(assignment: Sequence[int], descriptor: EncodingDescriptor) -> tuple[int, ...]:
    """Bitstring representing a discrete assignment (one-hot / domain-wall)."""
    if descriptor.kind is EncodingKind.K_HOT:
        raise ValueError("k-hot registers have no single-value assignment")
    a = check_assignment(descriptor.k, descriptor.l, assignment)
    m = descriptor.register_length
    bits = [0] * descriptor.n
    for i, value in enumerate(a):
        slot = descriptor.perms[i][value]
        if descriptor.kind is EncodingKind.ONE_HOT:
            bits[i * m + slot] = 1
        else:
            for q in range(slot):
                bits[i * m + q] = 1
    return tuple(bits)


@dataclass(frozen=True)
class RegisterViolation:
    register: int
    count: int  # ones (one-hot, k-hot) or walls (domain-wall)
    description: str


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of decoding: an assignment when valid, violations otherwise.

    For k-hot descriptors the assignment lists the positions of the set bits.
    """

    assignment: tuple[int, ...] | None
    violations: tuple[RegisterViolation, ...] = ()

    @property
    def valid(self) -> bool:
        return self.assignment is not None


def decode(bits, descriptor: EncodingDescriptor) -> DecodeResult:
    bits = as_bits(bits, descriptor.n)
    kind = descriptor.kind
    inv = descriptor.inverse_perms()
    values: list[int] = []
    violations: list[RegisterViolation] = []
    for i in range(descriptor.k):
        reg = bits[descriptor.register_slice(i)]
        if kind is EncodingKind.DOMAIN_WALL:
            walls = wall_count(reg)
            if walls != 1:
                violations.append(RegisterViolation(i, walls, f"{walls} domain walls, expected 1"))
            else:
                values.append(inv[i][sum(reg)])
        else:
            ones = sum(reg)
            want = descriptor.khot_count if kind is EncodingKind.K_HOT else 1
            if ones != want:
                violations.append(RegisterViolation(i, ones, f"{ones} bits set, expected {want}"))
            elif kind is EncodingKind.K_HOT:
                values.extend(u for u, b in enumerate(reg) if b)
            else:
                values.append(inv[i][reg.index(1)])
    if violations:
        return DecodeResult(None, tuple(violations))
    return DecodeResult(tuple(values))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _form_value(terms: Mapping[Pair, float], offset: float, bits: tuple[int, ...]) -> float:
    total = offset
    for (u, v), value in terms.items():
        if bits[u] and bits[v]:
            total += value
    return total


def cost_of(q: QuboPair, bits) -> float:
    return _form_value(q.cost_terms, q.cost_offset, as_bits(bits, q.n))


def penalty_of(q: QuboPair, bits) -> float:
    return _form_value(q.penalty_terms, q.penalty_offset, as_bits(bits, q.n))


def evaluate_qubo(q: QuboPair, bits, gamma: float) -> float:
    bits = as_bits(bits, q.n)
    return cost_of(q, bits) + gamma * penalty_of(q, bits)


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

_DESCRIPTOR_TAG = "# descriptor "


def export_qubo(q: QuboPair) -> str:
    """Line-oriented text form; entries sorted by ``(u, v)``, cost before penalty.

    The encoding descriptor, when present, travels in a comment line so that
    generic readers can ignore it.
    """
    lines = ["# dqmscape QUBO"]
    if q.descriptor is not None:
        lines.append(_DESCRIPTOR_TAG + json.dumps(q.descriptor.to_dict(), separators=(",", ":")))
    lines.append(f"n {q.n}")
    lines.append(f"offset_cost {q.cost_offset!r}")
    lines.append(f"offset_penalty {q.penalty_offset!r}")
    lines.extend(f"c {u} {v} {val!r}" for (u, v), val in q.cost_terms.items())
    lines.extend(f"p {u} {v} {val!r}" for (u, v), val in q.penalty_terms.items())
    return "\n".join(lines) + "\n"


def _parse_float(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise FormatError(f"not a number: {token!r}", lineno) from None
    if not math.isfinite(value):
        raise FormatError(f"value is not finite: {token!r}", lineno)
    return value


def _parse_index(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"not an integer index: {token!r}", lineno) from None


def import_qubo(text: str) -> QuboPair:
    descriptor = None
    header: dict[str, float] = {}
    entries: dict[str, dict[Pair, float]] = {"c": {}, "p": {}}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith(_DESCRIPTOR_TAG):
                try:
                    descriptor = EncodingDescriptor.from_dict(json.loads(line[len(_DESCRIPTOR_TAG):]))
                except (ValueError, KeyError, TypeError) as exc:
                    raise FormatError(f"bad descriptor comment: {exc}", lineno) from None
            continue
        tokens = line.split()
        tag = tokens[0]
        if tag in ("n", "offset_cost", "offset_penalty"):
            if len(tokens) != 2:
                raise FormatError(f"expected '{tag} <value>'", lineno)
            if tag in header:
                raise FormatError(f"repeated header {tag!r}", lineno)
            if tag == "n":
                n = _parse_index(tokens[1], lineno)
                if n < 1:
                    raise FormatError(f"n must be positive, got {n}", lineno)
                header["n"] = n
            else:
                header[tag] = _parse_float(tokens[1], lineno)
        elif tag in ("c", "p"):
            if "n" not in header:
                raise FormatError("entry before 'n' header", lineno)
            if len(tokens) != 4:
                raise FormatError(f"expected '{tag} <u> <v> <value>'", lineno)
            u, v = _parse_index(tokens[1], lineno), _parse_index(tokens[2], lineno)
            if u > v:
                raise FormatError(f"non-canonical entry ({u}, {v}): requires u <= v", lineno)
            if not 0 <= u <= v < header["n"]:
                raise FormatError(f"index out of range in ({u}, {v}) for n={header['n']}", lineno)
            if (u, v) in entries[tag]:
                raise FormatError(f"duplicate {tag} entry ({u}, {v})", lineno)
            entries[tag][(u, v)] = _parse_float(tokens[3], lineno)
        else:
            raise FormatError(f"unrecognised line tag {tag!r}", lineno)
    if "n" not in header:
        raise FormatError("missing 'n' header")
    if descriptor is not None and descriptor.n != header["n"]:
        raise FormatError(f"descriptor implies n={descriptor.n}, header says {header['n']}")
    return QuboPair(
        header["n"],
        entries["c"],
        header.get("offset_cost", 0.0),
        entries["p"],
        header.get("offset_penalty", 0.0),
        descriptor,
    )
