"""Finite sets, groups, and exact representation-count certificates.

Counts are over ordered pairs: the difference count of A at shift m is
|{(a, b) in A x A : a - b = m}| and the sum count at m is
|{(a, b) in A x A : a + b = m}|.  A is a "g-difference set" for a domain of
shifts when every difference count there is >= g, and a "g-Sidon set" when
every sum count is <= g.  Everything here is exact integer arithmetic; numpy
is used only as an int64 pair-counting backend.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

__all__ = [
    "IntSet",
    "GroupSpec",
    "GroupSubset",
    "RepProfile",
    "Verdict",
    "TrivialBounds",
    "BoundsLedger",
    "CertificateError",
    "rep_diff_profile",
    "rep_sum_profile",
    "group_rep_profile",
    "verify_certificate",
    "trivial_bounds",
    "ceil_sqrt",
    "floor_sqrt",
    "format_fraction",
    "parse_fraction",
]

# Dispatch thresholds for the counting backends.  Dense sets go through
# vectorized bincount over the hull; tiny or hull-sparse sets through a dict.
_DICT_PAIR_LIMIT = 250_000
_ARRAY_SPAN_LIMIT = 8_000_000
_CHUNK_CELLS = 2_000_000


class CertificateError(ValueError):
    """A required certificate failed; carries the failing verdict."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


def ceil_sqrt(n: int) -> int:
    """Smallest integer >= sqrt(n), exactly."""
    if n < 0:
        raise ValueError("negative radicand")
    if n == 0:
        return 0
    return math.isqrt(n - 1) + 1


def floor_sqrt(n: int) -> int:
    """Largest integer <= sqrt(n), exactly."""
    if n < 0:
        raise ValueError("negative radicand")
    return math.isqrt(n)


def format_fraction(q: Fraction) -> str:
    """Render a rational as 'p/q' (or 'p' when integral)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text: str) -> Fraction:
    """Parse 'p/q', an integer string, or a decimal string, exactly."""
    s = str(text).strip()
    return Fraction(s)


@dataclass(frozen=True)
class IntSet:
    """A finite set of integers, stored sorted and strictly increasing."""

    elements: tuple[int, ...]

    def __post_init__(self):
        elems = tuple(int(x) for x in self.elements)
        if list(elems) != sorted(set(elems)):
            elems = tuple(sorted(set(elems)))
        object.__setattr__(self, "elements", elems)

    @classmethod
    def of(cls, iterable) -> "IntSet":
        return cls(tuple(int(x) for x in iterable))

    @property
    def size(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in set(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def translate(self, t: int) -> "IntSet":
        return IntSet(tuple(a + t for a in self.elements))

    def to_json(self) -> list[int]:
        return list(self.elements)

    @classmethod
    def from_json(cls, data) -> "IntSet":
        if not isinstance(data, list):
            raise ValueError("integer-set JSON must be an array")
        return cls.of(data)


@dataclass(frozen=True)
class GroupSpec:
    """A finite abelian group Z/n1 x ... x Z/nd given by its factor list."""

    factors: tuple[int, ...]

    def __post_init__(self):
        fs = tuple(int(n) for n in self.factors)
        if not fs:
            raise ValueError("group needs at least one factor")
        if any(n < 1 for n in fs):
            raise ValueError("factors must be positive")
        object.__setattr__(self, "factors", fs)

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    def reduce(self, vector) -> tuple[int, ...]:
        v = tuple(int(x) for x in vector)
        if len(v) != self.rank:
            raise ValueError("vector length does not match group rank")
        return tuple(x % n for x, n in zip(v, self.factors))

    def elements(self):
        """All residue vectors in lexicographic (row-major) order."""
        return product(*(range(n) for n in self.factors))

    def strides(self) -> tuple[int, ...]:
        out = [1] * self.rank
        for i in range(self.rank - 2, -1, -1):
            out[i] = out[i + 1] * self.factors[i + 1]
        return tuple(out)

    def flatten(self, vector) -> int:
        v = self.reduce(vector)
        return sum(x * s for x, s in zip(v, self.strides()))

    def unflatten(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.order:
            raise ValueError("index out of range")
        out = []
        for s, n in zip(self.strides(), self.factors):
            out.append((index // s) % n)
        return tuple(out)

    def label(self) -> str:
        return "x".join(str(n) for n in self.factors)

    def to_json(self) -> list[int]:
        return list(self.factors)


@dataclass(frozen=True)
class GroupSubset:
    """A subset of a finite abelian group; vectors reduced and sorted."""

    group: GroupSpec
    elements: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        reduced = sorted({self.group.reduce(v) for v in self.elements})
        object.__setattr__(self, "elements", tuple(reduced))

    @classmethod
    def of(cls, group: GroupSpec, iterable) -> "GroupSubset":
        return cls(group, tuple(tuple(v) for v in iterable))

    @property
    def size(self) -> int:
        return len(self.elements)

    def __contains__(self, v) -> bool:
        return self.group.reduce(v) in set(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def to_json(self) -> dict:
        return {
            "invariant_factors": list(self.group.factors),
            "elements": [list(v) for v in self.elements],
        }

    @classmethod
    def from_json(cls, data) -> "GroupSubset":
        if not isinstance(data, dict) or "invariant_factors" not in data:
            raise ValueError("group-subset JSON needs invariant_factors")
        spec = GroupSpec(tuple(data["invariant_factors"]))
        return cls.of(spec, data.get("elements", []))


@dataclass(frozen=True)
class RepProfile:
    """Representation counts over a queried domain of shifts."""

    kind: str  # "difference" | "sum"
    domain: str  # human-readable description of the queried shifts
    counts: dict
    min_count: int
    max_count: int

    @classmethod
    def build(cls, kind: str, domain: str, counts: dict) -> "RepProfile":
        if not counts:
            raise ValueError("no shifts queried")
        vals = counts.values()
        return cls(kind, domain, dict(counts), min(vals), max(vals))

    def to_json(self) -> dict:
        keys = sorted(self.counts)
        return {
            "kind": self.kind,
            "domain": self.domain,
            "shifts": [list(k) if isinstance(k, tuple) else k for k in keys],
            "counts": [self.counts[k] for k in keys],
            "min_count": self.min_count,
            "max_count": self.max_count,
        }


@dataclass(frozen=True)
class Verdict:
    """Outcome of a certificate check."""

    passed: bool
    achieved_g: int
    witness: object = None  # failing shift (int or vector) or None

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, tuple):
            w = list(w)
        return {"passed": self.passed, "achieved_g": self.achieved_g, "witness": w}


# ---------------------------------------------------------------------------
# Counting backends.  Both are exact; they differ only in speed envelope.


class _DictCounts:
    __slots__ = ("counter",)

    def __init__(self, counter: Counter):
        self.counter = counter

    def get(self, m: int) -> int:
        return self.counter.get(m, 0)

    def scan_min(self, lo: int, hi: int):
        best, best_m = None, None
        for m in range(lo, hi + 1):
            c = self.counter.get(m, 0)
            if best is None or c < best:
                best, best_m = c, m
                if best == 0:
                    break
        return best, best_m

    def scan_max(self, lo: int, hi: int):
        best, best_m = None, None
        # only realized shifts can attain a positive max
        realized = [m for m in self.counter if lo <= m <= hi]
        if not realized:
            return 0, lo
        for m in sorted(realized):
            c = self.counter[m]
            if best is None or c > best:
                best, best_m = c, m
        return best, best_m

    def first_below(self, lo: int, hi: int, g: int):
        for m in range(lo, hi + 1):
            if self.counter.get(m, 0) < g:
                return m
        return None

    def first_above(self, lo: int, hi: int, g: int):
        realized = sorted(m for m in self.counter if lo <= m <= hi)
        for m in realized:
            if self.counter[m] > g:
                return m
        return None


class _ArrayCounts:
    __slots__ = ("base", "arr")

    def __init__(self, base: int, arr: np.ndarray):
        self.base = base
        self.arr = arr

    def get(self, m: int) -> int:
        i = m - self.base
        if 0 <= i < len(self.arr):
            return int(self.arr[i])
        return 0

    def _window(self, lo: int, hi: int):
        top = self.base + len(self.arr) - 1
        wlo, whi = max(lo, self.base), min(hi, top)
        inside = wlo <= whi
        clipped = lo < self.base or hi > top
        return wlo, whi, inside, clipped

    def scan_min(self, lo: int, hi: int):
        wlo, whi, inside, clipped = self._window(lo, hi)
        if not inside:
            return 0, lo
        sl = self.arr[wlo - self.base : whi - self.base + 1]
        i = int(np.argmin(sl))
        val, m = int(sl[i]), wlo + i
        if clipped and val > 0:
            return 0, lo if lo < self.base else whi + 1
        return val, m

    def scan_max(self, lo: int, hi: int):
        wlo, whi, inside, _ = self._window(lo, hi)
        if not inside:
            return 0, lo
        sl = self.arr[wlo - self.base : whi - self.base + 1]
        i = int(np.argmax(sl))
        return int(sl[i]), wlo + i

    def first_below(self, lo: int, hi: int, g: int):
        wlo, whi, inside, _ = self._window(lo, hi)
        if lo < self.base:
            return lo
        if not inside:
            return lo
        sl = self.arr[wlo - self.base : whi - self.base + 1]
        hits = np.nonzero(sl < g)[0]
        if hits.size:
            return wlo + int(hits[0])
        if hi > whi:
            return whi + 1
        return None

    def first_above(self, lo: int, hi: int, g: int):
        wlo, whi, inside, _ = self._window(lo, hi)
        if not inside:
            return None
        sl = self.arr[wlo - self.base : whi - self.base + 1]
        hits = np.nonzero(sl > g)[0]
        if hits.size:
            return wlo + int(hits[0])
        return None


def _pair_counts(elements: tuple[int, ...], mode: str):
    """Exact ordered-pair difference or sum counts for a set of integers."""
    k = len(elements)
    if k == 0:
        raise ValueError("empty set")
    lo, hi = elements[0], elements[-1]
    span = hi - lo
    if k * k > _DICT_PAIR_LIMIT and span <= _ARRAY_SPAN_LIMIT:
        e = np.asarray(elements, dtype=np.int64) - lo
        length = 2 * span + 1
        out = np.zeros(length, dtype=np.int64)
        rows = max(1, _CHUNK_CELLS // max(k, 1))
        for i0 in range(0, k, rows):
            block = e[i0 : i0 + rows, None]
            if mode == "difference":
                d = block - e[None, :] + span
            else:
                d = block + e[None, :]
            out += np.bincount(d.ravel(), minlength=length)
        # difference d = a-b sits at index d+span, sum s = a+b at s-2lo
        return _ArrayCounts(-span if mode == "difference" else 2 * lo, out)
    counter: Counter = Counter()
    if mode == "difference":
        for a in elements:
            for b in elements:
                counter[a - b] += 1
    else:
        for a in elements:
            for b in elements:
                counter[a + b] += 1
    return _DictCounts(counter)


def _group_counts(subset: GroupSubset, mode: str) -> np.ndarray:
    """Exact counts over every group element, indexed by flattened residue."""
    if subset.size == 0:
        raise ValueError("empty set")
    spec = subset.group
    order = spec.order
    if order > 50_000_000:
        raise ValueError("group too large to enumerate")
    x = np.asarray(subset.elements, dtype=np.int64)  # (k, d)
    k, d = x.shape
    factors = np.asarray(spec.factors, dtype=np.int64)
    strides = np.asarray(spec.strides(), dtype=np.int64)
    out = np.zeros(order, dtype=np.int64)
    rows = max(1, _CHUNK_CELLS // max(k * d, 1))
    for i0 in range(0, k, rows):
        block = x[i0 : i0 + rows, None, :]
        if mode == "difference":
            z = (block - x[None, :, :]) % factors
        else:
            z = (block + x[None, :, :]) % factors
        flat = (z * strides).sum(axis=-1).ravel()
        out += np.bincount(flat, minlength=order)
    return out


# ---------------------------------------------------------------------------
# Profiles


def rep_diff_profile(A: IntSet, shifts: tuple[int, int]) -> RepProfile:
    """Difference counts of A at every shift in the inclusive interval."""
    lo, hi = int(shifts[0]), int(shifts[1])
    if lo > hi:
        raise ValueError("empty shift interval")
    if hi - lo + 1 > 5_000_000:
        raise ValueError("shift interval too large to materialize")
    counts = _pair_counts(A.elements, "difference")
    table = {m: counts.get(m) for m in range(lo, hi + 1)}
    return RepProfile.build("difference", f"[{lo},{hi}]", table)


def rep_sum_profile(A: IntSet, shifts: tuple[int, int]) -> RepProfile:
    """Sum counts of A at every shift in the inclusive interval."""
    lo, hi = int(shifts[0]), int(shifts[1])
    if lo > hi:
        raise ValueError("empty shift interval")
    if hi - lo + 1 > 5_000_000:
        raise ValueError("shift interval too large to materialize")
    counts = _pair_counts(A.elements, "sum")
    table = {m: counts.get(m) for m in range(lo, hi + 1)}
    return RepProfile.build("sum", f"[{lo},{hi}]", table)


def group_rep_profile(A: GroupSubset, mode: str = "difference") -> RepProfile:
    """Counts at every element of the ambient group."""
    if mode not in ("difference", "sum"):
        raise ValueError("mode must be 'difference' or 'sum'")
    arr = _group_counts(A, mode)
    spec = A.group
    table = {v: int(arr[i]) for i, v in enumerate(spec.elements())}
    return RepProfile.build(mode, f"group {spec.label()}", table)


# ---------------------------------------------------------------------------
# Certificates


def verify_certificate(A, g: int, N: int | None = None, mode: str = "difference") -> Verdict:
    """Check a g-difference or g-Sidon certificate exactly.

    For an IntSet, N is required: difference mode checks shifts 1..N, Sidon
    mode requires A within [1, N] and checks sums 2..2N (sums outside are 0).
    For a GroupSubset the whole group is checked and N must be omitted.

    achieved_g is the minimum difference count (the largest g that would
    pass) or the maximum sum count (the smallest g that would pass); the
    witness is the smallest failing shift, or None when the check passes.
    """
    g = int(g)
    if g < 1:
        raise ValueError("g must be a positive integer")
    if mode not in ("difference", "sidon"):
        raise ValueError("mode must be 'difference' or 'sidon'")
    if isinstance(A, GroupSubset):
        if N is not None:
            raise ValueError("N applies only to integer sets")
        arr = _group_counts(A, "difference" if mode == "difference" else "sum")
        if mode == "difference":
            i = int(np.argmin(arr))
            achieved = int(arr[i])
            passed = achieved >= g
            witness = None
            if not passed:
                bad = int(np.nonzero(arr < g)[0][0])
                witness = A.group.unflatten(bad)
            return Verdict(passed, achieved, witness)
        i = int(np.argmax(arr))
        achieved = int(arr[i])
        passed = achieved <= g
        witness = None
        if not passed:
            bad = int(np.nonzero(arr > g)[0][0])
            witness = A.group.unflatten(bad)
        return Verdict(passed, achieved, witness)
    if not isinstance(A, IntSet):
        raise TypeError("expected IntSet or GroupSubset")
    if N is None:
        raise ValueError("N required for integer sets")
    N = int(N)
    if N < 1:
        raise ValueError("N must be positive")
    if A.size == 0:
        raise ValueError("empty set")
    if mode == "difference":
        counts = _pair_counts(A.elements, "difference")
        achieved, _ = counts.scan_min(1, N)
        witness = counts.first_below(1, N, g)
        return Verdict(witness is None, achieved, witness)
    # Sidon over [N]: support must lie in [1, N]
    if A.elements[0] < 1 or A.elements[-1] > N:
        raise ValueError("support outside [1,N]")
    counts = _pair_counts(A.elements, "sum")
    achieved, _ = counts.scan_max(2, 2 * N)
    witness = counts.first_above(2, 2 * N, g)
    return Verdict(witness is None, achieved, witness)


# ---------------------------------------------------------------------------
# Bounds


@dataclass(frozen=True)
class TrivialBounds:
    """Square-root bounds with exact integer roundings."""

    g: int
    mode: str  # "interval" | "group"
    parameter: int  # N or |G|
    sqrt_value: float  # sqrt(2gN) or sqrt(g|G|)
    min_cover_lower: int  # ceil of the root: least size forced on covering side
    max_packing_upper: int  # floor of the root: largest size allowed packing side
    sharper_cover_lower: int | None = None  # groups only: strict 1/2+sqrt bound
    warning: str | None = None

    def to_json(self) -> dict:
        out = {
            "g": self.g,
            "mode": self.mode,
            "parameter": self.parameter,
            "sqrt_value": round(self.sqrt_value, 6),
            "min_cover_lower": self.min_cover_lower,
            "max_packing_upper": self.max_packing_upper,
        }
        if self.sharper_cover_lower is not None:
            out["sharper_cover_lower"] = self.sharper_cover_lower
        if self.warning is not None:
            out["warning"] = self.warning
        return out


def trivial_bounds(g: int, N: int | None = None, group: GroupSpec | None = None) -> TrivialBounds:
    """Counting bounds: interval mode uses sqrt(2gN), group mode sqrt(g|G|).

    Covering-side quantities (minimum g-difference sets) are bounded below by
    the ceiling; packing-side quantities (maximum g-Sidon sets) above by the
    floor.  Group mode also reports the strictly-larger covering bound
    1/2 + sqrt(g(|G|-1)), rounded up strictly.
    """
    g = int(g)
    if g < 1:
        raise ValueError("g must be a positive integer")
    if (N is None) == (group is None):
        raise ValueError("give exactly one of N or group")
    if N is not None:
        N = int(N)
        if N < 1:
            raise ValueError("N must be positive")
        m = 2 * g * N
        return TrivialBounds(
            g=g,
            mode="interval",
            parameter=N,
            sqrt_value=math.sqrt(m),
            min_cover_lower=ceil_sqrt(m),
            max_packing_upper=floor_sqrt(m),
        )
    order = group.order
    m = g * order
    # strict rounding of 1/2 + sqrt(g(order-1)): floor via isqrt, then +1
    s = math.isqrt(4 * g * (order - 1))
    sharper = (1 + s) // 2 + 1
    warning = None
    if g > order:
        warning = "g exceeds |G|; no subset attains g everywhere"
    return TrivialBounds(
        g=g,
        mode="group",
        parameter=order,
        sqrt_value=math.sqrt(m),
        min_cover_lower=ceil_sqrt(m),
        max_packing_upper=floor_sqrt(m),
        sharper_cover_lower=sharper,
        warning=warning,
    )


@dataclass(frozen=True)
class BoundsLedger:
    """Published constants used when flagging computed ratios.

    sigma bounds the interval Sidon ratio beta_g(N)/sqrt(gN) as g -> oo,
    tau the interval covering ratio eta_g(N)/sqrt(gN) (tau is also a lower
    bound for every finite g, N); the g=2 radicands bound eta_2(N)^2/N.
    Stored as the exact published decimals.
    """

    sigma_lower: Fraction = Fraction(1147, 1000)
    sigma_upper: Fraction = Fraction(1252, 1000)
    tau_lower: Fraction = Fraction(1560, 1000)
    tau_upper: Fraction = Fraction(1643, 1000)
    g2_lower_radicand: Fraction = Fraction(2435, 1000)
    g2_upper_radicand: Fraction = Fraction(2645, 1000)

    def eta_ratio_ok(self, value: int, g: int, N: int) -> bool:
        """Exact check of value/sqrt(gN) >= tau_lower (no floats)."""
        return Fraction(value) ** 2 >= self.tau_lower**2 * g * N

    def to_json(self) -> dict:
        return {
            "sigma_lower": format_fraction(self.sigma_lower),
            "sigma_upper": format_fraction(self.sigma_upper),
            "tau_lower": format_fraction(self.tau_lower),
            "tau_upper": format_fraction(self.tau_upper),
            "g2_lower_radicand": format_fraction(self.g2_lower_radicand),
            "g2_upper_radicand": format_fraction(self.g2_upper_radicand),
        }
