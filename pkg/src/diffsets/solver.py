"""Exact desk-scale search for extremal difference and Sidon set sizes.

eta(g, N): smallest g-difference set for the interval [N].
gamma(g, G): smallest g-difference subset of a finite abelian group.
beta(g, N): largest g-Sidon subset of [1, N].
alpha(g, G): largest g-Sidon subset of a group.

Covering searches run iterative deepening on the target size with admissible
deficit pruning; packing searches run branch and bound.  Translation symmetry
pins min(A) = 0 (interval) or 0 in A (group); witnesses are canonical, the
lexicographically smallest at the optimal size, so identical inputs always
reproduce identical tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core_sets import (
    BoundsLedger,
    GroupSpec,
    GroupSubset,
    IntSet,
    ceil_sqrt,
    trivial_bounds,
    verify_certificate,
)

__all__ = [
    "SearchConfig",
    "BudgetExceeded",
    "ExtremalResult",
    "eta_exact",
    "gamma_exact",
    "beta_exact",
    "alpha_exact",
    "ratio_report",
]


class BudgetExceeded(Exception):
    """Internal signal: node budget ran out mid-search."""


@dataclass(frozen=True)
class SearchConfig:
    """Search hull, node budget, and symmetry switches.

    window: largest element considered for interval searches (default 2N).
    node_budget: search nodes before giving up with a non-exhaustive result.
    translation_fix: pin min(A) = 0 for eta, 0 in A for gamma/alpha.  False
    searches unpinned: slower, same value and witness, useful as a symmetry
    sanity check.  beta has no translation symmetry and ignores the flag.
    confirm_window: rerun eta at twice the window and require the same value
    before exhaustive=True (minimal witnesses are only known to normalize
    into a single cluster; the rerun is the sensitivity check).
    """

    window: int | None = None
    node_budget: int = 20_000_000
    translation_fix: bool = True
    confirm_window: bool = True


@dataclass(frozen=True)
class ExtremalResult:
    """One solved extremal value with its certified witness."""

    quantity: str  # "eta" | "gamma" | "beta" | "alpha"
    g: int
    N: int | None
    group: GroupSpec | None
    value: int
    witness: IntSet | GroupSubset | None
    exhaustive: bool
    nodes: int

    @property
    def size_param(self) -> int:
        return self.N if self.N is not None else self.group.order

    def ratio(self) -> float:
        return self.value / math.sqrt(self.g * self.size_param)

    def to_json(self) -> dict:
        out = {
            "quantity": self.quantity,
            "g": self.g,
            "value": self.value,
            "exhaustive": self.exhaustive,
            "nodes": self.nodes,
        }
        if self.N is not None:
            out["N"] = self.N
        if self.group is not None:
            out["group"] = list(self.group.factors)
        if self.witness is None:
            out["witness"] = None
        elif isinstance(self.witness, IntSet):
            out["witness"] = list(self.witness.elements)
        else:
            out["witness"] = [list(v) for v in self.witness.elements]
        return out


class _Budget:
    __slots__ = ("left", "spent")

    def __init__(self, limit: int):
        self.left = limit
        self.spent = 0

    def tick(self):
        self.spent += 1
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded


# ---------------------------------------------------------------------------
# eta: minimum g-difference set for [N]


def _greedy_difference_cover(g: int, N: int) -> IntSet:
    """Blocks plus a ladder: [0, gc) with rungs at multiples of c; always valid."""
    c = max(1, ceil_sqrt((N + g - 1) // g))
    top = (N + c - 1) // c + g
    A = set(range(g * c)) | {j * c for j in range(1, top + 1)}
    out = IntSet.of(A)
    assert verify_certificate(out, g=g, N=N, mode="difference").passed
    return out


def _eta_search_at_size(g: int, N: int, W: int, k: int, budget: _Budget, pin: bool):
    """Lexicographically first A with |A| = k and all counts >= g, or None.

    Any witness translates down to min 0, which is also lex-smaller, so
    pinning 0 loses nothing; pin=False explores translates anyway.
    """
    counts = [0] * (N + 1)  # counts[m] for shifts 1..N
    deficit_total = g * N

    def deficits_after(x, chosen, add):
        nonlocal deficit_total
        for a in chosen:
            d = x - a
            if 1 <= d <= N:
                before = counts[d]
                counts[d] = before + add
                if add > 0 and before < g:
                    deficit_total -= min(add, g - before)
                elif add < 0 and counts[d] < g:
                    deficit_total += min(-add, g - counts[d])

    chosen = []

    def extend(start: int) -> bool:
        budget.tick()
        s = len(chosen)
        if s == k:
            return deficit_total == 0
        t = k - s
        # t more elements: total coverage gain <= t*s + t(t-1)/2
        if deficit_total > t * s + t * (t - 1) // 2:
            return False
        # per-shift gain <= 2t
        for m in range(1, N + 1):
            if g - counts[m] > 2 * t:
                return False
        for x in range(start, W + 1):
            if W - x < t - 1:
                break
            chosen.append(x)
            deficits_after(x, chosen[:-1], +1)
            if extend(x + 1):
                return True
            deficits_after(x, chosen[:-1], -1)
            chosen.pop()
        return False

    if pin:
        chosen.append(0)
        found = extend(1)
    else:
        found = extend(0)
    if found:
        return IntSet.of(chosen)
    return None


def eta_exact(g: int, N: int, cfg: SearchConfig = SearchConfig()) -> ExtremalResult:
    """Minimum size of a g-difference set for [N], with lex-min witness.

    Iterative deepening from the covering bound ceil(sqrt(2gN)), capped at
    2g times that bound.  The search hull is [0, W]; exhaustive=True only
    after the doubled-window rerun reproduces the value.
    """
    g, N = int(g), int(N)
    if g < 1 or N < 1:
        raise ValueError("need g >= 1 and N >= 1")
    W = cfg.window if cfg.window is not None else 2 * N
    if W < N:
        raise ValueError("window must be at least N")
    lo = ceil_sqrt(2 * g * N)
    cap = 2 * g * lo
    fallback = _greedy_difference_cover(g, N)
    budget = _Budget(cfg.node_budget)
    witness = None
    value = None
    try:
        for k in range(max(2, lo), cap + 1):
            found = _eta_search_at_size(g, N, W, k, budget, cfg.translation_fix)
            if found is not None:
                witness, value = found, k
                break
    except BudgetExceeded:
        best = witness if witness is not None else fallback
        return ExtremalResult(
            "eta", g, N, None, best.size, best, False, budget.spent
        )
    if witness is None:
        # cap exhausted inside the window; fall back to the explicit cover
        witness, value = fallback, fallback.size
        exhaustive = False
    else:
        exhaustive = True
        if cfg.confirm_window:
            wide = eta_exact(
                g,
                N,
                SearchConfig(
                    window=2 * W,
                    node_budget=budget.left,
                    translation_fix=cfg.translation_fix,
                    confirm_window=False,
                ),
            )
            budget.spent += wide.nodes
            exhaustive = wide.exhaustive and wide.value == value
            if wide.value < value:
                witness, value = wide.witness, wide.value
                exhaustive = False
    assert verify_certificate(witness, g=g, N=N, mode="difference").passed
    return ExtremalResult("eta", g, N, None, value, witness, exhaustive, budget.spent)


# ---------------------------------------------------------------------------
# gamma: minimum g-difference subset of a group


def _gamma_search_at_size(group: GroupSpec, g: int, k: int, budget: _Budget, pin: bool):
    order = group.order
    table = _difference_table(group)
    counts = [0] * order
    deficit_total = g * order

    def apply(x, chosen, add):
        nonlocal deficit_total
        row = table[x]
        for a in chosen:
            for d in (row[a], table[a][x]):
                before = counts[d]
                counts[d] = before + add
                if add > 0 and before < g:
                    deficit_total -= 1
                elif add < 0 and counts[d] < g:
                    deficit_total += 1
        before = counts[0]
        counts[0] = before + add
        if add > 0 and before < g:
            deficit_total -= 1
        elif add < 0 and counts[0] < g:
            deficit_total += 1

    chosen = []

    def extend(start: int) -> bool:
        budget.tick()
        s = len(chosen)
        if s == k:
            return deficit_total == 0
        t = k - s
        if deficit_total > t * (2 * s + 1) + t * (t - 1):
            return False
        step = max(g - min(counts), 0)
        if step > 2 * t:
            return False
        for x in range(start, order):
            if order - x < t:
                break
            apply(x, chosen, +1)
            chosen.append(x)
            if extend(x + 1):
                return True
            chosen.pop()
            apply(x, chosen, -1)
        return False

    if pin:
        apply(0, [], +1)
        chosen.append(0)
        found = extend(1)
    else:
        found = extend(0)
    if found:
        return [group.unflatten(x) for x in chosen]
    return None


def _difference_table(group: GroupSpec):
    """table[x][y] = flat index of x - y."""
    order = group.order
    elems = [group.unflatten(i) for i in range(order)]
    table = []
    for x in elems:
        row = [
            group.flatten(tuple((a - b) % n for a, b, n in zip(x, y, group.factors)))
            for y in elems
        ]
        table.append(row)
    return table


def gamma_exact(g: int, group: GroupSpec, cfg: SearchConfig = SearchConfig()) -> ExtremalResult:
    """Minimum size of a g-difference subset of a finite abelian group.

    0 is pinned into A (any witness translates to one through 0).  Deepening
    starts at the strict half-plus-root covering bound.
    """
    g = int(g)
    if g < 1 or g > group.order:
        raise ValueError("need 1 <= g <= |G|")
    tb = trivial_bounds(g, group=group)
    lo = max(tb.sharper_cover_lower, g, 1)
    budget = _Budget(cfg.node_budget)
    witness = None
    value = None
    try:
        for k in range(lo, group.order + 1):
            found = _gamma_search_at_size(group, g, k, budget, cfg.translation_fix)
            if found is not None:
                witness, value = GroupSubset.of(group, found), k
                break
    except BudgetExceeded:
        full = GroupSubset.of(group, group.elements())
        best = witness if witness is not None else full
        return ExtremalResult(
            "gamma", g, None, group, best.size, best, False, budget.spent
        )
    assert witness is not None  # the full group always certifies
    assert verify_certificate(witness, g=g, mode="difference").passed
    return ExtremalResult("gamma", g, None, group, value, witness, True, budget.spent)


# ---------------------------------------------------------------------------
# beta / alpha: maximum g-Sidon sets


def _beta_max_size(g: int, N: int, budget: _Budget) -> tuple[int, list[int], bool]:
    cap = math.isqrt(g * max(2 * N - 1, 1))  # sum of q over [2,2N] is |A|^2
    qcounts = [0] * (2 * N + 1)
    best_size = 0
    best_set: list[int] = []
    chosen: list[int] = []

    def can_add(x) -> bool:
        if qcounts[2 * x] + 1 > g:
            return False
        for a in chosen:
            if qcounts[a + x] + 2 > g:
                return False
        return True

    def apply(x, add):
        for a in chosen:
            qcounts[a + x] += add
        qcounts[2 * x] += add

    def extend(start: int):
        nonlocal best_size, best_set
        budget.tick()
        if len(chosen) > best_size:
            best_size = len(chosen)
            best_set = list(chosen)
        if len(chosen) + (N - start + 1) <= best_size or len(chosen) >= cap:
            return
        for x in range(start, N + 1):
            if len(chosen) + (N - x + 1) <= best_size:
                break
            if can_add(x):
                apply(x, +2)
                qcounts[2 * x] -= 1  # the diagonal pair counts once
                chosen.append(x)
                extend(x + 1)
                chosen.pop()
                qcounts[2 * x] += 1
                apply(x, -2)

    complete = True
    try:
        extend(1)
    except BudgetExceeded:
        complete = False
    return best_size, best_set, complete


def _beta_first_at_size(g: int, N: int, M: int, budget: _Budget):
    """Lexicographically first g-Sidon subset of [1, N] with exactly M elements."""
    qcounts = [0] * (2 * N + 1)
    chosen: list[int] = []

    def extend(start: int) -> bool:
        budget.tick()
        if len(chosen) == M:
            return True
        for x in range(start, N + 1):
            if len(chosen) + (N - x + 1) < M:
                break
            ok = qcounts[2 * x] + 1 <= g and all(
                qcounts[a + x] + 2 <= g for a in chosen
            )
            if ok:
                for a in chosen:
                    qcounts[a + x] += 2
                qcounts[2 * x] += 1
                chosen.append(x)
                if extend(x + 1):
                    return True
                chosen.pop()
                qcounts[2 * x] -= 1
                for a in chosen:
                    qcounts[a + x] -= 2
        return False

    if extend(1):
        return chosen
    return None


def beta_exact(g: int, N: int, cfg: SearchConfig = SearchConfig()) -> ExtremalResult:
    """Maximum size of a g-Sidon subset of [1, N], with lex-min witness.

    Branch and bound finds the optimum, then a second pass pins the
    lexicographically first witness of that size.  On budget exhaustion the
    best packing found so far is returned (the singleton {1} at worst) with
    exhaustive=False; the value is then only a lower bound.
    """
    g, N = int(g), int(N)
    if g < 1 or N < 1:
        raise ValueError("need g >= 1 and N >= 1")
    budget = _Budget(cfg.node_budget)
    _, rough, exhaustive = _beta_max_size(g, N, budget)
    elems = rough if rough else [1]
    if exhaustive:
        try:
            first = _beta_first_at_size(g, N, len(rough), budget)
            if first is not None:
                elems = first
        except BudgetExceeded:
            exhaustive = False
    witness = IntSet.of(elems)
    assert verify_certificate(witness, g=g, N=N, mode="sidon").passed
    return ExtremalResult(
        "beta", g, N, None, witness.size, witness, exhaustive, budget.spent
    )


def _alpha_max(group: GroupSpec, g: int, budget: _Budget, pin: bool):
    order = group.order
    sum_table = _sum_table(group)
    cap = math.isqrt(g * order)  # sum of q over G is |A|^2
    qcounts = [0] * order
    best: list[list[int]] = [[]]

    def extend(start: int, chosen: list[int]):
        budget.tick()
        if len(chosen) > len(best[0]):
            best[0] = list(chosen)
        if len(chosen) + (order - start) <= len(best[0]) or len(chosen) >= cap:
            return
        for x in range(start, order):
            if len(chosen) + (order - x) <= len(best[0]):
                break
            row = sum_table[x]
            if qcounts[row[x]] + 1 > g:
                continue
            if any(qcounts[row[a]] + 2 > g for a in chosen):
                continue
            for a in chosen:
                qcounts[row[a]] += 2
            qcounts[row[x]] += 1
            chosen.append(x)
            extend(x + 1, chosen)
            chosen.pop()
            qcounts[row[x]] -= 1
            for a in chosen:
                qcounts[row[a]] -= 2

    complete = True
    try:
        if pin:
            # translation moves any witness onto one containing 0
            qcounts[sum_table[0][0]] += 1
            extend(1, [0])
        else:
            extend(0, [])
    except BudgetExceeded:
        complete = False
    return best[0], complete


def _sum_table(group: GroupSpec):
    """table[x][y] = flat index of x + y."""
    order = group.order
    elems = [group.unflatten(i) for i in range(order)]
    return [
        [
            group.flatten(tuple((a + b) % n for a, b, n in zip(x, y, group.factors)))
            for y in elems
        ]
        for x in elems
    ]


def alpha_exact(g: int, group: GroupSpec, cfg: SearchConfig = SearchConfig()) -> ExtremalResult:
    """Maximum size of a g-Sidon subset of a finite abelian group.

    The canonical witness contains 0 (sum profiles of translates are shifts
    of each other, so the optimum is attained through 0).  On budget
    exhaustion the best packing found so far is returned (a singleton at
    worst) with exhaustive=False.
    """
    g = int(g)
    if g < 1:
        raise ValueError("need g >= 1")
    budget = _Budget(cfg.node_budget)
    rough, exhaustive = _alpha_max(group, g, budget, cfg.translation_fix)
    flats = rough if rough else [0]
    if exhaustive:
        try:
            first = _alpha_first_flat(group, g, len(rough), budget, cfg.translation_fix)
            if first is not None:
                flats = first
        except BudgetExceeded:
            exhaustive = False
    witness = GroupSubset.of(group, (group.unflatten(x) for x in flats))
    assert verify_certificate(witness, g=g, mode="sidon").passed
    return ExtremalResult(
        "alpha", g, None, group, witness.size, witness, exhaustive, budget.spent
    )


def _alpha_first_flat(group: GroupSpec, g: int, M: int, budget: _Budget, pin: bool):
    order = group.order
    sum_table = _sum_table(group)
    qcounts = [0] * order
    chosen: list[int] = []

    def extend(start: int) -> bool:
        budget.tick()
        if len(chosen) == M:
            return True
        for x in range(start, order):
            if len(chosen) + (order - x) < M:
                break
            row = sum_table[x]
            if qcounts[row[x]] + 1 > g:
                continue
            if any(qcounts[row[a]] + 2 > g for a in chosen):
                continue
            for a in chosen:
                qcounts[row[a]] += 2
            qcounts[row[x]] += 1
            chosen.append(x)
            if extend(x + 1):
                return True
            chosen.pop()
            qcounts[row[x]] -= 1
            for a in chosen:
                qcounts[row[a]] -= 2
        return False

    if pin:
        qcounts[sum_table[0][0]] += 1
        chosen.append(0)
        found = extend(1)
    else:
        found = extend(0)
    if found:
        return list(chosen)
    return None


# ---------------------------------------------------------------------------
# ratio table


def ratio_report(results, ledger: BoundsLedger = BoundsLedger()) -> str:
    """CSV table of extremal values against square-root scaling.

    Interval rows report value/sqrt(gN), group rows value/sqrt(g|G|).  An
    exhaustive eta row below the published tau lower bound is flagged FATAL
    (it would contradict the covering theorem); that check squares both
    sides, rationals only.
    """
    lines = ["quantity,g,size-param,value,ratio,bound-flag"]
    for r in results:
        if r.quantity in ("eta", "beta"):
            denom_sq = r.g * r.N
        else:
            denom_sq = r.g * r.group.order
        ratio = r.value / math.sqrt(denom_sq)
        flag = "ok"
        if r.quantity == "eta" and r.exhaustive and not ledger.eta_ratio_ok(
            r.value, r.g, r.N
        ):
            flag = "FATAL"
        lines.append(
            f"{r.quantity},{r.g},{r.size_param},{r.value},{ratio:.3f},{flag}"
        )
    return "\n".join(lines) + "\n"
