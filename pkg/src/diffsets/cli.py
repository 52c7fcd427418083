"""Command-line front end with reproducible, machine-readable output.

Each subcommand prints one report: JSON with sorted keys and rationals as
"p/q" strings, or a fixed-header CSV for ratio tables.  Identical inputs
and seed reproduce identical bytes.  Exit codes: 0 success or passing
check, 1 certificate violation found, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .bridge import (
    ProbSeq,
    StepFunction,
    autocorrelation_min,
    averages_to_probs,
    group_set_to_torus,
    local_averages,
    set_to_step,
    torus_autocorrelation_min,
)
from .constructions import (
    RandomModel,
    best_shift_union,
    blow_up,
    cyclic_pipeline,
    lift_to_cyclic,
    monte_carlo_validate,
    parabola_set,
    random_group_subset,
    sequence_random_set,
)
from .core_sets import (
    BoundsLedger,
    CertificateError,
    GroupSpec,
    GroupSubset,
    IntSet,
    format_fraction,
    group_rep_profile,
    rep_diff_profile,
    rep_sum_profile,
    trivial_bounds,
    verify_certificate,
)
from .solver import SearchConfig, alpha_exact, beta_exact, eta_exact, gamma_exact

__all__ = ["RunManifest", "dispatch", "main"]


@dataclass
class RunManifest:
    """Reproducibility sidecar: what ran, on which inputs, writing where."""

    cmdline: list
    seed: int
    version: str
    input_digests: dict
    wall_clock_seconds: float
    outputs: list

    def to_json(self) -> dict:
        return {
            "cmdline": list(self.cmdline),
            "seed": self.seed,
            "version": self.version,
            "input_digests": dict(sorted(self.input_digests.items())),
            "wall_clock_seconds": round(self.wall_clock_seconds, 3),
            "outputs": list(self.outputs),
        }


@dataclass
class _Run:
    """Per-invocation state: input digests for the manifest."""

    digests: dict = field(default_factory=dict)

    def load_json(self, path: str):
        with open(path, "rb") as fh:
            raw = fh.read()
        self.digests[path] = hashlib.sha256(raw).hexdigest()
        return json.loads(raw)

    def load_set(self, path: str):
        """An array is an integer set; an object is a group subset."""
        data = self.load_json(path)
        if isinstance(data, list):
            return IntSet.from_json(data)
        return GroupSubset.from_json(data)


def _dump(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Independent recounts for --oracle.  Plain dict loops, no shared backend.

_ORACLE_PAIR_LIMIT = 250_000
_ORACLE_DOMAIN_LIMIT = 5_000


def _brute_pair_counts(elements, factors, kind):
    counts = {}
    for a in elements:
        for b in elements:
            if factors is None:
                key = a - b if kind == "difference" else a + b
            elif kind == "difference":
                key = tuple((x - y) % n for x, y, n in zip(a, b, factors))
            else:
                key = tuple((x + y) % n for x, y, n in zip(a, b, factors))
            counts[key] = counts.get(key, 0) + 1
    return counts


def _oracle_achieved(A, N, mode) -> int:
    """min difference count over the domain, or max sum count."""
    if isinstance(A, IntSet):
        counts = _brute_pair_counts(A.elements, None, mode)
        if mode == "difference":
            return min(counts.get(m, 0) for m in range(1, N + 1))
        return max((c for s, c in counts.items() if 2 <= s <= 2 * N), default=0)
    group = A.group
    counts = _brute_pair_counts(A.elements, group.factors, mode)
    if mode == "difference":
        return min(counts.get(v, 0) for v in group.elements())
    return max(counts.values(), default=0)


def _oracle_size_ok(A, N) -> bool:
    domain = N if isinstance(A, IntSet) else A.group.order
    return A.size * A.size <= _ORACLE_PAIR_LIMIT and domain <= _ORACLE_DOMAIN_LIMIT


def _oracle_skipped() -> dict:
    return {"checked": False, "reason": "instance too large"}


def _oracle_match(A, N, mode, expect_achieved) -> tuple[dict, bool]:
    """Exact recount must reproduce the library's achieved count."""
    if not _oracle_size_ok(A, N):
        return _oracle_skipped(), True
    achieved = _oracle_achieved(A, N, mode)
    ok = achieved == expect_achieved
    return {"checked": True, "achieved_g": achieved, "match": ok}, ok


def _oracle_at_least(A, N, claim) -> tuple[dict, bool]:
    """Exact recount must attain the claimed difference certificate."""
    if not _oracle_size_ok(A, N):
        return _oracle_skipped(), True
    achieved = _oracle_achieved(A, N, "difference")
    ok = achieved >= claim
    return {"checked": True, "achieved_g": achieved, "match": ok}, ok


def _oracle_fail(payload, summary):
    print("oracle mismatch: independent recount disagrees", file=sys.stderr)
    return 2, payload, summary


# ---------------------------------------------------------------------------
# Subcommand handlers.  Each returns (exit code, payload, one-line summary);
# a string payload is emitted verbatim (CSV), a dict as canonical JSON.


def _cmd_verify(args, run):
    A = run.load_set(args.set)
    if isinstance(A, IntSet):
        if args.N is None:
            raise ValueError("--N is required for integer sets")
        verdict = verify_certificate(A, g=args.g, N=args.N, mode=args.mode)
        domain = f"[{args.N}]"
    else:
        if args.N is not None:
            raise ValueError("--N applies only to integer sets")
        verdict = verify_certificate(A, g=args.g, mode=args.mode)
        domain = A.group.label()
    payload = {
        "mode": args.mode,
        "g": args.g,
        "domain": domain,
        "size": A.size,
        "verdict": verdict.to_json(),
    }
    if verdict.passed:
        summary = f"PASS achieved_g={verdict.achieved_g}"
    else:
        summary = f"FAIL witness={verdict.witness} achieved_g={verdict.achieved_g}"
    if args.oracle:
        oracle, ok = _oracle_match(A, args.N, args.mode, verdict.achieved_g)
        payload["oracle"] = oracle
        if not ok:
            return _oracle_fail(payload, summary)
    return (0 if verdict.passed else 1), payload, summary


def _cmd_profile(args, run):
    A = run.load_set(args.set)
    if isinstance(A, IntSet):
        lo, hi = args.lo, args.hi
        if args.kind == "difference":
            lo = 1 if lo is None else lo
            hi = A.elements[-1] - A.elements[0] if hi is None else hi
            prof = rep_diff_profile(A, (lo, hi))
        else:
            lo = 2 * A.elements[0] if lo is None else lo
            hi = 2 * A.elements[-1] if hi is None else hi
            prof = rep_sum_profile(A, (lo, hi))
    else:
        prof = group_rep_profile(A, args.kind)
    summary = f"{args.kind} counts: min={prof.min_count} max={prof.max_count}"
    return 0, prof.to_json(), summary


def _cmd_construct_parabola(args, run):
    if (args.u is None) == (args.k is None):
        raise ValueError("give exactly one of --u or --k")
    if args.u is not None:
        A = parabola_set(args.p, args.u)
        payload = {"p": args.p, "u": args.u, "size": A.size, "set": A.to_json()}
        summary = f"parabola u={args.u} in (Z/{args.p})^2: {A.size} points"
        if args.oracle:
            on_curve = all(
                (x * x - args.u * y) % args.p == 0 for x, y in A.elements
            )
            ok = on_curve and A.size == args.p
            payload["oracle"] = {"checked": True, "match": ok}
            if not ok:
                return _oracle_fail(payload, summary)
        return 0, payload, summary
    union = best_shift_union(args.p, args.k, cap=args.cap, seed=args.seed)
    payload = union.to_json()
    summary = (
        f"union of {args.k} parabolas at t={union.t}: size {union.subset.size}, "
        f"verified_g={union.verified_g} ({union.verified_mode})"
    )
    if args.oracle:
        if not _oracle_size_ok(union.subset, None):
            payload["oracle"] = _oracle_skipped()
        else:
            achieved = _oracle_achieved(union.subset, None, "difference")
            # sampled verification only upper-bounds the true minimum
            if union.verified_mode == "exhaustive":
                ok = achieved == union.verified_g
            else:
                ok = achieved <= union.verified_g
            payload["oracle"] = {"checked": True, "achieved_g": achieved, "match": ok}
            if not ok:
                return _oracle_fail(payload, summary)
    return 0, payload, summary


def _cmd_construct_lift(args, run):
    A = run.load_set(args.A)
    if not isinstance(A, GroupSubset):
        raise ValueError("--A must be a group-subset JSON file")
    claim = None
    if args.g is not None:
        v = verify_certificate(A, g=args.g, mode="difference")
        if not v.passed:
            raise CertificateError("input is not a g-difference set", v)
        claim = args.g * (args.s - 1)
    C = lift_to_cyclic(A, args.s)
    modulus = C.group.factors[0]
    payload = {"modulus": modulus, "s": args.s, "size": C.size, "set": C.to_json()}
    summary = f"lifted to Z/{modulus}: {C.size} elements"
    if claim is not None and claim >= 1:
        v = verify_certificate(C, g=claim, mode="difference")
        if not v.passed:
            raise CertificateError("lift lost its certificate", v)
        payload["certified_g"] = claim
        summary += f", {claim}-difference set"
        if args.oracle:
            oracle, ok = _oracle_at_least(C, None, claim)
            payload["oracle"] = oracle
            if not ok:
                return _oracle_fail(payload, summary)
    return 0, payload, summary


def _cmd_construct_pipeline(args, run):
    report = cyclic_pipeline(args.k, args.s, args.p, cap=args.cap, seed=args.seed)
    payload = report.to_json()
    summary = (
        f"Z/{payload['modulus']}: size {payload['size']}, "
        f"certified {report.cyclic_g}-difference set"
    )
    if args.oracle:
        oracle, ok = _oracle_at_least(report.lifted, None, report.cyclic_g)
        payload["oracle"] = oracle
        if not ok:
            return _oracle_fail(payload, summary)
    return 0, payload, summary


def _cmd_construct_blowup(args, run):
    A = run.load_set(args.A)
    C = run.load_set(args.C)
    if not isinstance(A, IntSet):
        raise ValueError("--A must be an integer-set JSON array")
    if not isinstance(C, GroupSubset):
        raise ValueError("--C must be a group-subset JSON file")
    if C.group.rank != 1:
        raise ValueError("--C must live in a cyclic group")
    q = C.group.factors[0]
    if args.q is not None and args.q != q:
        raise ValueError(f"--q {args.q} does not match the group of C (order {q})")
    g1 = args.g1
    if g1 is None:
        g1 = verify_certificate(A, g=1, N=args.N, mode="difference").achieved_g
        if g1 < 1:
            raise CertificateError(f"A is not a difference set for [{args.N}]")
    g2 = args.g2
    if g2 is None:
        g2 = verify_certificate(C, g=1, mode="difference").achieved_g
        if g2 < 1:
            raise CertificateError("C is not a difference set for its group")
    B = blow_up(A, g1, args.N, C, g2)
    payload = {
        "set": B.to_json(),
        "size": B.size,
        "g": g1 * g2,
        "g1": g1,
        "g2": g2,
        "q": q,
        "N": q * args.N,
    }
    summary = f"blow-up: {B.size} elements, {g1 * g2}-difference set for [{q * args.N}]"
    if args.oracle:
        oracle, ok = _oracle_at_least(B, q * args.N, g1 * g2)
        payload["oracle"] = oracle
        if not ok:
            return _oracle_fail(payload, summary)
    return 0, payload, summary


def _tail_violation(report) -> bool:
    return any(row["empirical"] > row["bound"] for row in report.tail_checks)


def _cmd_random_group(args, run):
    group = GroupSpec(tuple(args.factors))
    if args.trials is not None:
        if args.delta is None or args.epsilon is None:
            raise ValueError("--trials needs --delta and --epsilon")
        model = RandomModel(
            "group-uniform", master_seed=args.seed, group=group, g=args.g
        )
        report = monte_carlo_validate(model, args.trials, args.delta, args.epsilon)
        summary = f"{report.success_count}/{report.trials} trials within thresholds"
        return (1 if _tail_violation(report) else 0), report.to_json(), summary
    A = random_group_subset(group, args.g, args.seed)
    payload = {"g": args.g, "seed": args.seed, "size": A.size, "set": A.to_json()}
    return 0, payload, f"sampled {A.size} of {group.order} elements"


def _cmd_random_sequence(args, run):
    probs = ProbSeq.from_json(run.load_json(args.probs))
    if args.trials is not None:
        if args.delta is None or args.epsilon is None:
            raise ValueError("--trials needs --delta and --epsilon")
        if args.N is None:
            raise ValueError("--trials needs --N (shift range for the check)")
        model = RandomModel(
            "sequence-weighted",
            master_seed=args.seed,
            probs=probs,
            target_N=args.N,
        )
        report = monte_carlo_validate(model, args.trials, args.delta, args.epsilon)
        summary = f"{report.success_count}/{report.trials} trials within thresholds"
        return (1 if _tail_violation(report) else 0), report.to_json(), summary
    A = sequence_random_set(probs, args.seed)
    payload = {"seed": args.seed, "size": A.size, "set": A.to_json()}
    return 0, payload, f"sampled {A.size} indices"


def _cmd_bridge_set_to_fn(args, run):
    A = run.load_set(args.set)
    if not isinstance(A, IntSet):
        raise ValueError("--set must be an integer-set JSON array")
    f = set_to_step(A, args.g, args.N)
    summary = f"step function with {len(f.values)} pieces"
    return 0, f.to_json(), summary


def _cmd_bridge_fn_check(args, run):
    f = StepFunction.from_json(run.load_json(args.fn))
    low, argmin = autocorrelation_min(f, args.lo, args.hi)
    passes = low >= 1
    payload = {
        "window": [format_fraction(Fraction(args.lo)), format_fraction(Fraction(args.hi))],
        "min": format_fraction(low),
        "argmin": format_fraction(argmin),
        "passes": passes,
    }
    state = "PASS" if passes else "FAIL"
    return (0 if passes else 1), payload, f"{state} min {low} at {argmin}"


def _cmd_bridge_averages(args, run):
    f = StepFunction.from_json(run.load_json(args.fn))
    seq = local_averages(f, args.N, args.tau_hat, stretch=args.stretch)
    c = seq.conditions
    passes = c.sum_identity_ok and c.cond2_ok and c.cond3_ok
    state = "PASS" if passes else "FAIL"
    summary = f"L={seq.L} support={len(seq.coeffs)} conditions {state}"
    return (0 if passes else 1), seq.to_json(), summary


def _cmd_bridge_probs(args, run):
    f = StepFunction.from_json(run.load_json(args.fn))
    seq = local_averages(f, args.N, args.tau_hat, stretch=args.stretch)
    probs = averages_to_probs(seq)
    summary = (
        f"{len(probs.coeffs)} inclusion probabilities, "
        f"expected size {probs.expected_size_float():.3f}"
    )
    return 0, probs.to_json(), summary


def _cmd_bridge_torus(args, run):
    A = run.load_set(args.set)
    if not isinstance(A, GroupSubset):
        raise ValueError("--set must be a group-subset JSON file")
    h = group_set_to_torus(A, args.g)
    low, cell = torus_autocorrelation_min(h)
    payload = {
        "torus": h.to_json(),
        "l1_norm": h.l1_norm().to_json(),
        "min": format_fraction(low),
        "argmin_cell": list(cell),
    }
    summary = f"L1 {float(h.l1_norm()):.6f}, autocorrelation min {low}"
    return 0, payload, summary


def _cmd_solve(args, run):
    kwargs = {
        "translation_fix": not args.no_pin,
        "confirm_window": not args.no_confirm,
    }
    if args.window is not None:
        kwargs["window"] = args.window
    if args.budget is not None:
        kwargs["node_budget"] = args.budget
    cfg = SearchConfig(**kwargs)
    if args.quantity in ("eta", "beta"):
        if args.N is None:
            raise ValueError(f"solve {args.quantity} needs --N")
        fn = eta_exact if args.quantity == "eta" else beta_exact
        result = fn(args.g, args.N, cfg)
    else:
        if args.factors is None:
            raise ValueError(f"solve {args.quantity} needs --factors")
        fn = gamma_exact if args.quantity == "gamma" else alpha_exact
        result = fn(args.g, GroupSpec(tuple(args.factors)), cfg)
    summary = (
        f"{result.quantity} g={result.g} param={result.size_param}: "
        f"value {result.value} (exhaustive={result.exhaustive})"
    )
    return 0, result.to_json(), summary


def _cmd_report_ratios(args, run):
    ledger = BoundsLedger()
    rows = []
    code = 0
    for path in args.results:
        data = run.load_json(path)
        quantity, g, value = data["quantity"], data["g"], data["value"]
        param = data["N"] if "N" in data else math.prod(data["group"])
        flag = "ok"
        if (
            quantity == "eta"
            and data.get("exhaustive")
            and not ledger.eta_ratio_ok(value, g, param)
        ):
            flag = "FATAL"
            code = 1
        rows.append(
            {
                "quantity": quantity,
                "g": g,
                "param": param,
                "value": value,
                "ratio": round(value / math.sqrt(g * param), 6),
                "flag": flag,
            }
        )
    summary = f"{len(rows)} rows, {'all ok' if code == 0 else 'FATAL flags present'}"
    if args.json:
        return code, {"rows": rows}, summary
    lines = ["quantity,g,param,value,ratio,flag"]
    for r in rows:
        lines.append(
            f"{r['quantity']},{r['g']},{r['param']},{r['value']},"
            f"{r['ratio']:.6f},{r['flag']}"
        )
    return code, "\n".join(lines) + "\n", summary


def _cmd_bounds(args, run):
    payload = {"ledger": BoundsLedger().to_json()}
    summary = "published ratio constants"
    if args.g is not None:
        if (args.N is None) == (args.factors is None):
            raise ValueError("give exactly one of --N or --factors with --g")
        if args.N is not None:
            tb = trivial_bounds(args.g, N=args.N)
        else:
            tb = trivial_bounds(args.g, group=GroupSpec(tuple(args.factors)))
        payload["trivial"] = tb.to_json()
        summary = (
            f"cover lower {tb.min_cover_lower}, packing upper {tb.max_packing_upper}"
        )
    elif args.N is not None or args.factors is not None:
        raise ValueError("--N/--factors need --g")
    return 0, payload, summary


# ---------------------------------------------------------------------------
# Parser plumbing


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed for any randomized path")
    common.add_argument("--json", action="store_true", help="emit the full JSON report")
    common.add_argument("--out", help="write the report to this path instead of stdout")
    common.add_argument("--manifest", help="write a run manifest (inputs, digests, timing) to this path")

    oracle = argparse.ArgumentParser(add_help=False)
    oracle.add_argument(
        "--oracle",
        action="store_true",
        help="re-check the result by brute-force recount when small enough",
    )

    p = argparse.ArgumentParser(
        prog="diffsets",
        description="Generalized difference sets and autocorrelation integrals.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", parents=[common, oracle], help="check a certificate")
    sp.add_argument("--set", required=True, help="JSON file: array (integer set) or group subset")
    sp.add_argument("--mode", choices=("difference", "sidon"), default="difference")
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--N", type=int, help="shift range for integer sets")
    sp.set_defaults(handler=_cmd_verify)

    sp = sub.add_parser("profile", parents=[common], help="representation-count profile")
    sp.add_argument("--set", required=True)
    sp.add_argument("--kind", choices=("difference", "sum"), default="difference")
    sp.add_argument("--lo", type=int, help="first shift (integer sets)")
    sp.add_argument("--hi", type=int, help="last shift (integer sets)")
    sp.set_defaults(handler=_cmd_profile)

    construct = sub.add_parser("construct", help="explicit constructions")
    csub = construct.add_subparsers(dest="what", required=True)

    sp = csub.add_parser("parabola", parents=[common, oracle], help="parabola or best-shift union")
    sp.add_argument("--p", type=int, required=True, help="odd prime modulus")
    sp.add_argument("--u", type=int, help="single parabola parameter")
    sp.add_argument("--k", type=int, help="number of parabolas in the union")
    sp.add_argument("--cap", type=int, default=10**6, help="exhaustive-verification budget")
    sp.set_defaults(handler=_cmd_construct_parabola)

    sp = csub.add_parser("lift", parents=[common, oracle], help="lift a plane set to a cyclic group")
    sp.add_argument("--A", required=True, help="group-subset JSON over (Z/p)^2")
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--g", type=int, help="certified difference count of A, verified first")
    sp.set_defaults(handler=_cmd_construct_lift)

    sp = csub.add_parser("pipeline", parents=[common, oracle], help="union then lift, certified end to end")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--cap", type=int, default=10**6)
    sp.set_defaults(handler=_cmd_construct_pipeline)

    sp = csub.add_parser("blowup", parents=[common, oracle], help="compose interval and cyclic certificates")
    sp.add_argument("--A", required=True, help="integer-set JSON")
    sp.add_argument("--N", type=int, required=True, help="shift range certified by A")
    sp.add_argument("--C", required=True, help="cyclic group-subset JSON")
    sp.add_argument("--q", type=int, help="order of the cyclic group (checked against C)")
    sp.add_argument("--g1", type=int, help="difference count claimed for A (default: achieved)")
    sp.add_argument("--g2", type=int, help="difference count claimed for C (default: achieved)")
    sp.set_defaults(handler=_cmd_construct_blowup)

    random_p = sub.add_parser("random", help="random models and Monte Carlo validation")
    rsub = random_p.add_subparsers(dest="what", required=True)

    sp = rsub.add_parser("group", parents=[common], help="uniform sqrt(g/|G|) inclusion")
    sp.add_argument("--factors", type=int, nargs="+", required=True)
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--trials", type=int, help="run Monte Carlo validation instead of one draw")
    sp.add_argument("--delta", type=Fraction, help="difference-count slack, e.g. 3/10")
    sp.add_argument("--epsilon", type=Fraction, help="size slack, e.g. 1/10")
    sp.set_defaults(handler=_cmd_random_group)

    sp = rsub.add_parser("sequence", parents=[common], help="weighted inclusion from a probability file")
    sp.add_argument("--probs", required=True, help="ProbSeq JSON (see bridge probs)")
    sp.add_argument("--N", type=int, help="shift range checked per trial")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--delta", type=Fraction)
    sp.add_argument("--epsilon", type=Fraction)
    sp.set_defaults(handler=_cmd_random_sequence)

    bridge = sub.add_parser("bridge", help="sets to step functions and back")
    bsub = bridge.add_subparsers(dest="what", required=True)

    sp = bsub.add_parser("set-to-fn", parents=[common], help="indicator step function of a certified set")
    sp.add_argument("--set", required=True)
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.set_defaults(handler=_cmd_bridge_set_to_fn)

    sp = bsub.add_parser("fn-check", parents=[common], help="autocorrelation minimum over a window")
    sp.add_argument("--fn", required=True, help="StepFunction JSON")
    sp.add_argument("--lo", type=Fraction, default=Fraction(0))
    sp.add_argument("--hi", type=Fraction, default=Fraction(1))
    sp.set_defaults(handler=_cmd_bridge_fn_check)

    sp = bsub.add_parser("averages", parents=[common], help="sliding-window averages with conditions")
    sp.add_argument("--fn", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--tau-hat", type=Fraction, required=True, dest="tau_hat")
    sp.add_argument("--stretch", action="store_true")
    sp.set_defaults(handler=_cmd_bridge_averages)

    sp = bsub.add_parser("probs", parents=[common], help="inclusion probabilities from averages")
    sp.add_argument("--fn", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--tau-hat", type=Fraction, required=True, dest="tau_hat")
    sp.add_argument("--stretch", action="store_true")
    sp.set_defaults(handler=_cmd_bridge_probs)

    sp = bsub.add_parser("torus", parents=[common], help="normalized indicator on the torus")
    sp.add_argument("--set", required=True, help="group-subset JSON")
    sp.add_argument("--g", type=int, required=True)
    sp.set_defaults(handler=_cmd_bridge_torus)

    solve = sub.add_parser("solve", help="exact extremal search")
    ssub = solve.add_subparsers(dest="quantity", required=True)
    for quantity in ("eta", "gamma", "beta", "alpha"):
        sp = ssub.add_parser(quantity, parents=[common])
        sp.add_argument("--g", type=int, required=True)
        sp.add_argument("--N", type=int, help="interval parameter (eta, beta)")
        sp.add_argument("--factors", type=int, nargs="+", help="group factors (gamma, alpha)")
        sp.add_argument("--window", type=int, help="search hull for eta, default 2N")
        sp.add_argument("--budget", type=int, help="node budget before a partial result")
        sp.add_argument("--no-confirm", action="store_true", help="skip the doubled-window rerun")
        sp.add_argument("--no-pin", action="store_true", help="search without translation pinning")
        sp.set_defaults(handler=_cmd_solve)

    report = sub.add_parser("report", help="tables over solved results")
    repsub = report.add_subparsers(dest="what", required=True)
    sp = repsub.add_parser("ratios", parents=[common], help="value/sqrt(g*param) table with bound flags")
    sp.add_argument("--results", nargs="+", required=True, help="result JSON files from solve --json")
    sp.set_defaults(handler=_cmd_report_ratios)

    sp = sub.add_parser("bounds", parents=[common], help="published constants and trivial bounds")
    sp.add_argument("--g", type=int)
    sp.add_argument("--N", type=int)
    sp.add_argument("--factors", type=int, nargs="+")
    sp.set_defaults(handler=_cmd_bounds)

    return p


def _write_text(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def dispatch(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    run = _Run()
    start = time.monotonic()
    try:
        code, payload, summary = args.handler(args, run)
    except CertificateError as exc:
        print(f"certificate violation: {exc}", file=sys.stderr)
        if getattr(exc, "verdict", None) is not None:
            print(_dump(exc.verdict.to_json()), file=sys.stderr, end="")
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if isinstance(payload, str):
        text = payload
    elif args.json:
        text = _dump(payload)
    else:
        text = summary + "\n"
    try:
        _write_text(text, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.manifest:
        manifest = RunManifest(
            cmdline=list(argv),
            seed=args.seed,
            version=__version__,
            input_digests=run.digests,
            wall_clock_seconds=time.monotonic() - start,
            outputs=[args.out or "stdout"],
        )
        try:
            _write_text(_dump(manifest.to_json()), args.manifest)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    return code


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
