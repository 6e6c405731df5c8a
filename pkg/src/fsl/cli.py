"""Command-line front end.

    fsl slopes push --g 2 --p 2 --rank 1 --degree 0
    fsl hn enumerate --g 2 --p 3 --d 0
    fsl symp campaign --g 2 --p 2 --l 3 --trials 100 --seed 7 --threads 4

Reports go to stdout (or ``--out``) as compact JSON; campaign tables can be
written as CSV.  Exit codes: 0 ok, 2 invalid input, 3 enumeration budget
exceeded, 4 pair search failed.
"""

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from fsl import hn, numerics, symplectic
from fsl.errors import BudgetExceeded, InvariantViolation, NoAdmissiblePair
from fsl.numerics import BundleNumerics, CurveContext


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    budget: Optional[int] = None
    output_format: str = "json"
    out_path: Optional[str] = None
    threads: int = 1

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(args.seed, args.budget, args.format, args.out, max(1, args.threads))


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _json_arg(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvariantViolation(f"not valid JSON: {text!r}") from exc


def _bundle(args) -> BundleNumerics:
    return BundleNumerics(args.rank, args.degree)


def _ctx(args) -> CurveContext:
    return CurveContext(args.g, args.p)


# -- slopes ---------------------------------------------------------------


def cmd_slopes(args, cfg: RunConfig):
    sub = args.action
    if sub == "campaign":
        return slopes_campaign(args.trials, cfg.seed)
    ctx = _ctx(args)
    if sub == "rank-bound":
        return {"rank": args.rank, "bound": numerics.faltings_rank_bound(ctx, args.rank)}
    b = _bundle(args)
    if sub == "push":
        return numerics.frobenius_pushforward(ctx, b).to_json()
    if sub == "pull":
        return numerics.frobenius_pullback(ctx, b).to_json()
    if sub == "etale":
        out, g_cov = numerics.etale_pullback(ctx, args.n, b)
        return {**out.to_json(), "covered_genus": g_cov}
    if sub == "twist":
        return numerics.twist(b, args.line_degree).to_json()
    if sub == "reduce":
        return numerics.reduction_plan(ctx, b).to_json()
    if sub == "bounds":
        lo, hi = numerics.adjunction_bounds(ctx, b)
        return {"min_quotient_slope": str(lo), "max_sub_slope": str(hi), "width": str(hi - lo)}
    raise InvariantViolation(f"unknown slopes action {sub!r}")


def slopes_campaign(trials: int, seed: int):
    """Random (g, p, r, d): Euler characteristic under pushforward and the
    end slope of the reduction pipeline."""
    rng = np.random.default_rng(seed)
    primes = [2, 3, 5, 7, 11, 13]
    euler_ok = reduce_ok = 0
    for _ in range(trials):
        g = int(rng.integers(2, 12))
        p = primes[int(rng.integers(len(primes)))]
        r = int(rng.integers(1, 9))
        d = int(rng.integers(-60, 61))
        ctx, b = CurveContext(g, p), BundleNumerics(r, d)
        pushed = numerics.frobenius_pushforward(ctx, b)
        if pushed.degree + pushed.rank * (1 - g) == b.degree + b.rank * (1 - g):
            euler_ok += 1
        plan = numerics.reduction_plan(ctx, b)
        if plan.pushed.slope() == plan.covered_genus - 1 == plan.reduced.slope():
            reduce_ok += 1
    return {"trials": trials, "seed": seed, "euler_ok": euler_ok, "reduction_ok": reduce_ok}


# -- hn -------------------------------------------------------------------


def _parts(args) -> hn.HNType:
    if args.parts is None:
        raise InvariantViolation("--parts is required")
    return hn.HNType.from_json(_json_arg(args.parts))


def cmd_hn(args, cfg: RunConfig):
    sub = args.action
    if sub == "nu":
        return str(hn.nu(_parts(args)))
    if sub == "bound":
        return hn.nu_bound(_ctx(args), args.rank)
    ctx = _ctx(args)
    if sub == "canonical":
        return hn.canonical_type(ctx, _bundle(args)).to_json()
    if sub == "delta":
        return [str(x) for x in hn.delta_sequence(ctx, _parts(args))]
    if sub == "enumerate":
        return hn.enumerate_report(ctx, args.d).to_json()
    if sub == "search":
        max_l = args.max_l if args.max_l is not None else args.r * ctx.p
        return hn.search_report(ctx, args.r, args.d, max_l).to_json()
    if sub == "trace":
        t = _parts(args)
        mu_E = Fraction(args.mu_e) if args.mu_e is not None else t.slope() / ctx.p
        return {
            "mu_E": str(mu_E),
            "delta": [str(x) for x in hn.delta_sequence(ctx, t)],
            "forward": hn.descent_filter(ctx, t, mu_E).to_json(),
            "dual": hn.dual_trace(ctx, t, mu_E).to_json(),
        }
    raise InvariantViolation(f"unknown hn action {sub!r}")


# -- symp -----------------------------------------------------------------


def _space(args) -> symplectic.SymplecticSpace:
    return symplectic.SymplecticSpace(args.l, args.g)


def _sigma(args, sp, cfg: RunConfig) -> symplectic.ObstructionSet:
    if args.sigma:
        try:
            with open(args.sigma) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvariantViolation(f"cannot read sigma file {args.sigma}: {exc}") from exc
        sigma = symplectic.ObstructionSet.from_json(obj)
        if (sigma.l, sigma.g) != (sp.l, sp.g):
            raise InvariantViolation("sigma file is for a different (l, g)")
        return sigma
    if args.random_size is not None:
        rng = np.random.default_rng(cfg.seed)
        return symplectic.random_obstruction_set(sp, args.random_size, rng, f"random-{cfg.seed}")
    return symplectic.ObstructionSet.empty(sp)


def cmd_symp(args, cfg: RunConfig):
    sub = args.action
    if sub == "threshold":
        return symplectic.threshold_check(args.g, args.p, args.l).to_json()
    sp = _space(args)
    if sub == "count-planes":
        planes = symplectic.enumerate_isotropic_planes(sp, cfg.budget)
        return {"l": sp.l, "g": sp.g, "planes": len(planes),
                "closed_form": symplectic.isotropic_plane_count(sp.g, sp.l)}
    if sub == "through":
        if args.x is not None:
            x = sp.vector(_json_arg(args.x))
            return {"x": list(x), "planes": symplectic.planes_through(sp, x, cfg.budget)}
        counts = {symplectic.planes_through(sp, x, cfg.budget) for x in sp.nonzero_vectors()}
        return {"distinct_counts": sorted(counts),
                "closed_form": symplectic.planes_through_count(sp.g, sp.l)}
    if sub == "incidence":
        sigma = _sigma(args, sp, cfg)
        return {"sigma_size": len(sigma),
                "plane_major": symplectic.incidence_count(sp, sigma, "plane", cfg.budget),
                "point_major": symplectic.incidence_count(sp, sigma, "point", cfg.budget)}
    if sub == "pair-find":
        sigma = _sigma(args, sp, cfg)
        return symplectic.find_admissible_pair(sp, sigma, cfg.budget).to_json()
    if sub == "check-pair":
        sigma = _sigma(args, sp, cfg)
        alpha, beta = _json_arg(args.alpha), _json_arg(args.beta)
        chk = symplectic.check_pair(sp, sigma, alpha, beta)
        return {"ok": chk.ok, "checks": chk.to_json()}
    if sub == "campaign":
        return symp_campaign(args.g, args.p, args.l, args.trials, args.size, cfg)
    raise InvariantViolation(f"unknown symp action {sub!r}")


def _run_trial(sp, size, seq, budget):
    rng = np.random.default_rng(seq)
    sigma = symplectic.random_obstruction_set(sp, size, rng)
    t0 = time.perf_counter()
    try:
        pair = symplectic.find_admissible_pair(sp, sigma, budget)
    except NoAdmissiblePair:
        pair = None
    elapsed = time.perf_counter() - t0
    ok = pair is not None and symplectic.check_pair(sp, sigma, pair.alpha, pair.beta).ok
    return pair, ok, elapsed


def symp_campaign(g: int, p: int, l: int, trials: int, size: Optional[int], cfg: RunConfig):
    """Seeded random obstruction sets, by default at the extremal size
    ``l^(2g-2) g (p-1)``.  Trial seeds are spawned from ``cfg.seed`` so the
    report does not depend on the worker count."""
    sp = symplectic.SymplecticSpace(l, g)
    CurveContext(g, p)
    if size is None:
        size = l ** (2 * g - 2) * g * (p - 1)
    symplectic.catalog(sp, cfg.budget)
    seqs = np.random.SeedSequence(cfg.seed).spawn(trials)
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        results = list(pool.map(lambda s: _run_trial(sp, size, s, cfg.budget), seqs))

    rows = []
    for i, (pair, ok, _) in enumerate(results):
        rows.append({
            "trial": i,
            "success": ok,
            "method": pair.method if pair else "none",
            "alpha": list(pair.alpha) if pair else None,
            "beta": list(pair.beta) if pair else None,
        })
    successes = sum(r["success"] for r in rows)
    times = np.array([t for _, _, t in results]) * 1e3
    if len(times):
        pct = {f"p{q}": round(float(np.percentile(times, q)), 3) for q in (50, 90, 99)}
        print(f"pair-find timing (ms): {pct}", file=sys.stderr)
    return {
        "g": g, "p": p, "l": l, "size": size, "trials": trials, "seed": cfg.seed,
        "in_regime": symplectic.in_regime(g, p, l, size),
        "successes": successes,
        "success_rate": str(Fraction(successes, trials)) if trials else None,
        "rows": rows,
    }


def _campaign_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trial", "success", "method", "alpha", "beta"])
    for r in report["rows"]:
        w.writerow([r["trial"], int(r["success"]), r["method"],
                    " ".join(map(str, r["alpha"] or [])), " ".join(map(str, r["beta"] or []))])
    return buf.getvalue()


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=None, help="enumeration guard (default: $FSL_BUDGET or 1e8)")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", default=None)
    common.add_argument("--threads", type=int, default=1)

    curve = argparse.ArgumentParser(add_help=False)
    curve.add_argument("--g", type=int, required=True)
    curve.add_argument("--p", type=int, required=True)

    bundle = argparse.ArgumentParser(add_help=False)
    bundle.add_argument("--rank", type=int, required=True)
    bundle.add_argument("--degree", type=int, required=True)

    parts = argparse.ArgumentParser(add_help=False)
    parts.add_argument("--parts", help="JSON list [[rank, degree], ...] or {\"parts\": ...}")

    parser = argparse.ArgumentParser(prog="fsl", description=__doc__.split("\n")[0])
    groups = parser.add_subparsers(dest="group", required=True)

    slopes = groups.add_parser("slopes", help="degree/slope transforms")
    s = slopes.add_subparsers(dest="action", required=True)
    for name in ("push", "pull", "bounds", "reduce"):
        s.add_parser(name, parents=[common, curve, bundle])
    s.add_parser("etale", parents=[common, curve, bundle]).add_argument("--n", type=int, required=True)
    tw = s.add_parser("twist", parents=[common, curve, bundle])
    tw.add_argument("--line-degree", type=int, required=True)
    rb = s.add_parser("rank-bound", parents=[common, curve])
    rb.add_argument("--rank", type=int, required=True)
    sc = s.add_parser("campaign", parents=[common])
    sc.add_argument("--trials", type=int, default=1000)

    hnp = groups.add_parser("hn", help="Harder-Narasimhan types")
    h = hnp.add_subparsers(dest="action", required=True)
    h.add_parser("nu", parents=[common, parts])
    nb = h.add_parser("bound", parents=[common, curve])
    nb.add_argument("--rank", type=int, required=True)
    h.add_parser("canonical", parents=[common, curve, bundle])
    h.add_parser("delta", parents=[common, curve, parts])
    h.add_parser("enumerate", parents=[common, curve]).add_argument("--d", type=int, required=True)
    se = h.add_parser("search", parents=[common, curve])
    se.add_argument("--r", type=int, required=True)
    se.add_argument("--d", type=int, required=True)
    se.add_argument("--max-l", type=int, default=None)
    tr = h.add_parser("trace", parents=[common, curve, parts])
    tr.add_argument("--mu-e", default=None, help="slope of E as 'num/den' (default: slope of the type / p)")

    sym = groups.add_parser("symp", help="isotropic planes and the pair search")
    y = sym.add_subparsers(dest="action", required=True)
    space = argparse.ArgumentParser(add_help=False)
    space.add_argument("--l", type=int, required=True)
    space.add_argument("--g", type=int, required=True)
    sig = argparse.ArgumentParser(add_help=False)
    sig.add_argument("--sigma", default=None, help="obstruction set JSON file (default: empty)")
    sig.add_argument("--random-size", type=int, default=None, help="random obstruction set of this size")
    y.add_parser("count-planes", parents=[common, space])
    y.add_parser("through", parents=[common, space]).add_argument("--x", default=None)
    y.add_parser("incidence", parents=[common, space, sig])
    th = y.add_parser("threshold", parents=[common, space])
    th.add_argument("--p", type=int, required=True)
    y.add_parser("pair-find", parents=[common, space, sig])
    cp = y.add_parser("check-pair", parents=[common, space, sig])
    cp.add_argument("--alpha", required=True)
    cp.add_argument("--beta", required=True)
    ca = y.add_parser("campaign", parents=[common, space])
    ca.add_argument("--p", type=int, required=True)
    ca.add_argument("--trials", type=int, default=100)
    ca.add_argument("--size", type=int, default=None)
    return parser


HANDLERS = {"slopes": cmd_slopes, "hn": cmd_hn, "symp": cmd_symp}


def _emit(text: str, cfg: RunConfig):
    if cfg.out_path:
        with open(cfg.out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(args)
    try:
        report = HANDLERS[args.group](args, cfg)
    except (InvariantViolation, BudgetExceeded, NoAdmissiblePair) as exc:
        err = {"error": {"type": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}}
        if isinstance(exc, NoAdmissiblePair):
            err["error"]["diagnostics"] = exc.diagnostics
        if isinstance(exc, BudgetExceeded):
            err["error"]["needed"], err["error"]["budget"] = exc.needed, exc.budget
        sys.stdout.write(_dumps(err) + "\n")
        return exc.exit_code
    if cfg.output_format == "csv" and isinstance(report, dict) and "rows" in report:
        _emit(_campaign_csv(report), cfg)
    else:
        _emit(_dumps(report) + "\n", cfg)
    return 0


if __name__ == "__main__":
    sys.exit(main())
