"""Command-line entry point.

Subcommands:
  spectrum  -- theoretical eigenvalue spectra (with shape predictions) as CSV
  risk      -- Monte-Carlo ridge-regression risk curves (with closed-form
               predictions) as CSV
  validate  -- internal consistency suites, JSON report, nonzero exit on
               failure

Every CSV opens with a '#'-prefixed block echoing the tool version, the
fully resolved configuration, and the master seed; bodies are byte-identical
across reruns of the same configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from . import basis, covariance, csvio, hermite, krr, smoothcount, theory
from .covariance import build as build_cov
from .smoothcount import CountQuery, count_bruteforce, count_recursive
from .spectral import KernelSpec, full_spectrum, predicted_orders

N_TEST = 4000                 # fresh samples per Monte-Carlo risk estimate
DELTA0 = 0.05                 # threshold slack for the Low/High partition
DEFAULT_BUDGET_SECONDS = 60.0
_FLOP_RATE = 5.0e9            # conservative sustained flop rate for estimates

SPECTRUM_COLUMNS = ("alpha", "rank", "beta", "degree", "lambda",
                    "predicted_lambda", "sector")
RISK_COLUMNS = ("alpha", "n", "seed_count", "target", "mean_risk", "std_err",
                "theory_risk", "theory_mode", "mean_risk_rel")

PRESETS = {
    "fig2-left": dict(command="spectrum", d=20, alphas=(0.0, 0.3, 0.7, 1.05),
                      kernel=("exp-trunc", 5)),
    "fig2-right": dict(command="spectrum", d=100, alphas=(0.0, 0.3, 0.7, 1.05),
                       kernel=("poly", (1.0, 3.0, 3.0, 1.0))),
    "fig3": dict(command="spectrum", d=100, alphas=(1.01, 1.5, 2.0),
                 kernel=("monomial", 3)),
    "fig4": dict(command="risk", d=100, alphas=(0.0, 0.3, 0.6, 0.9),
                 kernel=("hermite", (1.0, 1.0, 1.0, 1.0)), ridge=0.01,
                 seeds=10, n_grid=(25, 50, 100, 200, 400, 800, 1600, 3200)),
}


def _parse_float_list(s: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in s.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad float list {s!r}: {exc}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anisokrr")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--preset", choices=sorted(PRESETS))
        sp.add_argument("--d", type=int)
        sp.add_argument("--alpha", type=float, action="append")
        kern = sp.add_mutually_exclusive_group()
        kern.add_argument("--monomial", type=int, metavar="D")
        kern.add_argument("--poly", type=_parse_float_list, metavar="h0,h1,...")
        kern.add_argument("--hermite", type=_parse_float_list, metavar="x0,x1,...")
        kern.add_argument("--exp-trunc", type=int, metavar="D")
        sp.add_argument("--seed", type=int, default=0, help="master seed")
        sp.add_argument("--out", required=True)

    sp = sub.add_parser("spectrum", help="theoretical spectrum CSV")
    add_common(sp)

    sp = sub.add_parser("risk", help="Monte-Carlo risk curve CSV")
    add_common(sp)
    sp.add_argument("--n", type=int, action="append")
    sp.add_argument("--lambda", dest="ridge", type=float)
    sp.add_argument("--seeds", type=int, help="number of independent seeds")
    sp.add_argument("--target", default="first",
                    help="first | last | custom:j:p:c[,j:p:c...]")
    sp.add_argument("--noise-sigma", type=float, default=0.0)
    sp.add_argument("--theory-mode", choices=("default", "literal"),
                    default="default")
    sp.add_argument("--budget", type=float, default=DEFAULT_BUDGET_SECONDS,
                    help="refuse runs estimated to exceed this many seconds")

    sp = sub.add_parser("validate", help="consistency suites (JSON report)")
    sp.add_argument("suite", choices=("oracle", "counting", "hermite",
                                      "krr-equivalence", "partition"))
    sp.add_argument("--out", help="also write the JSON report to this path")
    return p


# --------------------------------------------------------------------------
# config resolution

class ConfigError(ValueError):
    pass


def _resolve_kernel(args, preset) -> KernelSpec:
    if args.monomial is not None:
        return KernelSpec.monomial(args.monomial)
    if args.poly is not None:
        return KernelSpec.polynomial(args.poly)
    if args.hermite is not None:
        return KernelSpec.hermite(args.hermite)
    if args.exp_trunc is not None:
        return KernelSpec.exp_truncated(args.exp_trunc)
    if preset:
        kind, arg = preset["kernel"]
        return {"monomial": KernelSpec.monomial,
                "poly": KernelSpec.polynomial,
                "hermite": KernelSpec.hermite,
                "exp-trunc": KernelSpec.exp_truncated}[kind](arg)
    raise ConfigError("no kernel given: use --monomial/--poly/--hermite/--exp-trunc "
                      "or a preset")


def _kernel_config_string(spec: KernelSpec) -> str:
    return f"{spec.kind}:" + ",".join(f"{c:.17g}" for c in spec.coeffs)


def _resolve_common(args):
    preset = PRESETS[args.preset] if args.preset else None
    if preset and preset["command"] != args.command:
        raise ConfigError(
            f"preset {args.preset!r} belongs to the {preset['command']} command")
    d = args.d if args.d is not None else (preset["d"] if preset else None)
    if d is None:
        raise ConfigError("missing --d (and no preset)")
    alphas = tuple(args.alpha) if args.alpha else \
        (preset["alphas"] if preset else None)
    if alphas is None:
        raise ConfigError("missing --alpha (and no preset)")
    spec = _resolve_kernel(args, preset)
    return preset, d, alphas, spec


def parse_target_spec(text: str, d: int) -> krr.TargetFunction:
    cov = build_cov(d, 0.0)  # kind resolution only needs d
    if text in ("first", "first_coord"):
        return krr.make_target("first_coord", cov)
    if text in ("last", "last_coord"):
        return krr.make_target("last_coord", cov)
    if text.startswith("custom:"):
        terms = []
        body = text[len("custom:"):]
        if body:
            for chunk in body.split(","):
                parts = chunk.split(":")
                if len(parts) != 3:
                    raise ConfigError(
                        f"bad target term {chunk!r}; expected j:p:c")
                terms.append((int(parts[0]), int(parts[1]), float(parts[2])))
        return krr.make_target("custom", cov, terms=tuple(terms))
    raise ConfigError(f"unknown target {text!r}")


# --------------------------------------------------------------------------
# spectrum

def cmd_spectrum(args) -> int:
    _, d, alphas, spec = _resolve_common(args)
    config = {
        "d": d,
        "alpha": ",".join(f"{a:.17g}" for a in alphas),
        "kernel": _kernel_config_string(spec),
        "preset": args.preset or "",
        "family": "spectrum",
    }

    def rows():
        for a in alphas:
            cov = build_cov(d, a)
            spectrum = full_spectrum(spec, cov)
            orders = predicted_orders(spec, cov)
            for rank, (entry, order) in enumerate(zip(spectrum, orders), start=1):
                yield (a, rank, str(entry.beta), entry.degree, entry.lam,
                       order.prediction, order.sector)

    csvio.write_csv(args.out, __version__, config, args.seed,
                    SPECTRUM_COLUMNS, rows())
    return 0


# --------------------------------------------------------------------------
# risk

def estimate_risk_seconds(d: int, n_grid, n_alphas: int, n_seeds: int,
                          max_degree: int) -> float:
    """Crude flop-count estimate of a risk run; gates the budget check."""
    n_partition_products = sum(
        len(list(krr._partitions(m))) for m in range(1, max_degree + 1))
    flops = 0.0
    for n in n_grid:
        per_seed = (n**3 / 3.0
                    + 2.0 * d * n_partition_products * (n**2 + n * N_TEST))
        flops += per_seed * n_seeds
    flops *= n_alphas
    return 2.0 * flops / _FLOP_RATE


def run_risk_experiment(d, alphas, spec, n_grid, ridge, n_seeds, target_text,
                        noise_sigma, theory_mode, master_seed):
    """Shared driver for the risk command; yields one output row per
    (alpha, n). Seeds: run r of the flat (alpha, n, seed) enumeration uses
    train stream (master, r, 0) and test stream (master, r, 1)."""
    if spec.kind != "hermite":
        raise ConfigError("risk experiments require a --hermite kernel")
    target = parse_target_spec(target_text, d)
    rows = []
    run_index = 0
    for a in alphas:
        cov = build_cov(d, a)
        for n in n_grid:
            per_seed = []
            for s in range(n_seeds):
                train = krr.train_dataset(
                    n, cov, target, seed=(master_seed, run_index, 0),
                    noise_sigma=noise_sigma)
                model = krr.fit(train, spec, cov, ridge)
                mean, _ = krr.excess_risk_mc(
                    model, target, cov, N_TEST, seed=(master_seed, run_index, 1))
                per_seed.append(mean)
                run_index += 1
            mean_risk = float(np.mean(per_seed))
            std_err = (float(np.std(per_seed, ddof=1) / math.sqrt(n_seeds))
                       if n_seeds > 1 else 0.0)
            kappa = theory.kappa_from_n(n, d)
            part = theory.partition(cov, spec, n, kappa, DELTA0)
            pred = theory.effective_risk(part, target, n, ridge, spec, cov,
                                         mode=theory_mode)
            norm_sq = target.l2_norm_sq()
            rel = mean_risk / norm_sq if norm_sq > 0 else 0.0
            rows.append((a, n, n_seeds, target.name, mean_risk, std_err,
                         pred.risk, theory_mode, rel))
    return rows


def cmd_risk(args) -> int:
    preset, d, alphas, spec = _resolve_common(args)
    n_grid = tuple(args.n) if args.n else \
        (preset["n_grid"] if preset else None)
    if n_grid is None:
        raise ConfigError("missing --n (and no preset)")
    ridge = args.ridge if args.ridge is not None else \
        (preset["ridge"] if preset else None)
    if ridge is None:
        raise ConfigError("missing --lambda (and no preset)")
    n_seeds = args.seeds if args.seeds is not None else \
        (preset["seeds"] if preset else 1)

    est = estimate_risk_seconds(d, n_grid, len(alphas), n_seeds,
                                spec.max_degree)
    if est > args.budget:
        print(f"error: estimated {est:.0f} s exceeds budget {args.budget:.0f} s; "
              f"raise --budget to proceed", file=sys.stderr)
        return 2

    rows = run_risk_experiment(d, alphas, spec, n_grid, ridge, n_seeds,
                               args.target, args.noise_sigma,
                               args.theory_mode, args.seed)
    config = {
        "d": d,
        "alpha": ",".join(f"{a:.17g}" for a in alphas),
        "kernel": _kernel_config_string(spec),
        "n": ",".join(str(n) for n in n_grid),
        "lambda": f"{ridge:.17g}",
        "seeds": n_seeds,
        "target": args.target,
        "noise_sigma": f"{args.noise_sigma:.17g}",
        "theory_mode": args.theory_mode,
        "n_test": N_TEST,
        "delta0": f"{DELTA0:.17g}",
        "preset": args.preset or "",
        "family": "risk",
    }
    csvio.write_csv(args.out, __version__, config, args.seed,
                    RISK_COLUMNS, rows)
    return 0


# --------------------------------------------------------------------------
# validation suites

def _suite_oracle() -> list[dict]:
    checks = []
    for d in (2, 3):
        for D in (2, 3):
            for a in (0.0, 0.5, 1.5):
                cov = build_cov(d, a)
                h = [1.0] * (D + 1)
                rep = basis.verify_factorization(d, D, h, cov)
                checks.append({
                    "name": f"factorization d={d} D={D} alpha={a}",
                    "passed": bool(rep.bound_lower_ok and rep.bound_upper_ok
                                   and rep.mc_feature_deviation < 1e-8
                                   and rep.reconstruction_deviation < 1e-10),
                    "mc_feature_deviation": rep.mc_feature_deviation,
                    "reconstruction_deviation": rep.reconstruction_deviation,
                    "eig_vs_formula_rel_deviation": rep.eig_vs_formula_rel_deviation,
                    "formula_exact": bool(
                        rep.eig_vs_formula_rel_deviation < 1e-6),
                })
    return checks


def _suite_counting() -> list[dict]:
    checks = []
    for d in range(1, 7):
        for D in range(1, 5):
            for L in (1, 2, 3.5, 10, 50, 200):
                q = CountQuery(tuple_length=D, threshold=L, max_value=d)
                a, b = count_recursive(q), count_bruteforce(q)
                checks.append({"name": f"count d={d} D={D} L={L}",
                               "passed": a == b,
                               "recursive": a, "bruteforce": b})
    return checks


def _suite_hermite() -> list[dict]:
    checks = []
    ev = hermite.HermiteEvaluator(max_degree=20)
    nodes, weights = hermite.gauss_hermite_probabilists(64)
    table = ev.he_table(10, nodes)  # (nodes, degree+1)
    gram = table.T @ (table * weights[:, None])
    dev = float(np.max(np.abs(gram - np.eye(11))))
    checks.append({"name": "orthonormality p,q<=10", "passed": dev <= 1e-8,
                   "max_deviation": dev})
    u = np.linspace(-3.0, 3.0, 61)
    worst = 0.0
    for p in range(9):
        expansion = ev.square_expansion(p)
        recon = sum(c * ev.he(q, u) for q, c in expansion)
        worst = max(worst, float(np.max(np.abs(ev.he(p, u) ** 2 - recon))))
    checks.append({"name": "square expansion p<=8", "passed": worst <= 1e-9,
                   "max_deviation": worst})
    return checks


def _suite_krr_equivalence() -> list[dict]:
    checks = []
    # linear-kernel ridge == primal ridge on X
    cov = build_cov(10, 0.5)
    spec = KernelSpec.hermite((0.0, 1.0))
    target = krr.make_target("first_coord", cov)
    train = krr.train_dataset(50, cov, target, seed=11)
    model = krr.fit(train, spec, cov, ridge=0.1)
    test = krr.sample(40, cov, seed=12)
    pred_kernel = krr.predict(model, test.Z)
    X, y = train.X, train.y
    w = np.linalg.solve(X.T @ X + 0.1 * np.eye(10), X.T @ y)
    pred_primal = test.X @ w
    dev = float(np.max(np.abs(pred_kernel - pred_primal)))
    checks.append({"name": "linear kernel == primal ridge",
                   "passed": dev <= 1e-8, "max_deviation": dev})
    # fast pairwise path == direct multi-index summation
    rng = np.random.default_rng(3)
    for d, L in ((3, 3), (5, 2), (10, 3)):
        cov = build_cov(d, 0.7)
        spec = KernelSpec.hermite(tuple(1.0 for _ in range(L + 1)))
        worst = 0.0
        for _ in range(100):
            x = rng.standard_normal(d) * np.sqrt(cov.sigma)
            xp = rng.standard_normal(d) * np.sqrt(cov.sigma)
            fast = krr.kernel_eval(x, xp, spec, cov)
            direct = krr.kernel_eval_direct(x, xp, spec, cov)
            worst = max(worst, abs(fast - direct))
        checks.append({"name": f"fast == direct d={d} L={L}",
                       "passed": worst <= 1e-10, "max_deviation": worst})
    # matrix path == pairwise path
    cov = build_cov(6, 0.3)
    spec = KernelSpec.hermite((1.0, 0.5, 0.25, 0.125))
    Z = np.random.default_rng(4).standard_normal((20, 6))
    K = krr.kernel_matrix(Z, Z, spec, cov)
    worst = 0.0
    for i in range(20):
        for j in range(20):
            x = Z[i] * np.sqrt(cov.sigma)
            xp = Z[j] * np.sqrt(cov.sigma)
            worst = max(worst, abs(K[i, j] - krr.kernel_eval(x, xp, spec, cov)))
    checks.append({"name": "matrix == pairwise", "passed": worst <= 1e-10,
                   "max_deviation": worst})
    return checks


def _suite_partition() -> list[dict]:
    checks = []
    cov = build_cov(100, 0.0)
    rep = smoothcount.low_set_cardinality(cov, kappa=1.5, delta0=0.1)
    checks.append({"name": "isotropic kappa=1.5 low count",
                   "passed": rep.count == 101, "count": rep.count})
    rep = smoothcount.low_set_cardinality(cov, kappa=0.5, delta0=0.1)
    checks.append({"name": "isotropic kappa=0.5 low count",
                   "passed": rep.count == 1, "count": rep.count})
    spec = KernelSpec.hermite((1.0, 1.0, 1.0, 1.0))
    for a in (0.3, 0.5):
        cov = build_cov(100, a)
        prev = -1
        mono = True
        for kappa in (0.7, 1.2, 1.7, 2.3):
            part = theory.partition(cov, spec, 100.0**kappa, kappa, 0.05)
            if len(part.low) < prev:
                mono = False
            prev = len(part.low)
        checks.append({"name": f"low set monotone in kappa alpha={a}",
                       "passed": mono})
    return checks


SUITES = {
    "oracle": _suite_oracle,
    "counting": _suite_counting,
    "hermite": _suite_hermite,
    "krr-equivalence": _suite_krr_equivalence,
    "partition": _suite_partition,
}


def cmd_validate(args) -> int:
    checks = SUITES[args.suite]()
    ok = all(c["passed"] for c in checks)
    report = {"suite": args.suite, "passed": ok, "checks": checks}
    text = json.dumps(report, indent=2, default=float)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    return 0 if ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "spectrum":
            return cmd_spectrum(args)
        if args.command == "risk":
            return cmd_risk(args)
        return cmd_validate(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
