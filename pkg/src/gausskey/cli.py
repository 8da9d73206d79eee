"""Batch command-line front end.

Four subcommands: ``analyze`` (per-state security report as JSON),
``frontier`` (security-boundary curves as CSV), ``simulate`` (seeded
Monte-Carlo of the measurement + distillation protocol, JSON), and
``oracle-check`` (grid-oracle agreement suite).

Values may come from flags, from a ``key=value`` config file (``--config``),
or from defaults, in that precedence order.  Exit codes: 0 success, 1 usage
or parse error, 2 domain error (unphysical parameters), 3 internal numerical
failure.
"""

import argparse
import json
import sys

import numpy as np

from . import matkit, oracle, protocol, security
from .errors import GaussKeyError, InvalidInput
from .gaussian import (
    GaussianState,
    SymmetricStateParams,
    condition_on_x,
    physical_symmetric,
    pure_overlap,
    purify,
    symmetric_embed,
)

_EXIT_USAGE = 1
_EXIT_DOMAIN = 2
_EXIT_NUMERICAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; this project reserves 2 for
    # domain errors, so route usage problems through exit code 1 instead
    def error(self, message):
        raise _UsageError(message)


def _fmt(x):
    """Floats rounded to 12 significant digits for stable golden outputs."""
    if isinstance(x, float):
        return float(f"{x:.12g}")
    return x


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj, out_path):
    _emit(json.dumps(obj, indent=2) + "\n", out_path)


_CONFIG_ALIASES = {"lambda": "lam"}


def _read_config(path):
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise _UsageError(f"{path}:{lineno}: expected key=value")
            key, val = line.split("=", 1)
            key = key.strip().replace("-", "_")
            values[_CONFIG_ALIASES.get(key, key)] = val.strip()
    return values


def _merge_config(args, parser_defaults):
    """CLI flags beat config-file entries beat defaults."""
    if not getattr(args, "config", None):
        return args
    cfg = _read_config(args.config)
    for key, raw in cfg.items():
        if key not in parser_defaults:
            raise _UsageError(f"unknown config key {key!r}")
        if getattr(args, key) is None:
            caster = parser_defaults[key]
            setattr(args, key, caster(raw))
    return args


def _require(args, names):
    for name in names:
        if getattr(args, name) is None:
            raise _UsageError(f"missing required value --{name.replace('_', '-')}")


def _params(args):
    return SymmetricStateParams(args.lam, args.cx, args.cp)


def _add_param_flags(sp):
    sp.add_argument("--lambda", dest="lam", type=float, default=None,
                    help="local quadrature variance of both modes")
    sp.add_argument("--cx", type=float, default=None, help="X-X correlation")
    sp.add_argument("--cp", type=float, default=None, help="P-P anticorrelation magnitude")


def _add_common(sp):
    sp.add_argument("--seed", type=int, default=None, help="RNG seed (default 12345)")
    sp.add_argument("--out", default=None, help="write output to this file instead of stdout")
    sp.add_argument("--format", choices=("json", "csv"), default=None)
    sp.add_argument("--config", default=None, help="key=value config file")


def build_parser():
    parser = _Parser(prog="gausskey",
                     description="Secret-key distillation analysis for symmetric "
                                 "two-mode Gaussian states")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("analyze", help="security report for one parameter point")
    _add_param_flags(sp)
    sp.add_argument("--x0-max", dest="x0_max", type=float, default=None,
                    help="upper end of the threshold search range (default 5)")
    sp.add_argument("--attack", action="append", default=None,
                    choices=security.ATTACK_KINDS,
                    help="attack models of interest (report always carries all)")
    sp.add_argument("--ne", type=int, default=None,
                    help="coherently measured symbols for finite-coherent (default 1)")
    _add_common(sp)

    sp = sub.add_parser("frontier", help="security frontier over the cx=cp=c slice")
    sp.add_argument("--c-min", dest="c_min", type=float, default=None)
    sp.add_argument("--c-max", dest="c_max", type=float, default=None)
    sp.add_argument("--steps", type=int, default=None, help="grid points (default 30)")
    sp.add_argument("--attack", default=None, choices=security.ATTACK_KINDS)
    sp.add_argument("--ne", type=int, default=None)
    _add_common(sp)

    sp = sub.add_parser("simulate", help="Monte-Carlo of sifting + advantage distillation")
    _add_param_flags(sp)
    sp.add_argument("--x0", type=float, default=None, help="postselection threshold")
    sp.add_argument("--window", type=float, default=None,
                    help="acceptance half-width around x0 (default 0.01)")
    sp.add_argument("--pairs", type=int, default=None, help="measured pairs (default 10^6)")
    sp.add_argument("--block-n", dest="block_n", type=int, default=None,
                    help="advantage-distillation block size (default 2)")
    sp.add_argument("--workers", type=int, default=None,
                    help="worker threads; output does not depend on this")
    _add_common(sp)

    sp = sub.add_parser("oracle-check", help="grid-oracle agreement suite")
    sp.add_argument("--level", choices=("quick", "full"), default=None,
                    help="quick skips the 4-mode grid (default quick)")
    _add_common(sp)
    return parser


def cmd_analyze(args):
    _require(args, ("lam", "cx", "cp"))
    x0_max = args.x0_max if args.x0_max is not None else 5.0
    n_e = args.ne if args.ne is not None else 1
    try:
        params = _params(args)
    except InvalidInput as exc:
        print(f"unphysical parameters: {exc}", file=sys.stderr)
        return _EXIT_DOMAIN
    if not physical_symmetric(params):
        print("unphysical parameters", file=sys.stderr)
        return _EXIT_DOMAIN
    report = security.build_report(params, x0_max=x0_max, n_e=n_e)
    _dump_json(
        {
            "lambda": _fmt(params.lam),
            "c_x": _fmt(params.cx),
            "c_p": _fmt(params.cp),
            "physical": report.physical,
            "nppt": report.nppt,
            "eps_ab_at_best_x0": _fmt(report.eps_ab),
            "eve_overlap": _fmt(report.eve_overlap),
            "individual_secure": report.individual_secure,
            "coherent_ad_secure": report.coherent_ad_secure,
            "rate_lb": _fmt(report.rate_lb),
            "best_x0": _fmt(report.best_x0),
        },
        args.out,
    )
    return 0


def cmd_frontier(args):
    c_min = args.c_min if args.c_min is not None else 0.1
    c_max = args.c_max if args.c_max is not None else 3.0
    steps = args.steps if args.steps is not None else 30
    kind = args.attack if args.attack is not None else security.INDIVIDUAL
    if steps < 2:
        raise _UsageError("--steps must be at least 2")
    if not c_min < c_max:
        raise _UsageError("--c-min must be below --c-max")
    if c_min <= 0:
        print("correlations must be positive", file=sys.stderr)
        return _EXIT_DOMAIN
    attack = security.AttackModel(kind, args.ne if kind == security.FINITE_COHERENT else None)
    grid = np.linspace(c_min, c_max, steps)
    points = security.security_frontier(grid, attack)
    if (args.format or "csv") == "json":
        _dump_json(
            [
                {
                    "c": _fmt(c),
                    "lambda_star": _fmt(lam),
                    "lambda_solid": _fmt(float(np.sqrt(1 + c * c))),
                    "lambda_dashed": _fmt(c + 1.0),
                }
                for c, lam in points
            ],
            args.out,
        )
        return 0
    lines = ["c,lambda_star,lambda_solid,lambda_dashed"]
    for c, lam in points:
        solid = float(np.sqrt(1.0 + c * c))
        lines.append(f"{c:.12g},{lam:.12g},{solid:.12g},{c + 1.0:.12g}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_simulate(args):
    _require(args, ("lam", "cx", "cp", "x0"))
    window = args.window if args.window is not None else 0.01
    pairs = args.pairs if args.pairs is not None else 1_000_000
    block_n = args.block_n if args.block_n is not None else 2
    seed = args.seed if args.seed is not None else 12345
    workers = args.workers if args.workers is not None else 1
    try:
        params = _params(args)
    except InvalidInput as exc:
        print(f"unphysical parameters: {exc}", file=sys.stderr)
        return _EXIT_DOMAIN
    if not physical_symmetric(params):
        print("unphysical parameters", file=sys.stderr)
        return _EXIT_DOMAIN
    cfg = protocol.ProtocolConfig(x0=args.x0, window=window, n_pairs=pairs,
                                  block_n=block_n, seed=seed)
    base = matkit.Rng(seed)
    bits = protocol.simulate_sifting(params, cfg, base.substream(0), workers=workers)
    accepted = len(bits.alice)
    eps_th = protocol.error_probability(params, cfg.x0)
    if accepted == 0:
        print("no pairs accepted; enlarge --pairs or --window", file=sys.stderr)
        return _EXIT_NUMERICAL
    eps_emp = float(np.mean(bits.alice != bits.bob))
    outcome = protocol.simulate_advantage_distillation(bits, block_n, base.substream(1))
    kept = len(outcome.kept_bits_alice)
    eps_n_th = protocol.ad_error(eps_th, block_n)
    _dump_json(
        {
            "accepted": accepted,
            "acceptance_rate": _fmt(bits.acceptance_rate),
            "eps_empirical": _fmt(eps_emp),
            "eps_theory": _fmt(eps_th),
            "blocks": outcome.blocks_consumed,
            "blocks_kept": kept,
            "eps_n_empirical": _fmt(outcome.empirical_error),
            "eps_n_theory": _fmt(eps_n_th),
            "stderr_estimates": {
                "eps": _fmt(float(np.sqrt(eps_th * (1 - eps_th) / accepted))),
                "eps_n": _fmt(float(np.sqrt(eps_n_th * (1 - eps_n_th) / kept)) if kept else 0.0),
            },
        },
        args.out,
    )
    return 0


def _oracle_checks(level):
    """Yield (name, observed, expected, tol) agreement checks."""
    ax = oracle.GridAxis(-8.0, 8.0, 201)
    vac = oracle.wavefunction_from_pure(np.eye(2), np.zeros(2), ax)
    ref = np.pi**-0.25 * np.exp(-(ax.nodes**2) / 2.0)
    yield ("vacuum wavefunction", float(np.abs(vac.amplitudes - ref).max()), 0.0, 1e-12)

    disp = oracle.wavefunction_from_pure(np.eye(2), np.array([2.0, 0.0]), ax)
    ov = oracle.grid_overlap(vac, disp)
    yield ("displaced overlap magnitude", abs(ov) ** 2, float(np.exp(-2.0)), 1e-5)

    # complex-valued check pins the overlap phase convention
    d1, d2 = np.array([2.0, 0.0]), np.array([0.0, 2.0])
    wa = oracle.wavefunction_from_pure(np.eye(2), d1, ax)
    wb = oracle.wavefunction_from_pure(np.eye(2), d2, ax)
    got = oracle.grid_overlap(wa, wb)
    want = pure_overlap(np.eye(2), d1, d2)
    yield ("overlap phase convention", abs(got - want), 0.0, 1e-6)

    sq = oracle.wavefunction_from_pure(np.diag([2.0, 0.5]), np.zeros(2), ax)
    cm_est, _ = oracle.grid_moments(sq)
    yield ("squeezed X variance", cm_est[0, 0] / 2.0, 1.0, 1e-4)

    pur = purify(GaussianState(np.diag([2.0, 2.0]), np.zeros(2)))
    psi2 = oracle.wavefunction_from_pure(pur.cm, pur.dv, ax)
    cond_grid = oracle.grid_condition_on_x(psi2, [0], [0.8])
    cmc, _ = oracle.grid_moments(cond_grid)
    cond = condition_on_x(pur, (0,), np.array([0.8]))
    yield ("thermal-purification conditioning", float(np.abs(cmc - cond.state.cm).max()), 0.0, 1e-3)

    coarse = oracle.GridAxis(-8.0, 8.0, 101)
    ov_coarse = oracle.grid_overlap(
        oracle.wavefunction_from_pure(np.eye(2), np.zeros(2), coarse),
        oracle.wavefunction_from_pure(np.eye(2), np.array([2.0, 0.0]), coarse),
    )
    yield ("grid refinement stability", abs(abs(ov_coarse) ** 2 - abs(ov) ** 2), 0.0, 4e-5)

    if level != "full":
        return

    params = SymmetricStateParams(1.5, 1.0, 1.0)
    pur4 = purify(symmetric_embed(params))
    big = oracle.GridAxis(-20.0 / 3.0, 20.0 / 3.0, 41)  # spacing 1/3 keeps x0=1 on-grid
    psi4 = oracle.wavefunction_from_pure(pur4.cm, pur4.dv, big)
    e_pp = oracle.grid_condition_on_x(psi4, [0, 1], [1.0, 1.0])
    e_mm = oracle.grid_condition_on_x(psi4, [0, 1], [-1.0, -1.0])
    got4 = abs(oracle.grid_overlap(e_pp, e_mm)) ** 2
    want4 = abs(security.eve_ensemble(params, 1.0).gram[0, 1]) ** 2
    yield ("4-mode adversary overlap", got4, want4, 1e-3)

    cm_grid, dv_grid = oracle.grid_moments(e_pp)
    cond4 = condition_on_x(pur4, (0, 1), np.array([1.0, 1.0]))
    yield ("4-mode conditional CM", float(np.abs(cm_grid - cond4.state.cm).max()), 0.0, 2e-3)
    yield ("4-mode conditional DV", float(np.abs(dv_grid - cond4.state.dv).max()), 0.0, 2e-3)

    spec = oracle.grid_reduced_spectrum(psi4, 1.0)
    eff = security.effective_state(params, 1.0)
    w, _ = matkit.eigh(eff.rho)
    yield ("reduced-state spectrum", float(np.abs(np.sort(spec) - np.sort(w.real)).max()), 0.0, 1e-3)
    s_grid = matkit.entropy_bits(np.clip(np.asarray(spec, float), 0.0, None))
    s_exact = matkit.entropy_bits(np.clip(w.real, 0.0, None))
    yield ("reduced-state entropy", abs(s_grid - s_exact), 0.0, 5e-3)


def cmd_oracle_check(args):
    level = args.level if args.level is not None else "quick"
    failures = 0
    lines = []
    for name, observed, expected, tol in _oracle_checks(level):
        ok = abs(observed - expected) <= tol
        failures += 0 if ok else 1
        status = "ok" if ok else "FAIL"
        lines.append(
            f"{status:4s} {name}: observed={observed:.6g} expected={expected:.6g} tol={tol:g}"
        )
    summary = "PASS" if failures == 0 else f"FAIL ({failures} checks)"
    _emit("\n".join(lines) + f"\n{summary}\n", args.out)
    return 0 if failures == 0 else _EXIT_NUMERICAL


_CONFIG_CASTERS = {
    "lam": float, "cx": float, "cp": float, "x0": float, "x0_max": float,
    "window": float, "pairs": int, "block_n": int, "seed": int, "steps": int,
    "c_min": float, "c_max": float, "ne": int, "workers": int, "attack": str,
    "level": str, "format": str, "out": str,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        known = {k: v for k, v in _CONFIG_CASTERS.items() if hasattr(args, k)}
        args = _merge_config(args, known)
        handler = {
            "analyze": cmd_analyze,
            "frontier": cmd_frontier,
            "simulate": cmd_simulate,
            "oracle-check": cmd_oracle_check,
        }[args.command]
        return handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except InvalidInput as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return _EXIT_DOMAIN
    except GaussKeyError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return _EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
