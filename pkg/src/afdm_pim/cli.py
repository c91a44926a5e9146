"""Command-line entry point: simulate, optimize, analyze, validate."""

from __future__ import annotations

import argparse
import os
import sys

from .analysis import (
    abep_curve_jakes,
    check_full_diversity_conditions,
    diversity_order,
    spectral_efficiency,
)
from .channel import enumerate_placements
from .config import RandomSource, read_config_file
from .mapping import save_alphabet
from .optimizer import (
    PsoParams,
    build_objective_context,
    pso_optimize,
    write_convergence_csv,
)
from .simulate import (
    PRESETS,
    BerPoint,
    make_preset,
    noise_variance_from_snr_db,
    run_scenario,
    scenario_from_sections,
    write_csv,
)
from .suites import run_suites


def _resolve_seed(flag_seed: int | None, config_seed: int | None) -> int | None:
    if flag_seed is not None:
        return flag_seed
    env = os.environ.get("SIM_SEED")
    if env is not None:
        return int(env)
    return config_seed


def _load_scenario(config_arg: str, seed_flag: int | None):
    if config_arg in PRESETS:
        return make_preset(config_arg, seed=_resolve_seed(seed_flag, None))
    sections = read_config_file(config_arg)
    scenario = scenario_from_sections(sections, name=os.path.basename(config_arg))
    seed = _resolve_seed(seed_flag, scenario.seed)
    if seed is not None and seed != scenario.seed:
        from dataclasses import replace

        scenario = replace(scenario, seed=seed)
    return scenario


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _cmd_simulate(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.config, args.seed)
    points = run_scenario(scenario)
    out, close = _open_out(args.out)
    try:
        write_csv(points, scenario.name, scenario.seed, out)
    finally:
        if close:
            out.close()
    return 0


def _parse_pso_overrides(spec: str | None, base: PsoParams) -> PsoParams:
    if not spec:
        return base
    mapping = {
        "particles": ("n_particles", int),
        "iterations": ("max_iterations", int),
        "inertia": ("inertia", float),
        "global_coeff": ("global_coeff", float),
        "local_coeff": ("local_coeff", float),
        "v_max": ("velocity_max", float),
    }
    kwargs = {}
    for token in spec.split(","):
        key, _, raw = token.partition("=")
        key = key.strip()
        if key not in mapping:
            raise ValueError(f"unknown pso parameter {key!r}; choices: {sorted(mapping)}")
        field, cast = mapping[key]
        kwargs[field] = cast(raw)
    from dataclasses import replace

    return replace(base, **kwargs)


def _pso_params_from_sections(sections) -> PsoParams:
    items = sections.get("pso", {})
    spec = ",".join(f"{k}={v}" for k, v in items.items()) if items else None
    return _parse_pso_overrides(spec, PsoParams())


def _cmd_optimize(args: argparse.Namespace) -> int:
    sections = read_config_file(args.config)
    scenario = scenario_from_sections(sections, name=os.path.basename(args.config))
    params = _parse_pso_overrides(args.pso_params, _pso_params_from_sections(sections))
    seed = _resolve_seed(args.seed, scenario.seed) or 1
    ctx = build_objective_context(scenario.cfg, scenario.p_paths)
    result = pso_optimize(scenario.cfg, ctx, params, RandomSource(seed).generator())
    if args.out:
        save_alphabet(result.alphabet, args.out)
        log_path = args.log or args.out + ".convergence.csv"
        with open(log_path, "w", encoding="utf-8") as fh:
            write_convergence_csv(result.history, fh)
        print(f"alphabet -> {args.out}  (fitness {result.fitness:.12g})")
        print(f"convergence -> {log_path}")
    else:
        for v in result.alphabet.values:
            print(f"{v:.12g}")
        if args.log:
            with open(args.log, "w", encoding="utf-8") as fh:
                write_convergence_csv(result.history, fh)
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.config, args.seed)
    cfg = scenario.cfg
    if args.se:
        n_c, m = cfg.group_size, cfg.constellation_order
        a = max(1, n_c - 1)
        print(f"afdm      (M={m}): {spectral_efficiency('afdm', m):.6g} bit/s/Hz")
        print(
            f"afdm_im   (n_c={n_c}, a={a}, M={m}): "
            f"{spectral_efficiency('afdm_im', m, n_c=n_c, a=a):.6g} bit/s/Hz"
        )
        print(
            f"afdm_pim  (n_c={n_c}, M={m}): "
            f"{spectral_efficiency('afdm_pim', m, n_c=n_c):.6g} bit/s/Hz"
        )
        return 0
    if args.diversity:
        report = check_full_diversity_conditions(cfg, scenario.alphabet, scenario.p_paths)
        distinct = scenario.p_paths <= cfg.placement_capacity
        geometries = enumerate_placements(cfg, scenario.p_paths, distinct=distinct)
        mu = diversity_order(cfg, scenario.alphabet, geometries)
        print(f"paths P = {report.p_paths}")
        print(f"placement capacity (d_max+1)(2*a_max+1) = {report.placement_capacity}")
        print(f"P <= capacity: {report.paths_within_capacity}")
        print(f"capacity <= N: {report.capacity_within_frame}")
        print(f"condition 1 satisfied: {report.condition1}")
        print(f"condition 2: {report.condition2_note}")
        print(f"diversity order mu = {mu} (full would be {scenario.p_paths})")
        return 0
    # default: the union-bound curve matched to the sampled channel law
    n0s = [noise_variance_from_snr_db(s) for s in scenario.snr_grid_db]
    bounds = abep_curve_jakes(cfg, scenario.alphabet, scenario.p_paths, n0s)
    points = [
        BerPoint(snr_db=s, bits=0, errors=0, ber=float(b), kind="theory")
        for s, b in zip(scenario.snr_grid_db, bounds)
    ]
    out, close = _open_out(args.out)
    try:
        write_csv(points, scenario.name, scenario.seed, out)
    finally:
        if close:
            out.close()
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    results = run_suites(args.suite)
    passed = sum(1 for r in results if r.passed)
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        print(f"[{tag}] {r.name}: {r.detail}")
    print(f"{passed}/{len(results)} checks passed")
    return 0 if passed == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afdm-pim",
        description=(
            "Pre-chirp index modulation on chirp subcarriers: BER simulation, "
            "error bounds, and alphabet design"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a BER sweep and emit CSV")
    p_sim.add_argument("config", help=f"config file path or preset name {sorted(PRESETS)}")
    p_sim.add_argument("--seed", type=int, default=None, help="override the seed (env SIM_SEED)")
    p_sim.add_argument("--out", default=None, help="CSV path (default stdout)")
    p_sim.set_defaults(func=_cmd_simulate)

    p_opt = sub.add_parser("optimize", help="design a pre-chirp alphabet with PSO")
    p_opt.add_argument("config", help="config file path")
    p_opt.add_argument("--pso-params", default=None, help="overrides, e.g. particles=50,iterations=100")
    p_opt.add_argument("--seed", type=int, default=None)
    p_opt.add_argument("--out", default=None, help="alphabet file path (default stdout)")
    p_opt.add_argument("--log", default=None, help="convergence CSV path")
    p_opt.set_defaults(func=_cmd_optimize)

    p_ana = sub.add_parser("analyze", help="theory bound, diversity order, or SE")
    p_ana.add_argument("config", help="config file path or preset name")
    group = p_ana.add_mutually_exclusive_group()
    group.add_argument("--bound", action="store_true", help="union-bound BER curve (default)")
    group.add_argument("--diversity", action="store_true", help="exhaustive diversity-order scan")
    group.add_argument("--se", action="store_true", help="spectral efficiency formulas")
    p_ana.add_argument("--seed", type=int, default=None)
    p_ana.add_argument("--out", default=None, help="CSV path for --bound (default stdout)")
    p_ana.set_defaults(func=_cmd_analyze)

    p_val = sub.add_parser("validate", help="run the numeric invariant suites")
    p_val.add_argument(
        "--suite",
        default="all",
        choices=["all", "orthogonality", "channel", "reduction"],
    )
    p_val.set_defaults(func=_cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
