"""Command-line entry point.

Subcommands:
    sweep    run a policy-scenario sweep and write sweep.csv + sweep_meta.json
    analyze  extract frontier, labels, surrogate fits and curves from a sweep
    export   build the self-contained explorer bundle JSON
    serve    host a directory (bundle + explorer assets) over plain HTTP

Exit codes: 0 success, 2 invalid config/input, 3 I/O failure. Outputs are
written atomically and contain no timestamps, so equal seeds give
byte-identical files. PANDA_SIM_THREADS caps worker processes.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .analysis import (
    PosteriorQuery,
    SurrogateForm,
    budget_line,
    fit_surrogate,
    indifference_curve,
    pareto_frontier,
    points_from_sweep,
    posterior_select,
    quartile_labels,
)
from .bundle import (
    BUNDLE_SCHEMA,
    build_bundle,
    bundle_from_sweep,
    fit_bundle_surrogates,
    write_bundle,
)
from .config import ConfigurationError, RunConfig, load_config
from .engine import (
    SweepFormatError,
    read_sweep_csv,
    run_sweep,
    write_sweep,
)
from .policy import PolicyScenario, scenario_grid

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_IO = 3


def _parse_axis(token: str) -> list[float]:
    if ".." in token:
        span, _, step_s = token.partition(":")
        if not step_s:
            raise ConfigurationError(f"range '{token}' needs a ':step' suffix")
        lo_s, _, hi_s = span.partition("..")
        try:
            a, b, step = float(lo_s), float(hi_s), float(step_s)
        except ValueError:
            raise ConfigurationError(f"bad range '{token}'") from None
        lo, hi = min(a, b), max(a, b)
        if step <= 0:
            raise ConfigurationError(f"bad range '{token}'")
        n = int(round((hi - lo) / step)) + 1
        return [round(lo + i * step, 6) for i in range(n)]
    return [round(float(token), 6)]


def parse_scenarios(spec: str) -> list[PolicyScenario]:
    """Parse 'g2g=0..2000:100,f2e=0.65' style lattice overrides."""
    axes: dict[str, list[float]] = {}
    for part in spec.split(","):
        key, sep, value = part.partition("=")
        key = key.strip()
        if not sep or key not in ("g2g", "f2e"):
            raise ConfigurationError(f"bad scenario token '{part}'; use g2g=... or f2e=...")
        axes[key] = _parse_axis(value.strip())
    g2g = sorted(axes.get("g2g", [v for v in _default_g2g()]))
    f2e = sorted(axes.get("f2e", [v for v in _default_f2e()]), reverse=True)
    return [PolicyScenario(g, p) for g in g2g for p in f2e]


def _default_g2g() -> list[float]:
    from .policy import g2g_levels

    return g2g_levels()


def _default_f2e() -> list[float]:
    from .policy import f2e_levels

    return f2e_levels()


def _atomic_json(path: Path, data) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    os.replace(tmp, path)


def _atomic_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config) if args.config else RunConfig()
    config.validate()
    if args.seed is not None:
        config.base_seed = args.seed
    if args.replicates is not None:
        config.n_replicates = args.replicates
    scenarios = parse_scenarios(args.scenarios) if args.scenarios else scenario_grid(config.lattice)
    sweep = run_sweep(config, scenarios, workers=args.workers)
    csv_path, meta_path = write_sweep(sweep, args.out)
    print(f"wrote {csv_path} ({len(scenarios)} scenarios x {config.n_replicates} replicates)")
    print(f"wrote {meta_path}")
    return EXIT_OK


def _scenario_key(p) -> dict:
    return {"g2g_compensation": p.scenario.g2g_compensation,
            "f2e_price": p.scenario.f2e_price}


def cmd_analyze(args: argparse.Namespace) -> int:
    table = read_sweep_csv(args.sweep)
    out = Path(args.out) if args.out else Path(args.sweep).parent
    out.mkdir(parents=True, exist_ok=True)
    ref = table.reference_year()
    points = points_from_sweep(table, ref)
    frontier = pareto_frontier(points)
    labels = quartile_labels(frontier)

    frontier_json = {
        "reference_year": ref,
        "n_points": len(points),
        "frontier": [
            {**_scenario_key(p),
             "carbon_kg": p.objectives.carbon_kg,
             "habitat_index": p.objectives.habitat_index,
             "gross_economic_benefits": p.objectives.gross_economic_benefits,
             "reverted_area_mu": p.reverted_area_mu,
             "electricity_kwh": p.electricity_kwh,
             "financial_burden": p.financial_burden}
            for p in frontier
        ],
    }
    _atomic_json(out / "frontier.json", frontier_json)

    # Label table, worst-to-best economy like the reference presentation.
    order = sorted(range(len(frontier)), key=lambda i: (
        frontier[i].objectives.gross_economic_benefits,
        frontier[i].scenario.g2g_compensation, frontier[i].scenario.f2e_price))
    lines = ["f2e_price,g2g_compensation,economy,carbon,habitat"]
    for i in order:
        p, lab = frontier[i], labels[i]
        lines.append(f"{p.scenario.f2e_price:g},{p.scenario.g2g_compensation:g},"
                     f"{lab['economy']},{lab['carbon']},{lab['habitat']}")
    _atomic_text(out / "labels.csv", "\n".join(lines) + "\n")

    # Surrogates (habitat form selectable to compare nested fits).
    x1 = [p.reverted_area_mu for p in points]
    x2 = [p.electricity_kwh for p in points]
    g2g_y = [table.at(p.scenario, ref, "g2g_expenditure") for p in points]
    f2e_y = [table.at(p.scenario, ref, "f2e_subsidy") for p in points]
    habitat_y = [p.objectives.habitat_index for p in points]
    econ_y = [p.objectives.gross_economic_benefits for p in points]
    habitat_form = (SurrogateForm.ECON_QUADRATIC if args.fit_habitat == "quadratic"
                    else SurrogateForm.HABITAT_CUBIC)
    surrogates = {
        "g2g_budget": fit_surrogate(list(zip(x1, x2, g2g_y)), SurrogateForm.G2G_BUDGET),
        "f2e_budget": fit_surrogate(list(zip(x1, x2, f2e_y)), SurrogateForm.F2E_BUDGET,
                                    x2_linear=args.x2_linear),
        "habitat": fit_surrogate(list(zip(x1, x2, habitat_y)), habitat_form),
        "economy": fit_surrogate(list(zip(x1, x2, econ_y)), SurrogateForm.ECON_QUADRATIC),
    }
    from .bundle import surrogate_to_json

    _atomic_json(out / "surrogates.json", {k: surrogate_to_json(v)
                                           for k, v in surrogates.items()})

    # Curve polylines for plotting.
    x1_max = 1.2 * max(x1) if max(x1) > 0 else 1.0
    x2_lo, x2_hi = min(x2), max(x2)
    grid = np.linspace(x2_lo, x2_hi, 50).tolist()
    budgets = [args.budget] if args.budget else [float(np.median(f2e_y) + np.median(g2g_y)) or 1.0]
    curves = {"budget_lines": [], "indifference": []}
    for b in budgets:
        if b <= 0:
            continue
        pts = budget_line(b, surrogates["g2g_budget"], surrogates["f2e_budget"], grid, x1_max)
        curves["budget_lines"].append({"budget": b, "points": pts})
    for name, ys in (("habitat", habitat_y), ("economy", econ_y)):
        for q in (0.25, 0.5, 0.75):
            level = float(np.quantile(ys, q))
            pts = indifference_curve(surrogates[name], level, grid, x1_max)
            curves["indifference"].append({"model": name, "level": level, "points": pts})
    _atomic_json(out / "curves.json", curves)

    print(f"frontier: {len(frontier)} of {len(points)} scenarios at year {ref}")
    print(f"habitat {surrogates['habitat'].form.value}: "
          f"train R^2 {surrogates['habitat'].train_r2:.4f}, "
          f"test R^2 {surrogates['habitat'].test_r2:.4f}")

    if args.budget or args.min_area or args.weights:
        weights = [float(v) for v in args.weights.split(",")] if args.weights else [1 / 3] * 3
        if len(weights) != 3:
            raise ConfigurationError("--weights needs carbon,habitat,economy")
        query = PosteriorQuery(
            budget_cap=args.budget if args.budget else math.inf,
            min_reverted_area_mu=args.min_area or 0.0,
            weight_carbon=weights[0], weight_habitat=weights[1],
            weight_economy=weights[2],
        )
        ranked = posterior_select(frontier, surrogates, query)
        if not ranked:
            print("no feasible policy combination under the given constraints")
        else:
            print("rank  g2g    f2e   score   burden        reverted_mu")
            for i, r in enumerate(ranked, start=1):
                sc = r.point.scenario
                print(f"{i:>4}  {sc.g2g_compensation:<6g} {sc.f2e_price:<5.2f} "
                      f"{r.score:.4f}  {r.point.financial_burden:<12.1f} "
                      f"{r.point.reverted_area_mu:.1f}")
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    if args.fixture:
        from .fixtures import reference_point_set, reference_query

        points = reference_point_set()
        g2g_y = [p.scenario.g2g_compensation * p.reverted_area_mu for p in points]
        f2e_y = [p.financial_burden - g for p, g in zip(points, g2g_y)]
        surrogates = fit_bundle_surrogates(points, g2g_y, f2e_y)
        q = reference_query()
        bundle = build_bundle(points, surrogates, config_hash="reference-fixture",
                              reference_year=None, defaults={
                                  "budget_cap": q.budget_cap,
                                  "min_reverted_area_mu": q.min_reverted_area_mu,
                                  "weights": {"carbon": q.weight_carbon,
                                              "habitat": q.weight_habitat,
                                              "economy": q.weight_economy},
                              })
    else:
        if not args.sweep:
            raise ConfigurationError("export needs a sweep.csv path (or --fixture)")
        table = read_sweep_csv(args.sweep)
        bundle = bundle_from_sweep(table, f2e_x2_linear=args.x2_linear)
    path = write_bundle(bundle, args.out)
    print(f"wrote {path} ({path.stat().st_size} bytes, "
          f"{len(bundle['points'])} points)")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import functools
    from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer

    handler = functools.partial(SimpleHTTPRequestHandler, directory=str(args.dir))
    server = ThreadingHTTPServer((args.host, args.port), handler)
    print(f"serving {args.dir} on http://{args.host}:{args.port} (ctrl-c to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def cmd_schema(args: argparse.Namespace) -> int:
    _atomic_json(Path(args.out), BUNDLE_SCHEMA)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="panda-sim",
        description="Coupled human-nature policy simulator and analysis toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a scenario sweep")
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--seed", type=int, help="base seed override")
    p.add_argument("--replicates", type=int, help="replicates per scenario")
    p.add_argument("--scenarios", help="lattice override, e.g. g2g=0..2000:100,f2e=0.65")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--workers", type=int, help="process count (default PANDA_SIM_THREADS)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analyze", help="frontier, labels, fits and curves from a sweep")
    p.add_argument("sweep", help="path to sweep.csv")
    p.add_argument("--out", help="output directory (default: next to the sweep)")
    p.add_argument("--budget", type=float, help="budget cap for posterior selection")
    p.add_argument("--min-area", type=float, help="minimum reverted area (Mu)")
    p.add_argument("--weights", help="carbon,habitat,economy preference weights")
    p.add_argument("--fit-habitat", choices=("cubic", "quadratic"), default="cubic")
    p.add_argument("--x2-linear", action="store_true",
                   help="use the X2-linear variant of the F2E budget form")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("export", help="write the explorer bundle JSON")
    p.add_argument("sweep", nargs="?", help="path to sweep.csv")
    p.add_argument("--out", default="bundle.json")
    p.add_argument("--fixture", action="store_true",
                   help="export the 18-point reference fixture bundle instead")
    p.add_argument("--x2-linear", action="store_true")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="serve a directory over HTTP")
    p.add_argument("dir", help="directory to serve")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("schema", help="write the explorer bundle JSON schema")
    p.add_argument("--out", default="explorer_bundle.schema.json")
    p.set_defaults(func=cmd_schema)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, SweepFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
