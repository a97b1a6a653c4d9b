"""Command line front end: ``firefight <command> [options]``.

Commands write their artefacts into ``--out`` (default: the working
directory) and print a one-line summary. Exit status is 2 for bad
configuration or unparsable input and 1 for I/O failures.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from firefight import baselines, plots, render
from firefight.evolution import (
    EAParams,
    HillClimbParams,
    opening_credit,
    parallel_restarts,
    run_ea,
)
from firefight.fitness import enclosure_fitness, highway_fitness
from firefight.genomes import (
    ConnectedDecoder,
    ConnectedGenome,
    CoordinateDecoder,
    ScriptGenome,
    format_genome,
    load_genome,
)
from firefight.grid import (
    ConfigInvalid,
    FireError,
    Scenario,
    ScriptedDecoder,
    SimConfig,
    parse_rational,
    simulate,
)

log = logging.getLogger("firefight")

RING = ((0, 1), (1, 0), (0, -1), (-1, 0))

# Fallbacks for options left unset on the command line and in --config.
DEFAULTS = {
    "c": "2", "t": 10, "tmax": None, "n": 50, "p": 0.02, "r": 0.3, "seed": None,
    "d": 20, "kind": "coordinate", "baseline": None, "initial_budget": None,
    "repair_orientation": "ccw", "out": ".", "render": "none", "every": 1, "jobs": 1,
    "generations": 2000, "restarts": 1, "iterations": 10_000, "diag_n": None,
    "c_from": "1.6", "c_to": "2.0", "c_step": "0.05", "seq_len": 6, "start": None,
    "genome": None, "scenario": "enclosure", "target": None,
}
# Highway runs need a horizon well past the expected contact time.
COMMAND_DEFAULTS = {"highway": {"t": 200}, "sweep": {"t": 80}}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c", help="budget per step, decimal or a/b")
    p.add_argument("--t", type=int, help="simulation steps used for fitness")
    p.add_argument("--tmax", type=int, help="horizon for replays and baselines")
    p.add_argument("--seed", type=int)
    p.add_argument("--initial-budget",
                   help="enclosure: opening balance of the budget account (default 2 when c<2); "
                        "highway: extra credit on top of floor(c*t)")
    p.add_argument("--repair-orientation", choices=("cw", "ccw"),
                   help="rotation of the front end during repair; the back turns the other way")
    p.add_argument("--out", help="output directory")
    p.add_argument("--render", choices=("none", "ascii", "svg"))
    p.add_argument("--every", type=int, help="write every k-th frame")
    p.add_argument("--config", help="JSON file with option values; flags win")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_ea(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, help="population size")
    p.add_argument("--p", type=float, help="per-locus mutation probability")
    p.add_argument("--r", type=float, help="fraction kept as parents")
    p.add_argument("--generations", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="firefight", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enclose", help="evolve a barrier that encloses the fire")
    _add_common(p)
    _add_ea(p)
    p.add_argument("--baseline", choices=("optimal-c2", "ring"))
    p.add_argument("--target", type=int, help="stop once this many burning cells is reached")

    p = sub.add_parser("highway", help="keep the fire away from a highway")
    _add_common(p)
    p.add_argument("--d", type=int, help="rows between fire and highway")
    p.add_argument("--kind", choices=("connected", "coordinate"))
    p.add_argument("--baseline", choices=("symmetric", "diagonal"))
    p.add_argument("--diag-n", type=int, help="diagonal start distance (default: smallest legal)")
    p.add_argument("--restarts", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--jobs", type=int)

    p = sub.add_parser("sweep", help="enclosure success over a range of c")
    _add_common(p)
    _add_ea(p)
    p.add_argument("--c-from")
    p.add_argument("--c-to")
    p.add_argument("--c-step")

    p = sub.add_parser("replay", help="simulate a saved genome")
    _add_common(p)
    p.add_argument("genome", nargs="?", help="genome file")
    p.add_argument("--scenario", choices=("enclosure", "highway"))
    p.add_argument("--d", type=int)

    p = sub.add_parser("oracle", help="exhaustive search on a tiny enclosure instance")
    _add_common(p)
    p.add_argument("--seq-len", type=int)
    p.add_argument("--start", type=int, nargs=2, metavar=("X", "Y"))

    p = sub.add_parser("baselines", help="table of the scripted highway strategies")
    _add_common(p)
    p.add_argument("--d", type=int)
    return parser


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Merge flags over ``--config`` over built-in defaults."""
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"{args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigInvalid(f"{args.config}: expected a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    defaults = {**DEFAULTS, **COMMAND_DEFAULTS.get(args.command, {})}
    if args.command == "replay" and (args.scenario or cfg.get("scenario")) == "highway":
        defaults.update(COMMAND_DEFAULTS["highway"])
    for key, default in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, cfg.get(key, default))
    args.c = parse_rational(args.c)
    if args.seed is None:
        args.seed = int(np.random.SeedSequence().generate_state(1)[0])
        print(f"seed={args.seed}")
    return args


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _frames(args, outcome, out: Path, highway_row=None) -> None:
    if args.render != "none":
        render.write_frames(outcome.frames, out, args.render, args.every, highway_row)


def _enclosure_line(outcome, generations) -> str:
    time = outcome.end_time if outcome.enclosed else "none"
    return (f"enclosed={str(outcome.enclosed).lower()} time={time} "
            f"burned={outcome.burning_count} generations={generations}")


def _check_enclosure_c(c: Fraction) -> None:
    if c <= 1:
        raise ConfigInvalid(f"c={c}: a budget of at most one cell per step cannot enclose a fire")


def cmd_enclose(args) -> int:
    _check_enclosure_c(args.c)
    out = _outdir(args)
    tmax = args.tmax or args.t
    if args.baseline:
        credit = opening_credit(args.c, args.initial_budget)
        config = SimConfig(c=args.c, t_max=tmax, initial_budget=credit)
        if args.baseline == "optimal-c2":
            make = baselines.optimal_c2_enclosure
        else:
            make = lambda: ScriptedDecoder(RING)  # noqa: E731
        outcome = simulate(make(), config, record_frames=args.render != "none")
        generations = 0
        (out / "best.genome").write_text(format_genome(baselines.export_script(make(), config)))
    else:
        params = EAParams(c=args.c, t=args.t, n=args.n, p=args.p, r=args.r,
                          initial_budget=args.initial_budget, seed=args.seed,
                          max_generations=args.generations,
                          orientation=args.repair_orientation, target_fitness=args.target)
        genome, fit, runlog = run_ea(params)
        config = SimConfig(c=params.c, t_max=tmax, initial_budget=params.credit)
        outcome = simulate(ConnectedDecoder(genome, params.orientation), config,
                           record_frames=args.render != "none")
        generations = len(runlog.records)
        (out / "run.jsonl").write_text(runlog.to_jsonl())
        (out / "convergence.csv").write_text(runlog.to_csv())
        (out / "best.genome").write_text(format_genome(genome))
        plots.plot_convergence([r.best.burning_count for r in runlog.records],
                               [r.mean for r in runlog.records], out / "convergence.png")
    fit = enclosure_fitness(outcome)
    _write_csv(out / "summary.csv", ["c", "t", "seed", "enclosed", "time", "burned", "protected",
                                     "generations"],
               [[str(args.c), tmax, args.seed, outcome.enclosed,
                 fit.enclosure_time if outcome.enclosed else "", outcome.burning_count,
                 outcome.protected_count, generations]])
    _frames(args, outcome, out)
    print(_enclosure_line(outcome, generations))
    return 0


def _highway_line(fit) -> str:
    return f"r={fit.r if not fit.survived else 'none'} profile=[{','.join(map(str, fit.d))}]"


def cmd_highway(args) -> int:
    out = _outdir(args)
    tmax = args.tmax or args.t
    ib = args.initial_budget or 0
    config = SimConfig.highway(args.c, args.d, tmax, initial_budget=ib)
    if args.baseline:
        if args.baseline == "symmetric":
            make = lambda: baselines.symmetric_alternating(args.c, args.d)  # noqa: E731
        else:
            n = args.diag_n or baselines.min_diagonal_start(args.c)
            make = lambda: baselines.asymmetric_diagonal(args.c, args.d, n)  # noqa: E731
        outcome = simulate(make(), config, record_frames=args.render != "none")
        (out / "best.genome").write_text(format_genome(baselines.export_script(make(), config)))
        fit = highway_fitness(outcome)
        plots.plot_profile(fit.d, out / "profile.png", title=_highway_line(fit).split(" ")[0])
    else:
        params = HillClimbParams(c=args.c, t=tmax, d=args.d, seed=args.seed,
                                 max_iterations=args.iterations, restarts=args.restarts,
                                 kind=args.kind, initial_budget=ib,
                                 orientation=args.repair_orientation)
        genome, fit, logs = parallel_restarts(params, jobs=args.jobs)
        if isinstance(genome, ConnectedGenome):
            decoder = ConnectedDecoder(genome, params.orientation)
        else:
            decoder = CoordinateDecoder(genome, params.origin, config.highway_row)
        outcome = simulate(decoder, config, record_frames=args.render != "none")
        (out / "run.jsonl").write_text("".join(lg.to_jsonl() for lg in logs))
        (out / "best.genome").write_text(format_genome(genome))
        best = max(logs, key=lambda lg: lg.records[-1].best)
        plots.plot_convergence([r.best.r for r in best.records], [],
                               out / "convergence.png", ylabel="first highway contact")
        plots.plot_profile(fit.d, out / "profile.png")
    _write_csv(out / "summary.csv", ["c", "d", "tmax", "seed", "r", "survived", "profile"],
               [[str(args.c), args.d, tmax, args.seed, fit.r, fit.survived,
                 " ".join(map(str, fit.d))]])
    _frames(args, outcome, out, config.highway_row)
    print(_highway_line(fit))
    return 0


def _frange(start: Fraction, stop: Fraction, step: Fraction):
    if step <= 0 or start > stop:
        raise ConfigInvalid("sweep needs c_from <= c_to and a positive step")
    n = math.floor((stop - start) / step)
    return [start + i * step for i in range(n + 1)]


def sweep_rows(cs, args) -> list:
    rows = []
    for c in cs:
        _check_enclosure_c(c)
        params = EAParams(c=c, t=args.t, n=args.n, p=args.p, r=args.r,
                          initial_budget=args.initial_budget, seed=args.seed,
                          max_generations=args.generations,
                          orientation=args.repair_orientation)
        _, fit, runlog = run_ea(params)
        rows.append({"c": str(float(c)), "enclosed": fit.enclosed,
                     "enclose_time": fit.enclosure_time if fit.enclosed else "",
                     "burned": fit.burning_count, "generations": len(runlog.records)})
        log.info("c=%s enclosed=%s", float(c), fit.enclosed)
    return rows


def cmd_sweep(args) -> int:
    out = _outdir(args)
    cs = _frange(parse_rational(args.c_from), parse_rational(args.c_to),
                 parse_rational(args.c_step))
    rows = sweep_rows(cs, args)
    keys = ["c", "enclosed", "enclose_time", "burned", "generations"]
    _write_csv(out / "sweep.csv", keys, [[r[k] for k in keys] for r in rows])
    plots.plot_sweep(rows, out / "sweep.png")
    for r in rows:
        print(f"c={r['c']} enclosed={str(r['enclosed']).lower()} time={r['enclose_time'] or 'none'}"
              f" burned={r['burned']} generations={r['generations']}")
    return 0


def cmd_replay(args) -> int:
    if not args.genome:
        raise ConfigInvalid("replay needs a genome file")
    genome = load_genome(args.genome)
    out = _outdir(args)
    tmax = args.tmax or args.t
    ib = args.initial_budget or 0
    highway = args.scenario == Scenario.HIGHWAY.value
    if highway:
        config = SimConfig.highway(args.c, args.d, tmax, initial_budget=ib)
    else:
        # same opening balance the enclosure EA uses by default
        opening = args.initial_budget
        if opening is None and args.c < 2:
            opening = 2
        config = SimConfig(c=args.c, t_max=tmax, initial_budget=opening_credit(args.c, opening))
    if isinstance(genome, ConnectedGenome):
        decoder = ConnectedDecoder(genome, args.repair_orientation)
    elif isinstance(genome, ScriptGenome):
        decoder = ScriptedDecoder(genome.cells)
    else:
        decoder = CoordinateDecoder(genome, config.fire_origin,
                                    config.highway_row if highway else None)
    outcome = simulate(decoder, config, record_frames=args.render != "none")
    _frames(args, outcome, out, config.highway_row if highway else None)
    if highway:
        print(_highway_line(highway_fitness(outcome)))
    else:
        print(_enclosure_line(outcome, 0))
    return 0


def cmd_oracle(args) -> int:
    out = _outdir(args)
    start = tuple(args.start) if args.start else (0, 1)
    res = baselines.brute_force_best(args.c, args.tmax or args.t, args.seq_len, (start,),
                                     args.initial_budget or 0, args.repair_orientation)
    (out / "best.genome").write_text(format_genome(res.genome))
    print(f"searched={res.searched} {enclosure_fitness(res.outcome)} "
          + _enclosure_line(res.outcome, 0))
    return 0


def cmd_baselines(args) -> int:
    out = _outdir(args)
    tmax = args.tmax or 500
    rows = []
    for c in ("1.1", "1.2", "1.3", "1.4", "1.5"):
        config = SimConfig.highway(c, args.d, tmax)
        sym = highway_fitness(simulate(baselines.symmetric_alternating(c, args.d), config))
        n = baselines.min_diagonal_start(c)
        if n < args.d:
            diag = highway_fitness(simulate(baselines.asymmetric_diagonal(c, args.d, n), config))
            diag_r = "none" if diag.survived else diag.r
        else:
            diag_r = ""
        rows.append({"c": c, "symmetric_r": "none" if sym.survived else sym.r,
                     "diagonal_n": n, "diagonal_r": diag_r})
        print(f"c={c} symmetric_r={rows[-1]['symmetric_r']} diagonal_n={n} diagonal_r={diag_r}")
    keys = ["c", "symmetric_r", "diagonal_n", "diagonal_r"]
    _write_csv(out / "baselines.csv", keys, [[r[k] for k in keys] for r in rows])
    plots.plot_baselines(rows, out / "baselines.png")
    return 0


COMMANDS = {
    "enclose": cmd_enclose, "highway": cmd_highway, "sweep": cmd_sweep,
    "replay": cmd_replay, "oracle": cmd_oracle, "baselines": cmd_baselines,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args = resolve(args)
        return COMMANDS[args.command](args)
    except (FireError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
