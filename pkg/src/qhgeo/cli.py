"""Command-line entry point: ``qhgeo <subcommand> --config FILE [--out-dir DIR] [--seed N]``.

Exit status is 0 when every verdict passes, 1 when one fails and 2 for
configuration or input errors.
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from ._validation import DisconnectedError, InputError, PreconditionError
from .balls import convexity_check, find_nonconvex_witness, starlike_check, trace_ball
from .geodesic import qh_distance
from .io import emit_csv, emit_svg, load_config, write_report
from .norms import NormSpec
from .paths import MetricKind, j_distance

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _radius(cfg):
    return cfg.get_positive("radius", math.log(2.0))


def _tol(cfg):
    return cfg.get_positive("tol")


def cmd_distance(cfg, out):
    domain, norm = cfg.domain(), cfg.norm()
    x, y = cfg.get_point("x"), cfg.get_point("y")
    rep = ex.ReportDocument("distance", {"domain": repr(domain), "norm": norm.label(), "x": x.tolist(), "y": y.tolist()})
    if cfg.metric() is MetricKind.DISTANCE_RATIO:
        rep.record("j", j_distance(domain, norm, x, y))
        return rep, {}
    params = cfg.solver_params()
    est = qh_distance(domain, norm, x, y, params)
    rep.record("lower", est.lower)
    rep.record("upper", est.upper)
    rep.record("bracket_width", est.upper - est.lower)
    rep.check("bracket_ordered", "bracket_width", ">=", -params.quad_tol)
    emit_csv(est.path, out / "distance_path.csv")
    emit_svg(out / "distance.svg", domain, paths={"path": est.path}, points={"x": x, "y": y}, viewport=cfg.viewport())
    return rep, {}


def cmd_ball(cfg, out):
    domain, norm, metric = cfg.domain(), cfg.norm(), cfg.metric()
    center, r = cfg.get_point("center"), _radius(cfg)
    trace = trace_ball(domain, norm, metric, center, r, cfg.get_int("n_rays", 32), _tol(cfg), cfg.solver_params())
    rep = ex.ReportDocument("ball", {"metric": metric.value, "center": center.tolist(), "radius": r})
    rep.record("rays", len(trace.rays))
    rep.record("clipped_rays", int(trace.clipped.sum()))
    rep.record("min_t_star", float(min(c.t_star for c in trace.rays)))
    rep.record("max_t_star", float(max(c.t_star for c in trace.rays)))
    emit_csv(trace, out / "ball_trace.csv")
    emit_svg(out / "ball.svg", domain, traces=[trace], points={"center": center}, viewport=cfg.viewport())
    return rep, {}


def _check(cfg, out, name, fn, default_rays):
    domain, norm, metric = cfg.domain(), cfg.norm(), cfg.metric()
    center, r = cfg.get_point("center"), _radius(cfg)
    chk = fn(
        domain,
        norm,
        metric,
        center,
        r,
        n_rays=cfg.get_int("n_rays", default_rays),
        n_chord=cfg.get_int("n_chord", 8),
        tol=_tol(cfg),
        params=cfg.solver_params(),
    )
    rep = ex.ReportDocument(name, {"metric": metric.value, "center": center.tolist(), "radius": r})
    rep.record("violations", len(chk.violations))
    rep.check("no_violations", "violations", "==", 0)
    rep.record("max_excess", chk.max_excess)
    for k, v in chk.notes.items():
        if np.isscalar(v):
            rep.record(k, v)
    rep.witnesses = list(chk.violations)
    emit_csv(chk, out / f"{name}_violations.csv")
    return rep, {}


def cmd_starlike(cfg, out):
    return _check(cfg, out, "starlike", starlike_check, 32)


def cmd_convex(cfg, out):
    return _check(cfg, out, "convex", convexity_check, 24)


def cmd_witness(cfg, out):
    radii = cfg.get_floats("radii", [0.2, 0.1, 0.05])
    norm = cfg.norm() if cfg.get("norm") else NormSpec(math.inf)
    found = find_nonconvex_witness(radii, norm, budget=cfg.get_int("budget", 40), seed=cfg.seed)
    rep = ex.ReportDocument("witness", {"norm": norm.label(), "radii": radii, "seed": cfg.seed})
    rep.record("radii_with_witness", sum(w is not None for w in found))
    rep.check("witness_at_every_radius", "radii_with_witness", "==", len(radii))
    rep.witnesses = [w for w in found if w is not None]
    emit_csv(rep.witnesses, out / "witnesses.csv")
    return rep, {}


def cmd_counterexample(cfg, out):
    rep = ex.run_counterexample(cfg.solver_params())
    scene = rep.notes["scene"]
    emit_svg(
        out / "counterexample.svg",
        scene["domain"],
        paths={"broken line": scene["paths"]["broken_line"]},
        points=scene["points"],
        extra_paths=[scene["paths"]["constrained"]],
        viewport=cfg.viewport() or (-2.0, -3.5, 2.0, 0.5),
    )
    emit_csv(scene["paths"]["constrained"], out / "counterexample_constrained_path.csv")
    return rep, {}


def cmd_holder(cfg, out):
    reps = []
    for p in cfg.get_floats("p", [1.0, 2.0, 3.0]):
        reps.append(ex.run_holder_check(p, cfg.get_int("trials", 1000), cfg.get_int("steps", 16), cfg.seed))
    if len(reps) == 1:
        return reps[0], {}
    rep = ex.ReportDocument("holder", {"p": [r.inputs["p"] for r in reps], "trials": reps[0].inputs["trials"]})
    for r in reps:
        tag = f"p{r.inputs['p']:g}"
        for k, v in r.quantities.items():
            rep.record(f"{tag}_{k}", v)
        for v in r.verdicts:
            rep.check(f"{tag}_{v.name}", f"{tag}_{v.quantity}", v.relation, v.threshold)
    return rep, {}


def cmd_avgpath(cfg, out):
    radii = tuple(cfg.get_floats("radii", [0.05, 0.1, 0.2]))
    return ex.run_avgpath_check(cfg.get_int("trials", 100), cfg.seed, radii), {}


def cmd_conformality(cfg, out):
    domain = cfg.domain() if cfg.get("domain") else None
    norm = cfg.norm() if cfg.get("norm") else None
    return ex.run_conformality_check(domain, norm, cfg.get_int("trials", 24), cfg.seed, cfg.solver_params()), {}


def cmd_jball(cfg, out):
    norm = cfg.norm() if cfg.get("norm") else None
    rep = ex.run_jball_intersection_check(
        cfg.get_points("punctures"), cfg.get_point("x"), _radius(cfg), cfg.get_int("samples", 10000), cfg.seed, norm
    )
    return rep, {}


def cmd_moduli(cfg, out):
    return ex.run_moduli_check(cfg.norm(), cfg.seed), {}


def cmd_suite(cfg, out):
    which = cfg.require("suite")
    rep = ex.run_theorem_suite(which, cfg.seed, cfg.get_int("n_configs"), tuple(cfg.get_floats("radii", [0.2, 0.1, 0.05])))
    emit_csv(rep.witnesses, out / f"suite_{which.lower()}_witnesses.csv")
    return rep, {}


COMMANDS = {
    "distance": cmd_distance,
    "ball": cmd_ball,
    "starlike": cmd_starlike,
    "convex": cmd_convex,
    "witness": cmd_witness,
    "counterexample": cmd_counterexample,
    "holder": cmd_holder,
    "avgpath": cmd_avgpath,
    "conformality": cmd_conformality,
    "jball-intersection": cmd_jball,
    "moduli": cmd_moduli,
    "suite": cmd_suite,
}


def _seed(text):
    try:
        s = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return s


def build_parser():
    ap = argparse.ArgumentParser(prog="qhgeo", description="Quasihyperbolic geometry experiments.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, type=Path, help="flat key = value file")
    ap.add_argument("--out-dir", type=Path, default=Path("."), help="directory for CSV, SVG and report files")
    ap.add_argument("--seed", type=_seed, default=None, help="overrides the config seed")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.values["seed"] = str(args.seed)
        args.out_dir.mkdir(parents=True, exist_ok=True)
        rep, _ = COMMANDS[args.command](cfg, args.out_dir)
    except (InputError, PreconditionError, OSError) as exc:
        print(f"qhgeo: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DisconnectedError as exc:
        print(f"qhgeo: experiment error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    stem = args.command.replace("-", "_")
    write_report(rep, args.out_dir / f"{stem}.txt")
    emit_csv(rep, args.out_dir / f"{stem}_quantities.csv")
    sys.stdout.write(f"{args.command}: {'pass' if rep.passed else 'fail'}\n")
    return EXIT_PASS if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
