"""Command-line front end emitting reproducible CSV/JSON artifacts.

Each subcommand parses long-form flags, dispatches into the library, and
writes its result next to a JSON manifest recording the command, flags,
seed, and tolerance profile.  Outputs are deterministic for a fixed
argument vector and seed; wall-clock timestamps appear only in the
manifest.  Numeric tables carry the tolerance profile on every row and
print floats with 17 significant digits so they can be re-ingested
without rounding loss.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from datetime import datetime, timezone

from .core import (
    DimkitError,
    InvalidInput,
    PoleAtArgument,
    PoleAtDimension,
    ToleranceConfig,
    UnknownCommand,
)


def _fmt(value) -> str:
    """One CSV cell: 17 significant digits for floats, bare text otherwise."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, complex):
        if value.imag == 0.0:
            return "%.17g" % value.real
        return "%.17g%+.17gj" % (value.real, value.imag)
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def _parse_dimension(text: str) -> complex:
    """Parse RE or RE,IM into a complex dimension value."""
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")
    try:
        re_part = float(parts[0])
        im_part = float(parts[1]) if len(parts) == 2 else 0.0
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return complex(re_part, im_part)


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(",") if p.strip() != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports problems as InvalidInput."""

    def error(self, message: str) -> None:
        raise InvalidInput(message)


@dataclasses.dataclass(frozen=True)
class RunManifest:
    """Reproducibility record serialized next to every output file."""

    command: str
    flags: dict[str, str]
    seed: int
    tolerance: ToleranceConfig
    output_paths: tuple[str, ...]

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "flags": dict(sorted(self.flags.items())),
            "seed": self.seed,
            "tolerance": dataclasses.asdict(self.tolerance),
            "output_paths": list(self.output_paths),
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def _write_table(path: str, header: tuple[str, ...], rows, tol: ToleranceConfig) -> None:
    """Write rows as CSV, appending the tolerance profile to each row."""
    with open(path, "w", newline="") as handle:
        handle.write(",".join(header + ("rel_tol", "abs_tol")) + "\n")
        for row in rows:
            cells = [_fmt(v) for v in row] + [_fmt(tol.rel_tol), _fmt(tol.abs_tol)]
            handle.write(",".join(cells) + "\n")


def _add_common(parser: _Parser, default_out: str) -> None:
    parser.add_argument("--out", default=default_out, help="output file path")
    parser.add_argument("--rel-tol", type=float, default=ToleranceConfig().rel_tol)
    parser.add_argument("--abs-tol", type=float, default=ToleranceConfig().abs_tol)


def _tolerance(args: argparse.Namespace) -> ToleranceConfig:
    return ToleranceConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol)


def _cfg_table1(parser: _Parser) -> None:
    _add_common(parser, "table1.csv")
    parser.add_argument("--orders", type=_parse_floats, default=(1.0, 2.0))
    parser.add_argument("--dims", type=_parse_floats, default=(-1.0, -2.0))


def _run_table1(args: argparse.Namespace) -> list[str]:
    from . import dimexp

    report = dimexp.table1_report(
        orders=tuple(int(k) for k in args.orders),
        dimensions=tuple(args.dims),
    )
    records = report.as_records()
    keys = list(records[0].keys()) if records else list(report.header)
    rows = [tuple(rec[k] for k in keys) for rec in records]
    _write_table(args.out, tuple(keys), rows, _tolerance(args))
    return [args.out]


def _cfg_tadpole(parser: _Parser) -> None:
    _add_common(parser, "tadpole.csv")
    parser.add_argument("--dim", type=_parse_dimension, required=True)
    parser.add_argument("--n", type=float, required=True)
    parser.add_argument("--m2", type=float, default=1.0)
    parser.add_argument("--q2", type=float, default=0.0)


def _run_tadpole(args: argparse.Namespace) -> list[str]:
    from . import masterint

    try:
        scalar, vector = masterint.tadpole(args.dim, args.n, args.m2, args.q2)
    except (PoleAtArgument, PoleAtDimension) as exc:
        raise type(exc)(
            f"Gamma(n - D/2) with n={args.n:g}, D={_fmt(args.dim)}: {exc}"
        ) from exc
    header = ("dim", "n", "m2", "q2", "value_re", "value_im", "pole_flag", "i_power", "parity")
    row = (
        args.dim,
        args.n,
        args.m2,
        args.q2,
        scalar.value.real,
        scalar.value.imag,
        scalar.pole_flag,
        scalar.phase_tag.i_power,
        scalar.phase_tag.parity,
    )
    _write_table(args.out, header, [row], _tolerance(args))
    return [args.out]


def _cfg_bubble(parser: _Parser) -> None:
    _add_common(parser, "bubble.csv")
    parser.add_argument("--dim", type=_parse_dimension, required=True)
    parser.add_argument("--v1", type=float, required=True)
    parser.add_argument("--v2", type=float, required=True)
    parser.add_argument("--q2", type=float, default=1.0)
    parser.add_argument("--m1sq", type=float, default=0.0)
    parser.add_argument("--m2sq", type=float, default=0.0)


def _run_bubble(args: argparse.Namespace) -> list[str]:
    from . import ndim

    tol = _tolerance(args)
    result = ndim.eval_massive_bubble(
        args.dim, args.v1, args.v2, args.q2, args.m1sq, args.m2sq, tol=tol
    )
    header = ("dim", "v1", "v2", "q2", "m1sq", "m2sq", "value", "error", "converged")
    row = (
        args.dim, args.v1, args.v2, args.q2, args.m1sq, args.m2sq,
        complex(result.value), result.error, result.converged,
    )
    _write_table(args.out, header, [row], tol)
    return [args.out]


def _cfg_ndim_solve(parser: _Parser) -> None:
    _add_common(parser, "ndim-solve.json")
    parser.add_argument("--dim", type=_parse_dimension, required=True)
    parser.add_argument("--powers", type=_parse_floats, required=True)
    parser.add_argument("--masses2", type=_parse_floats, default=None)
    parser.add_argument("--scale2", type=float, default=1.0)


def _run_ndim_solve(args: argparse.Namespace) -> list[str]:
    from . import ndim

    masses2 = args.masses2 if args.masses2 is not None else (0.0,) * len(args.powers)
    spec = ndim.LoopIntegralSpec(
        powers=args.powers,
        masses2=masses2,
        scales2=(args.scale2,),
        dimension=args.dim,
    )
    system = ndim.build_system(spec)
    solutions = ndim.enumerate_solutions(system)
    descriptors = [ndim.to_descriptor(sol, spec).to_json() for sol in solutions]
    doc = {
        "spec": spec.to_json(),
        "solution_count": len(descriptors),
        "descriptors": descriptors,
    }
    with open(args.out, "w") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return [args.out]


def _cfg_schwinger(parser: _Parser) -> None:
    _add_common(parser, "schwinger.csv")
    parser.add_argument("--dim", type=_parse_dimension, required=True)
    parser.add_argument("--r", type=float, required=True)
    parser.add_argument("--mass", type=float, required=True)


def _run_schwinger(args: argparse.Namespace) -> list[str]:
    from . import propagator

    result = propagator.schwinger(args.dim, args.r, args.mass)
    value = complex(result.value)
    header = ("dim", "r", "mass", "value_re", "value_im", "classification")
    row = (args.dim, args.r, args.mass, value.real, value.imag, result.classification)
    _write_table(args.out, header, [row], _tolerance(args))
    return [args.out]


def _cfg_multifractal(parser: _Parser) -> None:
    _add_common(parser, "multifractal.csv")
    parser.add_argument("--dt", type=int, required=True)
    parser.add_argument("--alpha", type=float, required=True)
    parser.add_argument("--r", type=float, required=True)
    parser.add_argument("--mass", type=float, default=0.0)


def _run_multifractal(args: argparse.Namespace) -> list[str]:
    from . import propagator

    rows = [
        ("massless", args.r, propagator.multifractal_massless(args.dt, args.alpha, args.r))
    ]
    if args.mass > 0.0:
        rows.append(
            (
                "massive",
                args.r,
                propagator.multifractal_massive(args.dt, args.alpha, args.r, args.mass),
            )
        )
    _write_table(args.out, ("kind", "r", "value"), rows, _tolerance(args))
    return [args.out]


def _cfg_spectral_flow(parser: _Parser) -> None:
    _add_common(parser, "spectral-flow.csv")
    parser.add_argument("--df", type=float, required=True)
    parser.add_argument("--l", type=float, required=True)
    parser.add_argument("--smin", type=float, default=None)
    parser.add_argument("--smax", type=float, default=None)
    parser.add_argument("--points", type=int, default=7)


def _run_spectral_flow(args: argparse.Namespace) -> list[str]:
    import numpy as np

    from . import spectral

    if args.smin is not None or args.smax is not None:
        if args.smin is None or args.smax is None or not (0 < args.smin < args.smax):
            raise InvalidInput("need 0 < --smin < --smax when overriding the grid")
        grid = np.geomspace(args.smin, args.smax, args.points)
    else:
        half = args.points // 2
        grid = [args.l * args.l * 10.0**k for k in range(-half, args.points - half)]
    rows = []
    for s in grid:
        cfg = spectral.DiffusionConfig(
            topological_df=args.df, minimal_length=args.l, diffusion_time=float(s)
        )
        rows.append((float(s), spectral.spectral_dimension(cfg)))
    _write_table(args.out, ("s", "spectral_dimension"), rows, _tolerance(args))
    return [args.out]


def _cfg_boxdim(parser: _Parser) -> None:
    _add_common(parser, "boxdim.csv")
    parser.add_argument("--window", type=float, required=True)
    parser.add_argument("--scale", type=float, required=True)
    parser.add_argument("--trials", type=int, required=True)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--ladder-min", type=int, default=4)
    parser.add_argument("--ladder-max", type=int, default=12)


def _run_boxdim(args: argparse.Namespace) -> list[str]:
    from . import spectral

    exp = spectral.BoxExperiment(
        window=args.window, scale=args.scale, trials=args.trials, seed=args.seed
    )
    rate, slope, stderr = spectral.box_dimension_mc(
        exp, ladder_min=args.ladder_min, ladder_max=args.ladder_max
    )
    header = ("window", "scale", "trials", "seed", "intersection_rate", "dimension", "stderr")
    row = (args.window, args.scale, args.trials, args.seed, rate, slope, stderr)
    _write_table(args.out, header, [row], _tolerance(args))
    return [args.out]


def _cfg_cosmo_run(parser: _Parser) -> None:
    _add_common(parser, "cosmo-run.csv")
    parser.add_argument("--params", required=True, help="JSON parameter file")
    parser.add_argument("--variant", required=True)
    parser.add_argument("--t0", type=float, required=True)
    parser.add_argument("--a0", type=float, required=True)
    parser.add_argument("--hubble0", type=float, required=True)
    parser.add_argument("--rho0", type=float, default=0.0)
    parser.add_argument("--phi0", type=float, default=0.0)
    parser.add_argument("--phidot0", type=float, default=0.0)
    parser.add_argument("--t-end", type=float, required=True)
    parser.add_argument("--dt", type=float, required=True)


def _run_cosmo_run(args: argparse.Namespace) -> list[str]:
    from . import cosmo

    try:
        with open(args.params) as handle:
            params = cosmo.params_from_json(handle.read())
    except (OSError, json.JSONDecodeError, TypeError, KeyError) as exc:
        raise InvalidInput(f"could not load parameters from {args.params}: {exc}") from exc
    initial = cosmo.CosmoState(
        t=args.t0,
        a=args.a0,
        H=args.hubble0,
        rho=args.rho0,
        phi=args.phi0,
        phi_dot=args.phidot0,
    )
    trajectory, diagnostics = cosmo.integrate(
        initial, params, args.variant, args.t_end, args.dt
    )
    cosmo.write_trajectory_csv(args.out, trajectory, diagnostics)
    return [args.out]


def _cfg_weyl(parser: _Parser) -> None:
    _add_common(parser, "weyl.csv")
    parser.add_argument("--kind", required=True, choices=("power", "gauss", "gauss-drift"))
    parser.add_argument("--dim", type=_parse_dimension, required=True)
    parser.add_argument("--n", type=float, default=1.0)
    parser.add_argument("--l", type=float, default=1.0)
    parser.add_argument("--delta", type=float, default=1.0)
    parser.add_argument("--gamma", type=float, default=0.0)


def _run_weyl(args: argparse.Namespace) -> list[str]:
    from . import masterint

    extra = {"n": args.n, "l": args.l, "delta": args.delta, "gamma": args.gamma}
    value = masterint.weyl_closed(args.kind, args.dim, **extra)
    header = ("kind", "dim", "n", "l", "delta", "gamma", "value_re", "value_im")
    row = (args.kind, args.dim, args.n, args.l, args.delta, args.gamma,
           complex(value).real, complex(value).imag)
    _write_table(args.out, header, [row], _tolerance(args))
    return [args.out]


def _cfg_gc_check(parser: _Parser) -> None:
    _add_common(parser, "gc-check.csv")
    parser.add_argument("--points", type=int, default=10)
    parser.add_argument("--subtractions", type=int, default=0)


def _run_gc_check(args: argparse.Namespace) -> list[str]:
    import math

    import numpy as np

    from . import masterint
    from .specfun import gamma

    if args.points < 1:
        raise InvalidInput("--points must be at least 1")
    tol = _tolerance(args)
    dims = np.linspace(-1.9, -0.1, args.points)
    rows = []
    for dv in dims:
        quad = masterint.gelfand_collins(
            lambda p2: 1.0 / (p2 + 1.0), float(dv), subtractions=args.subtractions, tol=tol
        )
        closed = (4.0 * math.pi) ** (-dv / 2.0) * gamma(1.0 - dv / 2.0).real
        q = complex(quad.value).real
        rows.append((float(dv), q, closed, abs(q - closed) / abs(closed)))
    _write_table(args.out, ("dim", "quadrature", "closed_form", "rel_dev"), rows, tol)
    return [args.out]


_REGISTRY = {
    "table1": (_cfg_table1, _run_table1),
    "tadpole": (_cfg_tadpole, _run_tadpole),
    "bubble": (_cfg_bubble, _run_bubble),
    "ndim-solve": (_cfg_ndim_solve, _run_ndim_solve),
    "schwinger": (_cfg_schwinger, _run_schwinger),
    "multifractal": (_cfg_multifractal, _run_multifractal),
    "spectral-flow": (_cfg_spectral_flow, _run_spectral_flow),
    "boxdim": (_cfg_boxdim, _run_boxdim),
    "cosmo-run": (_cfg_cosmo_run, _run_cosmo_run),
    "weyl": (_cfg_weyl, _run_weyl),
    "gc-check": (_cfg_gc_check, _run_gc_check),
}


def _flag_map(args: argparse.Namespace) -> dict[str, str]:
    return {
        name.replace("_", "-"): _fmt(value)
        for name, value in sorted(vars(args).items())
    }


def dispatch(argv: list[str]) -> int:
    """Parse a subcommand, run it, and write outputs plus manifests.

    Returns 0 on success, 2 on domain or pole errors (with a single-line
    diagnostic naming the offending Gamma argument or domain rule), 64 for
    an unknown subcommand, and 65 for arguments that fail to parse.
    """
    try:
        if not argv:
            raise UnknownCommand(
                "no subcommand given; expected one of " + ", ".join(sorted(_REGISTRY))
            )
        command = argv[0]
        if command not in _REGISTRY:
            raise UnknownCommand(
                f"unknown subcommand {command!r}; expected one of "
                + ", ".join(sorted(_REGISTRY))
            )
        configure, run = _REGISTRY[command]
        parser = _Parser(prog=f"dimkit {command}", allow_abbrev=False)
        configure(parser)
        try:
            args = parser.parse_args(argv[1:])
        except SystemExit as exc:  # --help prints and leaves
            return int(exc.code or 0)
        paths = run(args)
        manifest = RunManifest(
            command=command,
            flags=_flag_map(args),
            seed=int(getattr(args, "seed", 0)),
            tolerance=_tolerance(args),
            output_paths=tuple(paths),
        )
        for path in paths:
            with open(f"{path}.manifest.json", "w") as handle:
                handle.write(manifest.to_json())
                handle.write("\n")
        for path in paths:
            print(f"wrote {path}")
        return 0
    except UnknownCommand as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 64
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 65
    except (DimkitError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> int:
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
