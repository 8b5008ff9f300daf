"""Command-line front end: ``crestline gen | recover | validate | compare``.

Exit codes: 0 success, 1 invalid input or admissibility failure, 2 partial
recovery (trusted disk narrower than half a wavelength, whether or not the
profile was completed by an extension), 3 solver nonconvergence.  Errors are reported as one JSON object on
standard error.  Outputs go to ``--out``, else ``$CRESTLINE_OUTPUT_DIR``, else
the current directory.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import forward, funcrep, io, recover, validate
from .errors import ConfigurationError, CrestlineError, InvalidInputError
from .funcrep import FuncP

OUTPUT_ENV = "CRESTLINE_OUTPUT_DIR"

# (low, high, inclusive) ranges for the numeric options
RANGES = {
    "N": (1, recover.N_MAX),
    "M": (8, funcrep.M_MAX),
    "theta": (1e-3, 0.99),
    "nq": (8, 4096),
    "np": (8, 2048),
    "nx": (8, 4096),
    "ns": (3, 513),
    "m_out": (4, 64),
    "steps": (1, 200),
    "tol": (1e-15, 1.0),
}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    inputs: tuple
    out_dir: Path
    options: dict = field(default_factory=dict)
    gamma: str = "zero"
    experimental: bool = False

    def __post_init__(self):
        for key, (lo, hi) in RANGES.items():
            v = self.options.get(key)
            if v is not None and not (lo <= v <= hi):
                raise ConfigurationError(f"--{key.replace('_', '-')} = {v} is outside [{lo}, {hi}]")
        outs = {(self.out_dir / n).resolve() for n in OUTPUT_NAMES.get(self.subcommand, ())}
        for p in self.inputs:
            if Path(p).resolve() in outs:
                raise ConfigurationError(f"input {p} would be overwritten by an output")


OUTPUT_NAMES = {
    "gen": ("solution.json", "axis.csv", "profile.csv"),
    "recover": ("solution.json", "profile.csv", "field.csv", "coefficients.json", "radius.json"),
    "validate": ("report.json",),
    "compare": ("metrics.json", "overlay.svg"),
}


def resolve_gamma(text: str, p0: float) -> FuncP:
    """``zero``, a constant, ``poly:c0,c1,...`` (coefficients of p^k) or a CSV of (p, gamma)."""
    text = text.strip()
    if text in ("", "zero", "0"):
        return funcrep.constant(0.0, p0)
    if text.startswith("poly:"):
        try:
            cs = [float(t) for t in text[5:].split(",") if t.strip()]
        except ValueError:
            raise InvalidInputError(f"bad polynomial coefficients in {text!r}") from None
        if not cs:
            raise InvalidInputError("empty polynomial")
        poly = np.polynomial.Polynomial(cs)
        return funcrep.chop(funcrep.from_function(poly, p0, max(len(cs), 2)), 1e-15)
    try:
        return funcrep.constant(float(text), p0)
    except ValueError:
        pass
    path = Path(text)
    if not path.is_file():
        raise InvalidInputError(f"gamma {text!r} is neither zero, a number, poly:..., nor a file")
    return io.gamma_from_samples(path, p0)


def _out_dir(arg: str | None) -> Path:
    out = Path(arg or os.environ.get(OUTPUT_ENV) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------- gen


def cmd_gen(cfg: RunConfig, args) -> int:
    g = args.g
    if args.kind == "laminar":
        prm = forward.PhysParams(d=args.depth, c=args.speed, lam=args.wavelength, g=g)
        U = lambda y: args.bed_speed + args.shear * (np.asarray(y) + args.depth)
        ff = forward.laminar_flow(U, prm, nx=cfg.options["nx"], ns=cfg.options["ns"])
        pvals, p0 = forward.streamfunction(ff)
        gam = funcrep.constant(args.shear, p0)
        u_top = args.bed_speed + args.shear * args.depth
        Q = (args.speed - u_top) ** 2 + 2.0 * g * args.depth
        hlam, _, _ = forward.laminar_height(gam, Q, p0, g)
        height = _laminar_field(hlam, gam, Q, p0, prm)
        meta = {"kind": "laminar", "c": prm.c}
    elif args.kind == "linear":
        prm = forward.PhysParams(d=args.depth, c=1.0, lam=args.wavelength, g=g)
        ff = forward.linear_wave(args.eps, prm, nx=cfg.options["nx"], ns=cfg.options["ns"])
        c, p0, Q = forward.linear_constants(args.eps, prm)
        gam = funcrep.constant(0.0, p0)
        height = None
        meta = {"kind": "linear", "c": c, "eps": args.eps, "k": prm.k}
    else:
        ff, height, gam, Q, meta = _gen_steady(cfg, args)
    axis = forward.extract_axis_data(ff, args.x0) if args.kind != "steady" else meta.pop("_axis")
    out = cfg.out_dir
    io.write_json(out / "solution.json", io.solution_dict(f"gen-{args.kind}", ff, height, gam, Q, meta=meta))
    io.write_axis_csv(out / "axis.csv", axis)
    io.write_profile_csv(out / "profile.csv", ff.x, ff.eta, ff.params.lam, {"lambda": ff.params.lam})
    _report({"status": "ok", "outputs": [str(out / n) for n in OUTPUT_NAMES["gen"]], **meta})
    return 0


def _laminar_field(hlam: FuncP, gam: FuncP, Q: float, p0: float, prm) -> forward.HeightField:
    q = np.arange(16) * prm.lam / 16
    p = funcrep.p_nodes(p0, 32)
    h = np.broadcast_to(hlam(p), (q.size, p.size)).copy()
    return forward.HeightField(p0, q, p, h, gam, Q, prm.lam, prm.g, "fourier", "chebyshev")


def _gen_steady(cfg: RunConfig, args):
    g, lam, d = args.g, args.wavelength, args.depth
    c0 = forward.dispersion_speed(g, d, lam)
    p0 = args.p0 if args.p0 is not None else -c0 * d
    if p0 >= 0:
        raise InvalidInputError("--p0 must be negative")
    gam = resolve_gamma(cfg.gamma, p0)
    Q = args.Q if args.Q is not None else c0**2 + 2.0 * g * d
    nq, npi = cfg.options["nq"], cfg.options["np"]
    q = np.arange(nq) * lam / nq
    p = p0 + np.arange(npi + 1) * (-p0) / npi
    p[-1] = 0.0
    if args.height is None or args.height == 0:
        hf = forward.solve_height_equation(gam, Q, p0, lam, nq, npi, g=g, tol=cfg.options["tol"])
    else:
        # amplitude continuation: each step starts from the previous solution
        hlam, _, _ = forward.laminar_height(gam, Q, p0, g)
        steps = cfg.options["steps"]
        H = forward.wave_initial_guess(hlam, q, p, lam, 0.5 * args.height / steps)
        for n in range(1, steps + 1):
            hf = forward.solve_height_equation(
                gam, Q, p0, lam, nq, npi, H, g=g, wave_height=args.height * n / steps, tol=cfg.options["tol"]
            )
            H, Q = hf.h, hf.Q
    c = args.speed if args.speed is not None else c0
    prm = forward.params_from_height(hf, c)
    ff = forward.flow_from_height(hf, prm)
    hp = forward.smooth_p_derivative(hf)
    axis = recover.AxisData(y=hf.h[0] - prm.d, w=-1.0 / hp[0], d=prm.d, lam=lam, g=g, x0=0.0, c=c)
    meta = {
        "kind": "steady",
        "c": c,
        "Q": hf.Q,
        "p0": p0,
        "mean_depth": prm.d,
        "newton_iterations": hf.info.get("iterations"),
        "final_residual": hf.info.get("residual"),
        "_axis": axis,
    }
    return ff, hf, gam, hf.Q, meta


# ---------------------------------------------------------------- recover


def cmd_recover(cfg: RunConfig, args) -> int:
    axis = io.read_axis_csv(Path(args.axis))
    if args.extension == "recenter" and not cfg.experimental:
        raise ConfigurationError("--extension recenter needs --experimental-continuation")
    p0, _ = recover.compute_flux(axis)
    gam = resolve_gamma(cfg.gamma, p0)
    o = cfg.options
    rec = recover.recover_wave(
        axis, gam, N=o["N"], M=o["M"], theta=o["theta"], nq=o["nq"], M_out=o["m_out"], extension=args.extension
    )
    out = cfg.out_dir
    meta = {"lambda": axis.lam, "status": rec.status, "q_trusted": rec.q_trusted}
    if rec.status == "partial":
        io.write_profile_csv(out / "profile.csv", rec.x, rec.eta, None, meta)
    else:
        io.write_profile_csv(out / "profile.csv", rec.x, rec.eta, axis.lam, meta)
    io.write_field_csv(out / "field.csv", rec.flow)
    tab = rec.table
    io.write_json(
        out / "coefficients.json",
        {
            "format_version": io.FORMAT_VERSION,
            "p0": tab.p0,
            "symmetric": tab.symmetric,
            "max_power": tab.max_power,
            "gamma": io.funcp_to_dict(tab.gamma),
            "terms": [{"power": m, "coef": f.coef} for m, f in enumerate(tab.terms)],
        },
    )
    r = rec.radius
    io.write_json(
        out / "radius.json",
        {
            "format_version": io.FORMAT_VERSION,
            "L": r.L,
            "theta": r.theta,
            "q_trust_radius": r.q_trust,
            "q_trusted": rec.q_trusted,
            "half_wavelength": axis.lam / 2.0,
            "entire": r.entire,
            "ratios": list(r.ratios),
            "status": rec.status,
            "note": rec.note,
        },
    )
    disk = rec.disk_height()
    io.write_json(
        out / "solution.json",
        io.solution_dict(
            "recover",
            rec.flow,
            rec.height,
            tab.gamma,
            rec.Q,
            disk={"height": io.height_to_dict(disk), "c": rec.flow.params.c, "d": axis.d},
            meta={
                "status": rec.status,
                "note": rec.note,
                "c_known": rec.info.get("c_known", False),
                "q_trusted": rec.q_trusted,
                "flux_error": rec.flux_error,
                "consistency": rec.consistency,
                "axis_flags": list(axis.flags),
            },
        ),
    )
    _report({"status": rec.status, "q_trusted": rec.q_trusted, "Q": rec.Q, "p0": rec.p0, "note": rec.note})
    # anything beyond the trusted disk is not backed by the series: report it
    return 0 if rec.status == "complete" else 2


# ---------------------------------------------------------------- validate


def cmd_validate(cfg: RunConfig, args) -> int:
    sol = io.read_json(Path(args.solution))
    tol = cfg.options["tol"]
    gam = io.funcp_from_dict(sol["gamma"])
    Q = io._num(sol["Q"])
    disk = sol.get("disk")
    if disk is not None and args.region == "trusted":
        hf = io.height_from_dict(disk["height"])
        prm = forward.PhysParams(d=io._num(disk["d"]), c=io._num(disk["c"]), lam=hf.lam, g=hf.g)
        ff = forward.flow_from_height(hf, prm)
        region = "trusted"
    else:
        ff = io.flow_from_dict(sol["flow"])
        hf = io.height_from_dict(sol["height"]) if sol.get("height") else None
        region = "full"
    reports = [validate.euler_residual(ff, tol), validate.stream_residual(ff, gam, Q, tol)]
    if hf is not None:
        reports.append(validate.height_eq_residual(hf, tol))
    passed = all(r.passed for r in reports)
    doc = {
        "format_version": io.FORMAT_VERSION,
        "solution": str(args.solution),
        "region": region,
        "tolerance": tol,
        "passed": passed,
        "reports": [r.to_dict() for r in reports],
    }
    io.write_json(cfg.out_dir / "report.json", doc)
    _report({"passed": passed, "region": region, "worst": {r.kind: r.worst for r in reports}})
    return 0 if passed else 1


# ---------------------------------------------------------------- compare


def cmd_compare(cfg: RunConfig, args) -> int:
    xa, ea, la, ma = io.read_profile_csv(Path(args.a))
    xb, eb, lb, mb = io.read_profile_csv(Path(args.b))
    for m, name in ((ma, args.a), (mb, args.b)):
        if m.get("status") == "partial":
            raise InvalidInputError(f"{name} is a partial profile and cannot be compared over a period")
    if args.remove_mean:
        ea = ea - np.mean(ea[:-1])
        eb = eb - np.mean(eb[:-1])
    metrics = validate.compare_profiles(xa, ea, xb, eb, la, lb)
    doc = {"format_version": io.FORMAT_VERSION, "a": str(args.a), "b": str(args.b), "period": la, **metrics}
    io.write_json(cfg.out_dir / "metrics.json", doc)
    if args.svg:
        svg = io.overlay_svg([(Path(args.a).name, xa, ea), (Path(args.b).name, xb, eb)])
        (cfg.out_dir / "overlay.svg").write_text(svg, encoding="utf-8")
    _report(metrics)
    return 0


# ---------------------------------------------------------------- plumbing


def _report(obj: dict) -> None:
    print(io._encode(obj))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crestline", description="Steady water waves from crest-line velocity data")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", default=None, help=f"output directory (default ${OUTPUT_ENV} or .)")

    gen = sub.add_parser("gen", help="generate a reference flow and its crest-line axis data")
    gen.add_argument("kind", choices=["laminar", "linear", "steady"])
    gen.add_argument("--depth", type=float, default=1.0)
    gen.add_argument("--wavelength", type=float, default=2.0 * np.pi)
    gen.add_argument("--g", type=float, default=forward.G_DEFAULT)
    gen.add_argument("--speed", type=float, default=None, help="wave speed c (laminar: required)")
    gen.add_argument("--shear", type=float, default=0.0, help="laminar: dU/dy")
    gen.add_argument("--bed-speed", type=float, default=0.0, help="laminar: U at the bed")
    gen.add_argument("--eps", type=float, default=0.01, help="linear: amplitude")
    gen.add_argument("--Q", type=float, default=None, help="steady: Bernoulli constant")
    gen.add_argument("--p0", type=float, default=None, help="steady: relative flux (default -c0 d)")
    gen.add_argument("--height", type=float, default=None, help="steady: crest-to-trough height")
    gen.add_argument("--steps", type=int, default=4, help="steady: amplitude continuation steps")
    gen.add_argument("--gamma", default="zero", help="steady: vorticity function (zero, number, poly:..., or CSV)")
    gen.add_argument("--nq", type=int, default=64)
    gen.add_argument("--np", type=int, default=32)
    gen.add_argument("--nx", type=int, default=64)
    gen.add_argument("--ns", type=int, default=33)
    gen.add_argument("--tol", type=float, default=1e-10)
    gen.add_argument("--x0", type=float, default=0.0, help="crest-line position")
    common(gen)

    rec = sub.add_parser("recover", help="reconstruct the wave from an axis CSV")
    rec.add_argument("axis")
    rec.add_argument("--gamma", default="zero", help="zero | <number> | poly:c0,c1,... | file.csv with p,gamma")
    rec.add_argument("--N", type=int, default=recover.N_DEFAULT)
    rec.add_argument("--M", type=int, default=funcrep.M_MAX)
    rec.add_argument("--theta", type=float, default=recover.THETA_DEFAULT)
    rec.add_argument("--nq", type=int, default=64)
    rec.add_argument("--m-out", type=int, default=24)
    rec.add_argument("--extension", choices=list(recover.EXTENSIONS), default="periodic")
    rec.add_argument("--experimental-continuation", action="store_true")
    common(rec)

    val = sub.add_parser("validate", help="residuals of a solution JSON")
    val.add_argument("solution")
    val.add_argument("--tol", type=float, default=1e-6)
    val.add_argument("--region", choices=["trusted", "full"], default="trusted")
    common(val)

    cmp_ = sub.add_parser("compare", help="compare two profile CSVs")
    cmp_.add_argument("a")
    cmp_.add_argument("b")
    cmp_.add_argument("--svg", action="store_true", help="also write overlay.svg")
    cmp_.add_argument("--remove-mean", action="store_true")
    common(cmp_)
    return parser


def _config(args) -> RunConfig:
    opts = {}
    if args.command == "gen":
        opts = {"nq": args.nq, "np": args.np, "nx": args.nx, "ns": args.ns, "steps": args.steps, "tol": args.tol}
        if args.kind == "laminar" and args.speed is None:
            raise ConfigurationError("gen laminar needs --speed")
        inputs = ()
    elif args.command == "recover":
        opts = {"N": args.N, "M": args.M, "theta": args.theta, "nq": args.nq, "m_out": args.m_out}
        inputs = (args.axis,)
    elif args.command == "validate":
        opts = {"tol": args.tol}
        inputs = (args.solution,)
    else:
        inputs = (args.a, args.b)
    return RunConfig(
        subcommand=args.command,
        inputs=inputs,
        out_dir=_out_dir(args.out),
        options=opts,
        gamma=getattr(args, "gamma", "zero"),
        experimental=getattr(args, "experimental_continuation", False),
    )


COMMANDS = {"gen": cmd_gen, "recover": cmd_recover, "validate": cmd_validate, "compare": cmd_compare}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](cfg, args)
    except CrestlineError as exc:
        print(io._encode(exc.to_dict()), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
