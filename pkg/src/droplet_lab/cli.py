"""Command-line interface.

Subcommands
-----------
classify      regime of a parameter point, JSON
droplet       boundary geometry as CSV, optional SVG figure
scan          phase diagram over a (p, c) window, CSV / SVG
energy        closed-form energy report, JSON
energy-curve  energy report along a p sweep, CSV / SVG
kappa         kappa thresholds for a map column (a, tau), JSON
univalence    interval and circle-scan univalence verdicts, JSON
fekete        descent on the discrete Hamiltonian, CSV / SVG
moments       moment coefficient K(z), JSON

Conventions: floats are printed with 17 significant digits, CSV carries a
'#'-prefixed provenance header, JSON carries a top-level "schema" key set to
"droplet-lab/1", and figures are SVG with deterministic content.  Exit codes:
0 success, 2 bad input, 3 unsupported regime, 4 non-convergence.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from typing import IO

import numpy as np

from . import critical, energy, fekete, geometry, params, phases, univalence
from .geometry import InsideDomainError
from .params import (
    ConformalParams,
    DomainError,
    ModelParams,
    RegimeTag,
    UnsupportedRegimeError,
)

logger = logging.getLogger(__name__)

SCHEMA = "droplet-lab/1"


# ---------------------------------------------------------------------------
# serialisation helpers
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    """17-significant-digit decimal form, round-trip safe."""
    return format(float(x), ".17g")


def _json_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _fmt(value)
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, dict):
        inner = ", ".join(f'"{k}": {_json_value(v)}' for k, v in value.items())
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialise {type(value)!r}")


def _emit_json(obj: dict, stream: IO[str] | None = None) -> None:
    (stream or sys.stdout).write(_json_value(obj) + "\n")


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _write_csv(path: str | None, header: list[str], columns: list[str], rows) -> None:
    stream, needs_close = _open_out(path)
    try:
        for line in header:
            stream.write(f"# {line}\n")
        stream.write(",".join(columns) + "\n")
        for row in rows:
            stream.write(",".join(row) + "\n")
    finally:
        if needs_close:
            stream.close()


def _new_axes():
    import matplotlib

    matplotlib.rcParams["svg.hashsalt"] = "droplet-lab"
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    return fig, ax


def _save_svg(fig, path: str) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    import matplotlib.pyplot as plt

    plt.close(fig)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_classify(args) -> int:
    model = ModelParams(p=args.p, c=args.c, tau=args.tau)
    regime, cp = phases.classify(model, tol=args.tol)
    obj: dict = {
        "schema": SCHEMA,
        "regime": regime.tag.value,
        "boundary_flags": dict(sorted(regime.boundary_flags.items())),
    }
    if cp is not None:
        obj["a"] = cp.a
        obj["kappa"] = cp.kappa
        obj["R"] = cp.R
    _emit_json(obj)
    return 0


def _droplet_rows_doubly(droplet, n: int):
    t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    e, d = droplet.ellipse, droplet.disc
    for tv in t:
        z = e.semi_major * math.cos(tv) + 1j * e.semi_minor * math.sin(tv)
        yield ["ellipse", _fmt(tv), _fmt(z.real), _fmt(z.imag)]
    for tv in t:
        z = d.center + d.radius * complex(math.cos(tv), math.sin(tv))
        yield ["disc", _fmt(tv), _fmt(z.real), _fmt(z.imag)]


def _droplet_rows_boundary(theta, boundary):
    for tv, z in zip(theta, boundary):
        yield ["boundary", _fmt(tv), _fmt(z.real), _fmt(z.imag)]


def _plot_droplet(fig_path: str, rows_by_curve: dict[str, np.ndarray]) -> None:
    fig, ax = _new_axes()
    for name, pts in rows_by_curve.items():
        closed = np.append(pts, pts[:1])
        ax.plot(closed.real, closed.imag, label=name)
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.legend(loc="upper right")
    _save_svg(fig, fig_path)


def _cmd_droplet(args) -> int:
    if args.raw_map:
        if args.a is None or args.kappa is None:
            raise DomainError("--raw-map requires --a and --kappa")
        R = args.R if args.R is not None else geometry.solve_R(args.a, args.kappa, args.tau)
        cp = ConformalParams(R=R, a=args.a, kappa=args.kappa)
        univalent = univalence.is_univalent(args.a, args.kappa, args.tau)
        if not univalent:
            logger.warning(
                "map with a=%g kappa=%g tau=%g is not univalent; "
                "the sampled curve is not a droplet boundary",
                args.a,
                args.kappa,
                args.tau,
            )
        theta, boundary = geometry.sample_boundary(cp, args.tau, n=args.n)
        header = [
            f"{SCHEMA} droplet (raw map)",
            f"a = {_fmt(args.a)} kappa = {_fmt(args.kappa)} tau = {_fmt(args.tau)} R = {_fmt(R)}",
            f"univalent = {str(univalent).lower()}",
        ]
        _write_csv(
            args.out,
            header,
            ["curve", "theta", "re", "im"],
            _droplet_rows_boundary(theta, boundary),
        )
        if args.fig:
            _plot_droplet(args.fig, {"boundary": boundary})
        return 0

    if args.p is None or args.c is None:
        raise DomainError("droplet requires --p and --c unless --raw-map is given")
    model = ModelParams(p=args.p, c=args.c, tau=args.tau)
    classification = phases.classify(model)
    if classification.regime.tag is RegimeTag.TWO_COMPONENTS:
        raise UnsupportedRegimeError(
            "the droplet splits into two components; no boundary curve is available"
        )
    droplet = geometry.build_droplet(model, classification, n_boundary=args.n)
    header = [
        f"{SCHEMA} droplet",
        f"p = {_fmt(model.p)} c = {_fmt(model.c)} tau = {_fmt(model.tau)}",
        f"regime = {classification.regime.tag.value}",
        f"area = {_fmt(geometry.area(droplet))}",
    ]
    if classification.regime.tag is RegimeTag.DOUBLY_CONNECTED:
        rows = _droplet_rows_doubly(droplet, args.n)
        _write_csv(args.out, header, ["curve", "theta", "re", "im"], rows)
        if args.fig:
            t = np.linspace(0.0, 2.0 * math.pi, args.n, endpoint=False)
            e, d = droplet.ellipse, droplet.disc
            _plot_droplet(
                args.fig,
                {
                    "ellipse": e.semi_major * np.cos(t) + 1j * e.semi_minor * np.sin(t),
                    "disc": d.center + d.radius * np.exp(1j * t),
                },
            )
    else:
        cp = classification.conformal
        header.insert(
            3,
            f"a = {_fmt(cp.a)} kappa = {_fmt(cp.kappa)} R = {_fmt(cp.R)}",
        )
        _write_csv(
            args.out,
            header,
            ["curve", "theta", "re", "im"],
            _droplet_rows_boundary(droplet.theta, droplet.boundary),
        )
        if args.fig:
            _plot_droplet(args.fig, {"boundary": droplet.boundary})
    return 0


def _cmd_scan(args) -> int:
    resolution = (args.p_res or args.res, args.c_res or args.res)
    result = phases.phase_diagram_scan(
        args.tau,
        (args.p_min, args.p_max),
        (args.c_min, args.c_max),
        resolution,
    )
    header = [
        f"{SCHEMA} scan",
        f"tau = {_fmt(args.tau)}",
        f"p = [{_fmt(args.p_min)}, {_fmt(args.p_max)}] x {resolution[0]}",
        f"c = [{_fmt(args.c_min)}, {_fmt(args.c_max)}] x {resolution[1]}",
    ]

    def rows():
        for i, c in enumerate(result.c_values):
            for j, p in enumerate(result.p_values):
                yield [_fmt(p), _fmt(c), str(result.tags[i, j])]

    _write_csv(args.out, header, ["p", "c", "regime"], rows())
    if args.fig:
        fig, ax = _new_axes()
        codes = np.zeros(result.tags.shape, dtype=float)
        codes[result.tags == "II"] = 1.0
        codes[result.tags == "III"] = 2.0
        ax.imshow(
            codes,
            origin="lower",
            extent=(args.p_min, args.p_max, args.c_min, args.c_max),
            aspect="auto",
            vmin=0.0,
            vmax=2.0,
            cmap="viridis",
            interpolation="nearest",
        )
        ax.set_xlabel("p")
        ax.set_ylabel("c")
        _save_svg(fig, args.fig)
    return 0


def _energy_report(model: ModelParams):
    classification = phases.classify(model)
    tag = classification.regime.tag
    if tag is RegimeTag.DOUBLY_CONNECTED:
        return classification, energy.energy_doubly(model)
    if tag is RegimeTag.SIMPLY_CONNECTED:
        return classification, energy.energy_simply(model, classification.conformal)
    return classification, None


def _cmd_energy(args) -> int:
    model = ModelParams(p=args.p, c=args.c, tau=args.tau)
    _, report = _energy_report(model)
    if report is None:
        raise UnsupportedRegimeError(
            "no closed-form energy for the two-component droplet"
        )
    _emit_json(
        {
            "schema": SCHEMA,
            "regime": report.regime.tag.value,
            "energy": report.energy,
            "robin": report.robin,
            "potential_integral": report.potential_integral,
            "moments_coeff": report.moments_coeff,
        }
    )
    return 0


def _cmd_energy_curve(args) -> int:
    model_check = ModelParams(p=0.0, c=args.c, tau=args.tau)  # validates c, tau
    p_values = np.linspace(args.p_min, args.p_max, args.n)
    header = [
        f"{SCHEMA} energy-curve",
        f"c = {_fmt(args.c)} tau = {_fmt(args.tau)}",
        f"p = [{_fmt(args.p_min)}, {_fmt(args.p_max)}] x {args.n}",
    ]
    records = []
    for p in p_values:
        model = ModelParams(p=float(p), c=model_check.c, tau=model_check.tau)
        _, report = _energy_report(model)
        if report is None:
            records.append([_fmt(p), "III", "nan", "nan", "nan", "nan"])
        else:
            records.append(
                [
                    _fmt(p),
                    report.regime.tag.value,
                    _fmt(report.energy),
                    _fmt(report.robin),
                    _fmt(report.potential_integral),
                    _fmt(report.moments_coeff),
                ]
            )
    _write_csv(
        args.out,
        header,
        ["p", "regime", "energy", "robin", "potential_integral", "moments_coeff"],
        records,
    )
    if args.fig:
        fig, ax = _new_axes()
        vals = np.array(
            [float(r[2]) if r[2] != "nan" else np.nan for r in records], dtype=float
        )
        ax.plot(p_values, vals)
        ax.set_xlabel("p")
        ax.set_ylabel("energy")
        _save_svg(fig, args.fig)
    return 0


def _cmd_kappa(args) -> int:
    _emit_json(
        {
            "schema": SCHEMA,
            "a": float(args.a),
            "tau": float(args.tau),
            "kappa_min": params.kappa_min(args.a, args.tau),
            "kappa_one": params.kappa_one(args.a, args.tau),
            "kappa_cri": critical.kappa_cri(args.a, args.tau),
            "kappa_max": params.kappa_max(args.a, args.tau),
        }
    )
    return 0


def _cmd_univalence(args) -> int:
    verdict = univalence.is_univalent(args.a, args.kappa, args.tau, args.n_samples)
    lo = params.kappa_min(args.a, args.tau)
    hi = params.kappa_max(args.a, args.tau)
    _emit_json(
        {
            "schema": SCHEMA,
            "a": float(args.a),
            "kappa": float(args.kappa),
            "tau": float(args.tau),
            "univalent": verdict,
            "kappa_min": lo,
            "kappa_max": hi,
            "in_interval": bool(lo <= args.kappa <= hi),
        }
    )
    return 0


_FEKETE_KEYS = {
    "n_points": int,
    "ensemble": str,
    "p": float,
    "c": float,
    "tau": float,
    "seed": int,
    "max_iters": int,
    "grad_tol": float,
    "step_policy": str,
    "step_size": float,
    "collision_guard": float,
    "use_quasi_newton": lambda s: s.lower() in ("1", "true", "yes"),
}


def _parse_fekete_config(path: str) -> fekete.FeketeConfig:
    values: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _FEKETE_KEYS:
                raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _FEKETE_KEYS[key](value)
            except ValueError as exc:
                raise DomainError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    for required in ("n_points", "p", "c", "tau"):
        if required not in values:
            raise DomainError(f"{path}: missing required key {required!r}")
    model = ModelParams(p=values.pop("p"), c=values.pop("c"), tau=values.pop("tau"))
    if "ensemble" in values:
        try:
            values["ensemble"] = fekete.Ensemble(values["ensemble"])
        except ValueError as exc:
            raise DomainError(f"unknown ensemble {values['ensemble']!r}") from exc
    else:
        values["ensemble"] = fekete.Ensemble.COMPLEX
    if "step_policy" in values:
        try:
            values["step_policy"] = fekete.StepPolicy(values["step_policy"])
        except ValueError as exc:
            raise DomainError(f"unknown step policy {values['step_policy']!r}") from exc
    return fekete.FeketeConfig(params=model, **values)


def _cmd_fekete(args) -> int:
    config = _parse_fekete_config(args.config)
    result = fekete.minimize(config)
    header = [
        f"{SCHEMA} fekete",
        f"n_points = {config.n_points} ensemble = {config.ensemble.value} seed = {config.seed}",
        f"p = {_fmt(config.params.p)} c = {_fmt(config.params.c)} tau = {_fmt(config.params.tau)}",
        f"final_energy = {_fmt(result.final_energy)} grad_norm = {_fmt(result.grad_norm)}",
        f"iterations = {result.iterations} converged = {str(result.converged).lower()}",
    ]
    rows = (
        [str(i), _fmt(z.real), _fmt(z.imag)] for i, z in enumerate(result.points)
    )
    _write_csv(args.out, header, ["index", "re", "im"], rows)
    if args.fig:
        fig, ax = _new_axes()
        pts = result.points
        if config.ensemble is fekete.Ensemble.SYMPLECTIC:
            pts = np.concatenate([pts, np.conj(pts)])
        ax.plot(pts.real, pts.imag, ".", markersize=3)
        classification = phases.classify(config.params)
        if classification.regime.tag is not RegimeTag.TWO_COMPONENTS:
            droplet = geometry.build_droplet(config.params, classification)
            if classification.regime.tag is RegimeTag.DOUBLY_CONNECTED:
                t = np.linspace(0.0, 2.0 * math.pi, 512)
                e, d = droplet.ellipse, droplet.disc
                ax.plot(e.semi_major * np.cos(t), e.semi_minor * np.sin(t), "-")
                if d.radius > 0:
                    ax.plot(d.center + d.radius * np.cos(t), d.radius * np.sin(t), "-")
            else:
                closed = np.append(droplet.boundary, droplet.boundary[:1])
                ax.plot(closed.real, closed.imag, "-")
        ax.set_aspect("equal")
        ax.set_xlabel("Re")
        ax.set_ylabel("Im")
        _save_svg(fig, args.fig)
    return 0 if result.converged else 4


def _cmd_moments(args) -> int:
    value = energy.moments_coeff(args.z, args.c, args.tau)
    model = ModelParams(p=args.z, c=args.c, tau=args.tau)
    regime, _ = phases.classify(model)
    _emit_json(
        {
            "schema": SCHEMA,
            "z": float(args.z),
            "c": float(args.c),
            "tau": float(args.tau),
            "K": value,
            "regime": regime.tag.value,
        }
    )
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_model_args(sp) -> None:
    sp.add_argument("--p", type=float, required=True, help="charge location p >= 0")
    sp.add_argument("--c", type=float, required=True, help="charge strength c >= 0")
    sp.add_argument("--tau", type=float, required=True, help="asymmetry tau in [0, 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="droplet-lab",
        description="Droplet geometry, phase diagrams, and energies for a "
        "planar Coulomb gas with an inserted point charge.",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log progress to stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("classify", help="classify a parameter point")
    _add_model_args(sp)
    sp.add_argument("--tol", type=float, default=1e-9, help="boundary flag tolerance")
    sp.set_defaults(func=_cmd_classify)

    sp = sub.add_parser("droplet", help="boundary geometry as CSV / SVG")
    sp.add_argument("--p", type=float, help="charge location (classified mode)")
    sp.add_argument("--c", type=float, help="charge strength (classified mode)")
    sp.add_argument("--tau", type=float, required=True, help="asymmetry tau in [0, 1)")
    sp.add_argument("--raw-map", action="store_true", help="sample a raw (a, kappa) map")
    sp.add_argument("--a", type=float, help="map parameter a in (0, 1)")
    sp.add_argument("--kappa", type=float, help="map parameter kappa")
    sp.add_argument("--R", type=float, help="map scale (default: solved)")
    sp.add_argument("--n", type=int, default=1024, help="boundary samples")
    sp.add_argument("--out", help="CSV path (default stdout)")
    sp.add_argument("--fig", help="SVG figure path")
    sp.set_defaults(func=_cmd_droplet)

    sp = sub.add_parser("scan", help="phase diagram over a (p, c) window")
    sp.add_argument("--tau", type=float, required=True)
    sp.add_argument("--p-min", type=float, required=True)
    sp.add_argument("--p-max", type=float, required=True)
    sp.add_argument("--c-min", type=float, required=True)
    sp.add_argument("--c-max", type=float, required=True)
    sp.add_argument("--res", type=int, default=32, help="cells per axis")
    sp.add_argument("--p-res", type=int, help="override cells along p")
    sp.add_argument("--c-res", type=int, help="override cells along c")
    sp.add_argument("--out", help="CSV path (default stdout)")
    sp.add_argument("--fig", help="SVG figure path")
    sp.set_defaults(func=_cmd_scan)

    sp = sub.add_parser("energy", help="closed-form energy report")
    _add_model_args(sp)
    sp.set_defaults(func=_cmd_energy)

    sp = sub.add_parser("energy-curve", help="energy report along a p sweep")
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--tau", type=float, required=True)
    sp.add_argument("--p-min", type=float, required=True)
    sp.add_argument("--p-max", type=float, required=True)
    sp.add_argument("--n", type=int, default=100, help="sample count")
    sp.add_argument("--out", help="CSV path (default stdout)")
    sp.add_argument("--fig", help="SVG figure path")
    sp.set_defaults(func=_cmd_energy_curve)

    sp = sub.add_parser("kappa", help="kappa thresholds for (a, tau)")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--tau", type=float, required=True)
    sp.set_defaults(func=_cmd_kappa)

    sp = sub.add_parser("univalence", help="univalence verdicts for (a, kappa, tau)")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--tau", type=float, required=True)
    sp.add_argument("--n-samples", type=int, default=4096)
    sp.set_defaults(func=_cmd_univalence)

    sp = sub.add_parser("fekete", help="minimise the discrete Hamiltonian")
    sp.add_argument("--config", required=True, help="flat key=value config file")
    sp.add_argument("--out", help="CSV path (default stdout)")
    sp.add_argument("--fig", help="SVG figure path")
    sp.set_defaults(func=_cmd_fekete)

    sp = sub.add_parser("moments", help="moment coefficient K(z)")
    sp.add_argument("--z", type=float, required=True, help="charge location")
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--tau", type=float, required=True)
    sp.set_defaults(func=_cmd_moments)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UnsupportedRegimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DomainError, InsideDomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
