"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 degenerate frequency (omega_bar = 0).
"""
from __future__ import annotations

import csv
import functools
import hashlib
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import click
import numpy as np

from . import __version__
from . import coherent as coh
from . import observables as obs
from . import radial, spectrum
from .params import ConfigError, DegenerateFrequencyError, OscillatorConfig, algebra_params
from .verify import run_verification

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DEGENERATE = 0, 1, 2, 3


@dataclass
class RunManifest:
    command: str
    config: dict
    version: str
    grid: dict
    wall_time: float
    output_sha256: str


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "PASS" if v else "FAIL"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render(columns, rows, fmt: str, header: dict | None = None) -> str:
    if fmt == "json":
        doc = {"columns": list(columns), "rows": [dict(zip(columns, map(_jsonable, r))) for r in rows]}
        if header is not None:
            doc = {"header": _jsonable(header), **doc}
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"
    buf = io.StringIO()
    if header is not None:
        buf.write("# " + json.dumps(_jsonable(header), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def emit(ctx: click.Context, text: str, grid_info: dict) -> None:
    out = ctx.obj.get("out")
    if out is None:
        click.echo(text, nl=False)
        return
    path = Path(out)
    path.write_text(text)
    manifest = RunManifest(
        command=ctx.info_name,
        config=ctx.obj["cfg"].to_dict(),
        version=__version__,
        grid=grid_info,
        wall_time=time.perf_counter() - ctx.obj["t0"],
        output_sha256=hashlib.sha256(text.encode()).hexdigest(),
    )
    Path(str(path) + ".manifest.json").write_text(json.dumps(asdict(manifest), indent=1) + "\n")


def guarded(fn):
    """Map library errors onto the exit-code contract."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except DegenerateFrequencyError as exc:
            click.echo(f"degenerate frequency: {exc}", err=True)
            sys.exit(EXIT_DEGENERATE)

    return wrapper


def common(fn):
    fn = click.option("--rmax-scale", type=float, default=1.0, show_default=True,
                      help="Multiplier on the outer grid radius.")(fn)
    fn = click.option("--grid-points", type=int, default=radial.DEFAULT_POINTS, show_default=True,
                      envvar="SU11_GRID_POINTS", help="Number of radial grid points.")(fn)
    fn = click.option("--out", type=click.Path(dir_okay=False), default=None,
                      help="Write output here (a .manifest.json is written alongside).")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)(fn)
    fn = click.argument("config", type=click.Path(dir_okay=False))(fn)
    return fn


def _setup(ctx, config, out, grid_points, rmax_scale):
    ctx.ensure_object(dict)
    ctx.obj["t0"] = time.perf_counter()
    ctx.obj["out"] = out
    cfg = OscillatorConfig.from_json(config)
    ctx.obj["cfg"] = cfg
    if grid_points < 32:
        raise click.BadParameter("grid-points must be >= 32", param_hint="--grid-points")
    return cfg, {"npoints": grid_points, "rmax_scale": rmax_scale,
                 "order": radial.DEFAULT_ORDER, "eps": radial.DEFAULT_EPS}


@click.group()
@click.version_option(__version__)
def main():
    """su(1,1) toolkit for the 2+1 Dirac oscillator with Aharonov-Casher coupling."""


@main.command("spectrum")
@common
@click.option("--n-max", type=int, default=5, show_default=True)
@click.option("--branch", type=click.Choice(["both", "plus", "minus"]), default="both", show_default=True)
@click.pass_context
@guarded
def cmd_spectrum(ctx, config, fmt, out, grid_points, rmax_scale, n_max, branch):
    """Closed-form energy levels for n_r = 0..n_max."""
    cfg, ginfo = _setup(ctx, config, out, grid_points, rmax_scale)
    cols = ["n_r", "n_s"] + {"both": ["E_plus", "E_minus"], "plus": ["E_plus"], "minus": ["E_minus"]}[branch]
    rows = []
    for n in range(n_max + 1):
        ep, em = spectrum.energy(cfg, n)
        vals = {"E_plus": ep, "E_minus": em}
        rows.append([n, spectrum.shifted_index(n, cfg.s)] + [vals[c] for c in cols[2:]])
    emit(ctx, render(cols, rows, fmt), ginfo)


@main.command("sweep-phase")
@common
@click.option("--n-r", type=int, default=0, show_default=True)
@click.option("--phi-min", type=float, default=0.0, show_default=True)
@click.option("--phi-max", type=float, default=4 * math.pi, show_default=True)
@click.option("--points", type=int, default=41, show_default=True)
@click.pass_context
@guarded
def cmd_sweep_phase(ctx, config, fmt, out, grid_points, rmax_scale, n_r, phi_min, phi_max, points):
    """Energies across AC phases; each row checks E(phi+2pi, ml) = E(phi, ml+2s)."""
    cfg, ginfo = _setup(ctx, config, out, grid_points, rmax_scale)
    rows = spectrum.phase_sweep(cfg, n_r, np.linspace(phi_min, phi_max, points))
    cols = ["phi_ac", "n_r", "s", "E_plus", "E_minus", "periodicity"]
    data = [[r.phi_ac, r.n_r, r.s, r.e_plus, r.e_minus, r.periodic] for r in rows]
    emit(ctx, render(cols, data, fmt), ginfo)
    if not all(r.periodic for r in rows):
        sys.exit(EXIT_FAIL)


@main.command("wavefunction")
@common
@click.option("--n-r", type=int, default=0, show_default=True)
@click.pass_context
@guarded
def cmd_wavefunction(ctx, config, fmt, out, grid_points, rmax_scale, n_r):
    """Normalized Sturmian function phi_{n_r}(rho)."""
    cfg, ginfo = _setup(ctx, config, out, grid_points, rmax_scale)
    grid = radial.make_grid(cfg, npoints=grid_points, rmax_scale=rmax_scale)
    phi = radial.sturmian(cfg, n_r, grid)
    rows = list(zip(grid.points, phi.values))
    emit(ctx, render(["rho", "phi"], rows, fmt), ginfo)


@main.command("coherent")
@common
@click.option("--xi-re", type=float, default=0.0, show_default=True)
@click.option("--xi-im", type=float, default=0.0, show_default=True)
@click.option("--time", "t", type=float, default=0.0, show_default=True)
@click.pass_context
@guarded
def cmd_coherent(ctx, config, fmt, out, grid_points, rmax_scale, xi_re, xi_im, t):
    """Perelomov coherent state, optionally evolved to time t."""
    cfg, ginfo = _setup(ctx, config, out, grid_points, rmax_scale)
    xi = complex(xi_re, xi_im)
    if not abs(xi) < 1:
        raise click.BadParameter("|xi| must be < 1")
    grid = coh.coherent_grid(cfg, abs(xi), npoints=grid_points, rmax_scale=rmax_scale)
    prof = coh.evolve(cfg, xi, t, grid) if t != 0 else coh.coherent_closed_form(cfg, xi, grid)
    header = {"xi": [xi.real, xi.imag], "k": prof.k, "t": t, "norm": prof.norm}
    rows = [[r, v.real, v.imag, abs(v) ** 2] for r, v in zip(grid.points, prof.samples)]
    emit(ctx, render(["rho", "re", "im", "abs2"], rows, fmt, header=header), ginfo)


@main.command("uncertainty")
@common
@click.option("--z-re", type=float, default=0.0, show_default=True)
@click.option("--z-im", type=float, default=0.0, show_default=True)
@click.pass_context
@guarded
def cmd_uncertainty(ctx, config, fmt, out, grid_points, rmax_scale, z_re, z_im):
    """Uncertainty report for D(z)|k,0> (closed form and matrix oracle)."""
    cfg, ginfo = _setup(ctx, config, out, grid_points, rmax_scale)
    k = algebra_params(cfg).k
    z = complex(z_re, z_im)
    closed = obs.uncertainty_report(k, z)
    oracle = obs.uncertainty_oracle(k, z)
    if fmt == "json":
        text = json.dumps({"closed_form": closed.to_dict(), "oracle": oracle.to_dict()}, indent=1) + "\n"
    else:
        cols = ["source", "k", "z_re", "z_im", "dx2", "dy2", "f", "c", "lhs", "rhs", "residual"]
        rows = [[name, r.k, r.z.real, r.z.imag, r.dx2, r.dy2, r.f, r.c, r.lhs, r.rhs, r.residual]
                for name, r in (("closed_form", closed), ("oracle", oracle))]
        text = render(cols, rows, "csv")
    emit(ctx, text, ginfo)


@main.command("matrix-elements")
@common
@click.option("--nmax", type=int, default=7, show_default=True)
@click.option("--operator", "which", type=click.Choice(["both", "rho2", "rho_ddrho"]), default="both",
              show_default=True)
@click.pass_context
@guarded
def cmd_matrix_elements(ctx, config, fmt, out, grid_points, rmax_scale, nmax, which):
    """Tridiagonal blocks <m|rho^2|n> and <m|rho d/drho|n>."""
    cfg, ginfo = _setup(ctx, config, out, grid_points, rmax_scale)
    mats = []
    if which in ("both", "rho2"):
        mats.append(("rho2", obs.rho2_elements(cfg, nmax)))
    if which in ("both", "rho_ddrho"):
        mats.append(("rho_ddrho", obs.rho_ddrho_elements(cfg, nmax)))
    rows = [[name, m, n, mat[m, n]] for name, mat in mats for m in range(nmax + 1) for n in range(nmax + 1)]
    emit(ctx, render(["operator", "m", "n", "value"], rows, fmt), ginfo)


@main.command("verify")
@common
@click.option("--level", type=click.Choice(["full", "algebra-only"]), default="full", show_default=True)
@click.option("--nmax", type=int, default=8, show_default=True)
@click.pass_context
@guarded
def cmd_verify(ctx, config, fmt, out, grid_points, rmax_scale, level, nmax):
    """Run the oracle suites; exit 0 iff every check passes."""
    cfg, ginfo = _setup(ctx, config, out, grid_points, rmax_scale)
    report = run_verification(cfg, level=level, npoints=grid_points, rmax_scale=rmax_scale, nmax=nmax)
    if fmt == "json":
        text = json.dumps(report.to_dict(), indent=1) + "\n"
    else:
        rows = [[c.name, c.residual, c.threshold, c.passed] for c in report.checks]
        text = render(["check", "residual", "threshold", "passed"], rows, "csv")
    emit(ctx, text, ginfo)
    if not report.passed:
        click.echo(f"verification failed: {report.first_failure.name}", err=True)
        sys.exit(EXIT_FAIL)


if __name__ == "__main__":  # pragma: no cover
    main()
