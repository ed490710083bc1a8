"""Command-line interface.

Four subcommands: ``eigensystem`` writes coefficient files, ``eval``
samples radial functions on a grid, ``eigentable`` emits eigenvalue decay
tables, and ``verify`` runs the quadrature/finite-difference verification
suite and reports pass/fail per check.

Output is deterministic for a fixed invocation and build: floats are
serialized with shortest round-trip decimals and records are ordered by
(N, n). Independent angular orders may be computed in parallel; the
PROL_NUM_THREADS environment variable caps the thread count.
"""

from __future__ import annotations

import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from . import __version__
from .errors import ProlError
from .gpsf_assembly import (
    EigenvalueTable,
    RadialGpsf,
    ZernikeExpansion,
    assemble_radial_gpsfs,
    eigenvalue_chain,
    gamma_first,
)
from .oracle import (
    OracleConfig,
    check_integral_residual,
    check_L_identity,
    gamma_by_quadrature,
)
from .special_functions import gauss_legendre_01, log_gamma, zernike_normalized_table
from .spectral_core import (
    EigenSystem,
    ProblemParams,
    build_operator,
    eigendecompose,
    solve_eigensystem,
)

__all__ = [
    "JobSpec",
    "parse_bandlimit",
    "run_eigensystem",
    "run_eval",
    "run_eigentable",
    "run_verify",
    "load_records",
    "records_to_gpsfs",
    "main",
]

_L_IDENTITY_SAMPLES = (0.05, 0.275, 0.5, 0.725, 0.95)

# verify tolerances; dual-path comparisons below this absolute difference
# carry no float64 information and are not held to the relative bound
_DUAL_PATH_ABS_FLOOR = 5e-14


@dataclass(frozen=True)
class JobSpec:
    """Resolved parameters of one CLI invocation."""

    p: int
    c: float
    N_list: tuple[int, ...]
    n_max: int
    grid_points: int = 257
    output_format: str = "json"
    output_path: str | None = None
    quadrature_size: int | None = None
    truncation_tol: float = 1e-14

    def __post_init__(self):
        if self.p < 0:
            raise ValueError("p must be non-negative (dimension at least 2)")
        if not self.c > 0.0:
            raise ValueError("bandlimit must be positive")
        if not self.N_list:
            raise ValueError("at least one angular order is required")
        if any(N < 0 for N in self.N_list):
            raise ValueError("angular orders must be non-negative")
        if self.n_max < 0:
            raise ValueError("n_max must be non-negative")
        if self.grid_points < 2:
            raise ValueError("grid must have at least 2 points")
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"unknown output format {self.output_format!r}")

    def oracle_config(self) -> OracleConfig:
        return OracleConfig(quadrature_size=self.quadrature_size)


def parse_bandlimit(text: str) -> float:
    """Parse a bandlimit given as a decimal or as '<number>pi'."""
    t = text.strip().lower().replace(" ", "")
    if t.endswith("pi"):
        head = t[:-2]
        return (float(head) if head else 1.0) * math.pi
    return float(t)


def _thread_count(n_items: int) -> int:
    env = os.environ.get("PROL_NUM_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, n_items))


def _map_over_orders(fn, items: list):
    workers = _thread_count(len(items))
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _solve_all(spec: JobSpec) -> tuple[int, list[tuple[int, EigenSystem, EigenvalueTable]]]:
    """Solve every angular order at a common truncation size."""

    def solve(N: int) -> EigenSystem:
        return solve_eigensystem(ProblemParams(spec.p, spec.c, N), spec.n_max, spec.truncation_tol)

    systems = _map_over_orders(solve, list(spec.N_list))
    K = max(system.operator.size for system in systems)
    out = []
    for N, system in zip(spec.N_list, systems):
        params = ProblemParams(spec.p, spec.c, N)
        if system.operator.size < K:
            system = eigendecompose(build_operator(params, K), spec.n_max + 1)
        table = eigenvalue_chain(params, system, spec.n_max)
        out.append((N, system, table))
    return K, out


def _meta(spec: JobSpec, K: int, **extra) -> dict:
    meta = {"p": spec.p, "c": float(spec.c), "version": __version__, "K": K}
    meta.update(extra)
    return meta


def run_eigensystem(spec: JobSpec) -> dict:
    """Coefficient payload: one record per (N, n) with the full chain."""
    K, solved = _solve_all(spec)
    records = []
    for N, system, table in solved:
        alpha = table.alpha_magnitude
        for n in range(spec.n_max + 1):
            records.append(
                {
                    "N": N,
                    "n": n,
                    "chi": float(table.chi[n]),
                    "gamma": float(table.gamma[n]),
                    "beta": float(table.beta[n]),
                    "alpha_mag": float(alpha[n]),
                    "nu_mag": float(table.nu_magnitude[n]),
                    "phase_order": table.phase_order,
                    "energy_deficit": float(table.energy_deficit[n]),
                    "coeffs": [float(v) for v in system.vectors[n]],
                }
            )
    return {"meta": _meta(spec, K), "records": records}


def run_eval(spec: JobSpec, which: str) -> dict:
    """Sample table of radial (or weighted radial) functions on a
    uniform grid."""
    if which not in ("radial", "weighted"):
        raise ValueError(f"unknown eval kind {which!r}")
    K, solved = _solve_all(spec)
    x = np.linspace(0.0, 1.0, spec.grid_points)
    series = []
    for N, system, _ in solved:
        basis = zernike_normalized_table(spec.p, N, K, x)
        values = system.vectors[: spec.n_max + 1] @ basis
        if which == "weighted":
            values = values * x ** ((spec.p + 1) / 2.0)
        for n in range(spec.n_max + 1):
            series.append({"N": N, "n": n, "values": [float(v) for v in values[n]]})
    return {
        "meta": _meta(spec, K, kind=which, grid_points=spec.grid_points),
        "x": [float(v) for v in x],
        "series": series,
    }


def run_eigentable(spec: JobSpec) -> dict:
    """Eigenvalue decay rows suitable for log-scale plotting."""
    K, solved = _solve_all(spec)
    rows = []
    for N, _, table in solved:
        if np.any(table.nu_magnitude > 1.0 + 1e-10):
            raise ProlError(
                f"eigenvalue magnitude exceeds 1 at N={N}: "
                f"max {table.nu_magnitude.max()!r}"
            )
        for row in table.rows():
            rows.append(
                {
                    "N": N,
                    "n": row.n,
                    "nu_mag": row.nu_magnitude,
                    "energy_deficit": row.energy_deficit,
                    "gamma": row.gamma,
                    "beta": row.beta,
                    "below_chain_precision": row.below_chain_precision,
                }
            )
    return {"meta": _meta(spec, K), "rows": rows}


def _check_zernike_orthonormality(spec: JobSpec) -> float:
    # the weighted family shares the same integrand, so one gram per N
    worst = 0.0
    count = 31
    for N in spec.N_list:
        rule = gauss_legendre_01(4 * (count - 1) + N + spec.p + 4)
        basis = zernike_normalized_table(spec.p, N, count, rule.nodes)
        gram = (basis * (rule.weights * rule.nodes ** (spec.p + 1))) @ basis.T
        worst = max(worst, float(np.max(np.abs(gram - np.eye(count)))))
    return worst


def _fault_injected(system: EigenSystem) -> EigenSystem:
    vectors = system.vectors.copy()
    vectors[0][min(3, vectors.shape[1] - 1)] += 1e-4
    return EigenSystem(operator=system.operator, chi=system.chi, vectors=vectors)


def run_verify(spec: JobSpec, inject_fault: bool = False) -> tuple[list[str], bool]:
    """Run the verification suite; returns (report lines, all passed)."""
    cfg = spec.oracle_config()
    K, solved = _solve_all(spec)
    if inject_fault:
        solved = [(N, _fault_injected(system), table) for N, system, table in solved]

    checks: list[tuple[str, float, float]] = []

    checks.append(("zernike-orthonormality", _check_zernike_orthonormality(spec), 1e-12))

    worst = 0.0
    for _, system, _ in solved:
        worst = max(worst, float(system.residuals().max()) / system.operator.norm_inf())
    checks.append(("eigen-residual", worst, 1e-12))

    worst = 0.0
    for N, _, _ in solved:
        params = ProblemParams(spec.p, spec.c, N)
        for n in range(min(spec.n_max, 20) + 1):
            worst = max(worst, check_L_identity(params, n, _L_IDENTITY_SAMPLES, cfg))
    checks.append(("L-identity", worst, 1e-5))

    worst = 0.0
    for N, system, table in solved:
        params = ProblemParams(spec.p, spec.c, N)
        residuals = check_integral_residual(params, table, system, cfg)
        worst = max(worst, float(residuals[: min(spec.n_max, 10) + 1].max()))
    checks.append(("integral-residual", worst, 1e-10))

    worst = 0.0
    for N, system, table in solved:
        params = ProblemParams(spec.p, spec.c, N)
        gpsfs = assemble_radial_gpsfs(params, system, table)
        for n in range(spec.n_max + 1):
            if abs(table.gamma[n]) <= 1e-12:
                continue
            other = gamma_by_quadrature(params, gpsfs[n], cfg)
            diff = abs(other - table.gamma[n])
            if diff <= _DUAL_PATH_ABS_FLOOR:
                continue
            worst = max(worst, diff / abs(table.gamma[n]))
    checks.append(("gamma-dual-path", worst, 1e-9))

    if spec.c <= 0.01:
        worst = 0.0
        for N, system, table in solved:
            params = ProblemParams(spec.p, spec.c, N)
            s = params.half_order
            expected = (
                2.0**-s
                * spec.c ** (s + 0.5)
                / ((2 * N + spec.p + 2) * math.exp(log_gamma(s + 1.0)))
            )
            first = gamma_first(params, ZernikeExpansion(spec.p, N, system.vectors[0]))
            quad = gamma_by_quadrature(params, assemble_radial_gpsfs(params, system, table)[0], cfg)
            worst = max(
                worst,
                abs(first - expected) / expected,
                abs(quad - expected) / expected,
            )
        checks.append(("small-c-asymptotic", worst, 1e-3))

    lines = []
    all_pass = True
    for name, value, tol in checks:
        ok = value <= tol
        all_pass &= ok
        lines.append(f"{name:24s} max residual {value:.3e}   tol {tol:.1e}   {'PASS' if ok else 'FAIL'}")
    lines.append(
        f"verification {'PASSED' if all_pass else 'FAILED'} "
        f"({sum(v <= t for _, v, t in checks)}/{len(checks)} checks)"
    )
    return lines, all_pass


def _format_csv(payload: dict) -> str:
    """Flatten a payload into locale-independent CSV."""

    def fmt(value) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return repr(value)
        return str(value)

    lines = []
    if "records" in payload:
        n_coeffs = len(payload["records"][0]["coeffs"])
        head = [k for k in payload["records"][0] if k != "coeffs"]
        lines.append(",".join(head + [f"coeff_{i}" for i in range(n_coeffs)]))
        for rec in payload["records"]:
            lines.append(",".join([fmt(rec[k]) for k in head] + [fmt(v) for v in rec["coeffs"]]))
    elif "series" in payload:
        kind = payload["meta"]["kind"]
        prefix = "Phi" if kind == "radial" else "phi"
        names = [f"{prefix}_N{s['N']}_n{s['n']}" for s in payload["series"]]
        lines.append(",".join(["x"] + names))
        columns = [s["values"] for s in payload["series"]]
        for i, x in enumerate(payload["x"]):
            lines.append(",".join([fmt(x)] + [fmt(col[i]) for col in columns]))
    elif "rows" in payload:
        head = list(payload["rows"][0])
        lines.append(",".join(head))
        for row in payload["rows"]:
            lines.append(",".join(fmt(row[k]) for k in head))
    else:
        raise ValueError("payload has no tabular section")
    return "\n".join(lines) + "\n"


def _emit(payload: dict, spec: JobSpec) -> None:
    if spec.output_format == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = _format_csv(payload)
    if spec.output_path is None:
        click.echo(text, nl=False)
    else:
        Path(spec.output_path).write_text(text)
        click.echo(f"wrote {spec.output_path}", err=True)


def load_records(path) -> dict:
    """Read back a JSON coefficient file produced by the eigensystem
    command."""
    return json.loads(Path(path).read_text())


def records_to_gpsfs(payload: dict) -> list[RadialGpsf]:
    """Rebuild RadialGpsf values from a loaded coefficient payload."""
    meta = payload["meta"]
    out = []
    for rec in payload["records"]:
        params = ProblemParams(p=meta["p"], c=meta["c"], N=rec["N"])
        out.append(
            RadialGpsf(
                params=params,
                n=rec["n"],
                expansion=ZernikeExpansion(p=meta["p"], N=rec["N"], coeffs=np.array(rec["coeffs"])),
                chi=rec["chi"],
                gamma=rec["gamma"],
                beta=rec["beta"],
                nu_magnitude=rec["nu_mag"],
                phase_order=rec["phase_order"],
            )
        )
    return out


def _build_spec(
    dim, p_value, c_text, n_orders, n_max, grid_points, output_format, output_path,
    quad_size, trunc_tol, *, default_c=None, default_orders=(0,)
) -> JobSpec:
    if dim is not None and p_value is not None and dim - 2 != p_value:
        raise click.UsageError("--dim and --p disagree; pass only one")
    if p_value is not None:
        p = p_value
    elif dim is not None:
        if dim < 2:
            raise click.UsageError("--dim must be at least 2")
        p = dim - 2
    else:
        p = 1
    if c_text is None:
        if default_c is None:
            raise click.UsageError("--c is required")
        c_text = default_c
    try:
        c = parse_bandlimit(c_text)
    except ValueError as exc:
        raise click.UsageError(f"cannot parse bandlimit {c_text!r}: {exc}") from exc
    orders = tuple(n_orders) if n_orders else tuple(default_orders)
    try:
        return JobSpec(
            p=p,
            c=c,
            N_list=orders,
            n_max=n_max,
            grid_points=grid_points,
            output_format=output_format,
            output_path=output_path,
            quadrature_size=quad_size,
            truncation_tol=trunc_tol,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _shared_options(fn):
    options = [
        click.option("--dim", "-D", "dim", type=int, default=None,
                     help="Ball dimension (at least 2). Default 3."),
        click.option("--p", "p_value", type=int, default=None,
                     help="Dimension minus two; alternative to --dim."),
        click.option("--c", "c_text", default=None,
                     help="Bandlimit; decimal or '<number>pi', e.g. 20pi."),
        click.option("--N", "n_orders", type=int, multiple=True,
                     help="Angular order; repeatable. Default 0."),
        click.option("--n-max", type=int, default=10, show_default=True,
                     help="Largest radial index."),
        click.option("--grid", "grid_points", type=int, default=257, show_default=True,
                     help="Grid size for sample tables."),
        click.option("--format", "output_format", type=click.Choice(["json", "csv"]),
                     default="json", show_default=True),
        click.option("--out", "output_path",
                     type=click.Path(dir_okay=False, writable=True), default=None,
                     help="Output file; stdout when omitted."),
        click.option("--quad-size", "quad_size", type=int, default=None,
                     help="Override the oracle quadrature size."),
        click.option("--trunc-tol", "trunc_tol", type=float, default=1e-14,
                     show_default=True, help="Eigenvector tail tolerance."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


@click.group()
@click.version_option(__version__, prog_name="prol")
def cli():
    """Band-limited eigenfunctions on the D-dimensional ball.

    Computes the radial eigenfunctions of the truncated Fourier transform
    together with their eigenvalue chains, and verifies them against an
    independent quadrature oracle.
    """


@cli.command()
@_shared_options
def eigensystem(dim, p_value, c_text, n_orders, n_max, grid_points, output_format,
                output_path, quad_size, trunc_tol):
    """Write expansion coefficients and eigenvalues per (N, n)."""
    spec = _build_spec(dim, p_value, c_text, n_orders, n_max, grid_points,
                       output_format, output_path, quad_size, trunc_tol)
    _emit(run_eigensystem(spec), spec)


@cli.command("eval")
@_shared_options
@click.option("--kind", type=click.Choice(["radial", "weighted"]), default="radial",
              show_default=True, help="Sample the radial function or its weighted form.")
def eval_cmd(dim, p_value, c_text, n_orders, n_max, grid_points, output_format,
             output_path, quad_size, trunc_tol, kind):
    """Sample radial functions on a uniform grid over [0, 1]."""
    spec = _build_spec(dim, p_value, c_text, n_orders, n_max, grid_points,
                       output_format, output_path, quad_size, trunc_tol)
    _emit(run_eval(spec, kind), spec)


@cli.command()
@_shared_options
def eigentable(dim, p_value, c_text, n_orders, n_max, grid_points, output_format,
               output_path, quad_size, trunc_tol):
    """Emit eigenvalue magnitude and energy-deficit decay tables."""
    spec = _build_spec(dim, p_value, c_text, n_orders, n_max, grid_points,
                       output_format, output_path, quad_size, trunc_tol)
    _emit(run_eigentable(spec), spec)


@cli.command()
@_shared_options
@click.option("--inject-fault", is_flag=True, hidden=True,
              help="Perturb one coefficient to exercise the failure path.")
def verify(dim, p_value, c_text, n_orders, n_max, grid_points, output_format,
           output_path, quad_size, trunc_tol, inject_fault):
    """Run the verification suite; exit status 0 only if every check
    passes."""
    spec = _build_spec(dim, p_value, c_text, n_orders, n_max, grid_points,
                       output_format, output_path, quad_size, trunc_tol,
                       default_c="20pi", default_orders=(0, 1))
    lines, ok = run_verify(spec, inject_fault=inject_fault)
    for line in lines:
        click.echo(line)
    if not ok:
        sys.exit(1)


def main():
    cli()


if __name__ == "__main__":
    main()
