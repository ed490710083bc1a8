#!/usr/bin/env python3
"""Generate the standard demonstration datasets.

Writes four CSV files into the output directory:

  radial_N0.csv    radial eigenfunctions, D=3, c=20pi, N=0, n=0..5
  radial_N1.csv    same at N=1
  decay_nu.csv     |nu| per (N, n) for N=0..3, n=0..60
  decay_deficit.csv  energy deficit 1-|nu|^2 for the same sweep

With --plot (requires matplotlib) also renders quick-look PNGs of the
sample curves and the decay profiles.
"""

import argparse
import math
from pathlib import Path

from prol.cli import JobSpec, run_eigentable, run_eval


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path}")


def radial_tables(out_dir: Path, c: float, grid_points: int) -> dict:
    tables = {}
    for N in (0, 1):
        spec = JobSpec(p=1, c=c, N_list=(N,), n_max=5, grid_points=grid_points)
        payload = run_eval(spec, "radial")
        x = payload["x"]
        columns = [s["values"] for s in payload["series"]]
        header = ["x"] + [f"Phi_N{N}_n{s['n']}" for s in payload["series"]]
        rows = [[x[i]] + [col[i] for col in columns] for i in range(len(x))]
        write_csv(out_dir / f"radial_N{N}.csv", header, rows)
        tables[N] = (x, payload["series"])
    return tables


def decay_tables(out_dir: Path, c: float) -> list[dict]:
    spec = JobSpec(p=1, c=c, N_list=(0, 1, 2, 3), n_max=60)
    payload = run_eigentable(spec)
    rows = payload["rows"]
    write_csv(
        out_dir / "decay_nu.csv",
        ["N", "n", "nu_mag"],
        [[r["N"], r["n"], r["nu_mag"]] for r in rows],
    )
    write_csv(
        out_dir / "decay_deficit.csv",
        ["N", "n", "energy_deficit"],
        [[r["N"], r["n"], r["energy_deficit"]] for r in rows],
    )
    return rows


def render_plots(out_dir: Path, radial, decay_rows) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for N, (x, series) in radial.items():
        fig, ax = plt.subplots(figsize=(8, 5))
        for s in series:
            ax.plot(x, s["values"], lw=1.0, label=f"n={s['n']}")
        ax.set_xlabel("x")
        ax.set_ylabel(f"radial eigenfunction, N={N}")
        ax.legend()
        fig.tight_layout()
        fig.savefig(out_dir / f"radial_N{N}.png", dpi=150)
        plt.close(fig)
        print(f"wrote {out_dir / f'radial_N{N}.png'}")

    fig, axes = plt.subplots(1, 2, figsize=(12, 5))
    for N in (0, 1, 2, 3):
        ns = [r["n"] for r in decay_rows if r["N"] == N]
        nu = [max(r["nu_mag"], 1e-18) for r in decay_rows if r["N"] == N]
        deficit = [max(r["energy_deficit"], 1e-18) for r in decay_rows if r["N"] == N]
        axes[0].semilogy(ns, nu, marker=".", lw=0.8, label=f"N={N}")
        axes[1].semilogy(ns, deficit, marker=".", lw=0.8, label=f"N={N}")
    axes[0].set_xlabel("n")
    axes[0].set_ylabel("|nu|")
    axes[1].set_xlabel("n")
    axes[1].set_ylabel("energy deficit")
    for ax in axes:
        ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / "decay.png", dpi=150)
    plt.close(fig)
    print(f"wrote {out_dir / 'decay.png'}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("figure_data"))
    parser.add_argument("--c", type=float, default=20.0 * math.pi)
    parser.add_argument("--grid", type=int, default=512)
    parser.add_argument("--plot", action="store_true", help="also render PNGs")
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    radial = radial_tables(args.out, args.c, args.grid)
    decay_rows = decay_tables(args.out, args.c)
    if args.plot:
        render_plots(args.out, radial, decay_rows)


if __name__ == "__main__":
    main()
