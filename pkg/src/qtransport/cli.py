"""Command-line front end.

    qtransport stationary --config model.json [--format json|csv] [--out PATH]
    qtransport evolve     --config model.json --initial ground [--format csv|json]
    qtransport sweep      --config model.json [--format csv|json]
    qtransport dark       --config model.json

Exit codes: 0 success, 2 configuration error, 3 numerical-quality failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import ModelConfig, complex_matrix_from_pairs, load_config
from .dynamics import evolve
from .errors import AmbiguityError, ConfigError, DomainError, IntegrationQualityError, PreconditionError
from .liouvillian import apply_total, build_superoperator, total_rate
from .model import bright_geometry, build_rates
from .stationary import (
    generator_residual,
    stationary_alpha0,
    stationary_general,
    stationary_numeric,
    state_from_matrix,
)
from .transport import dark_basis, dark_projector, flow_alpha0, flow_from_state, flow_general, sweep

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
SELECTORS = ("ground", "sink", "bright_chi", "bright_psi", "dark")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _pairs(arr) -> list:
    arr = np.asarray(arr)
    if arr.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in arr]
    return [_pairs(row) for row in arr]


def _state_dict(st, rates, residual: float) -> dict:
    return {
        "rho00": st.rho00,
        "rho11": st.rho11,
        "rho_psipsi": st.rho_psipsi,
        "rho_etaeta": st.rho_etaeta,
        "rho_psieta": st.rho_psieta,
        "rho_psieta_imag": st.rho_psieta_imag,
        "F": flow_from_state(rates, st).F,
        "residual": residual,
    }


def cmd_stationary(cfg: ModelConfig, fmt_name: str = "json") -> tuple[str, int]:
    rates = build_rates(cfg.system, cfg.reservoirs)
    geom = bright_geometry(cfg.system)
    L = build_superoperator(rates, geom)
    states, notes = {}, {}

    if not geom.has_eta:
        states["analytic_alpha0"] = stationary_alpha0(rates, geom.norm_chi**2, geom.norm_psi**2, geom)
    if rates.lamb_zero:
        if geom.has_eta:
            states["analytic_general"] = stationary_general(rates, geom)
    else:
        notes["analytic_general"] = "skipped: Lamb shifts are nonzero"
    kernel = {"full": L.kernel_dimension(), "restricted": None}
    try:
        num = stationary_numeric(L, geom)
        states["numeric_nullspace"] = num
        kernel["restricted"] = num.restricted_kernel_dim
    except AmbiguityError as exc:
        kernel["restricted"] = exc.dimension
        notes["numeric_nullspace"] = str(exc)

    residuals = {m: generator_residual(rates, geom, st.full_rho) for m, st in states.items()}
    coords = [st.coordinates for st in states.values()]
    deviation = max((float(np.max(np.abs(a - b))) for a in coords for b in coords), default=0.0)

    flows = {}
    if rates.lamb_zero:
        fg = flow_general(rates, geom)
        flows["closed_form_general"] = fg.F
        if fg.F_exponential is not None:
            flows["closed_form_exponential"] = fg.F_exponential
    if not geom.has_eta:
        try:
            flows["closed_form_alpha0"] = flow_alpha0(rates, geom.norm_chi**2, geom.norm_psi**2, geom).F
        except PreconditionError as exc:
            notes["closed_form_alpha0"] = str(exc)

    ref = next(iter(states.values())) if states else None
    betas = [cfg.reservoirs[k].beta for k in ("em", "ph", "sink")]
    ratios = None
    if ref is not None and ref.rho00 > 0.0:
        ratios = {
            "rho_psipsi/rho00": ref.rho_psipsi / ref.rho00,
            "rho_etaeta/rho00": ref.rho_etaeta / ref.rho00,
            "rho11/rho00": ref.rho11 / ref.rho00,
        }
    gibbs = None
    if betas[0] == betas[1] == betas[2]:
        b, s = betas[0], cfg.system
        gibbs = {
            "rho_psipsi/rho00": math.exp(-b * (s.eps2 - s.eps0)),
            "rho11/rho00": math.exp(-b * (s.eps1 - s.eps0)),
        }

    failed = (
        not states
        or max(residuals.values()) > cfg.solver.residual_tol
        or deviation > cfg.solver.deviation_tol
    )
    report = {
        "alpha": geom.alpha,
        "cos_alpha": geom.cos_alpha,
        "methods": {m: _state_dict(st, rates, residuals[m]) for m, st in states.items()},
        "max_deviation": deviation,
        "kernel_dimension": kernel,
        "F": flow_from_state(rates, ref).F if ref is not None else None,
        "closed_form_flows": flows,
        "ratios": ratios,
        "gibbs_ratios": gibbs,
        "notes": notes,
        "status": "fail" if failed else "ok",
        "config": cfg.to_dict(),
    }
    if fmt_name == "csv":
        header = ["method", "rho00", "rho11", "rho_psipsi", "rho_etaeta", "rho_psieta", "F", "residual"]
        rows = []
        for m, d in report["methods"].items():
            rows.append([m] + [float(d[k]) for k in header[1:]])
        text = _csv_text(header, rows)
    else:
        text = json.dumps(report, indent=2) + "\n"
    return text, EXIT_NUMERIC if failed else EXIT_OK


def initial_state(cfg: ModelConfig, selector: str) -> np.ndarray:
    geom = bright_geometry(cfg.system)
    dim = geom.dim

    def pure(ket):
        return np.outer(ket, ket.conj())

    if selector == "ground":
        ket = np.zeros(dim, dtype=complex)
        ket[0] = 1.0
        return pure(ket)
    if selector == "sink":
        ket = np.zeros(dim, dtype=complex)
        ket[1] = 1.0
        return pure(ket)
    if selector == "bright_chi":
        return pure(geom.embed(geom.chi_hat))
    if selector == "bright_psi":
        return pure(geom.embed(geom.psi_hat))
    if selector == "dark":
        basis = dark_basis(geom)
        if basis.shape[1] == 0:
            raise ConfigError("no dark direction exists (needs M >= 3, or chi parallel to psi with M >= 2)")
        return pure(geom.embed(basis[:, 0]))
    path = Path(selector)
    if not path.exists():
        raise ConfigError(f"--initial must be one of {', '.join(SELECTORS)} or a matrix file, got {selector!r}")
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read initial matrix {selector}: {exc}") from exc
    rho = complex_matrix_from_pairs(raw, "initial")
    if rho.shape != (dim, dim):
        raise ConfigError(f"initial: matrix must be {dim}x{dim}")
    return rho


def cmd_evolve(cfg: ModelConfig, selector: str, fmt_name: str = "csv") -> tuple[str, str, int]:
    rates = build_rates(cfg.system, cfg.reservoirs)
    geom = bright_geometry(cfg.system)
    rho0 = initial_state(cfg, selector)
    scale = total_rate(rates, geom)
    dt = cfg.solver.dt if cfg.solver.dt is not None else 0.05 / scale
    if cfg.solver.t_end is not None:
        t_end = cfg.solver.t_end
    else:
        # 30 e-foldings of the slowest decaying mode bring it below ~1e-13
        gap, _ = build_superoperator(rates, geom).spectral_bounds()
        t_end = max(200.0 / scale, 30.0 / gap) if gap > 0.0 else 200.0 / scale
    try:
        tr = evolve(rates, geom, rho0, t_end, dt, sample_every=cfg.solver.sample_every)
    except DomainError as exc:
        raise ConfigError(f"initial/solver: {exc}") from exc

    header = ["time", "rho00", "rho11", "rho_psipsi", "rho_etaeta", "re_rho_psieta", "trace"]
    rows = []
    for t, rho in zip(tr.times, tr.states):
        st = state_from_matrix(geom, rho)
        rows.append([t, st.rho00, st.rho11, st.rho_psipsi, st.rho_etaeta, st.rho_psieta, float(np.trace(rho).real)])
    summary = {
        "trace_drift": tr.trace_drift,
        "min_eigenvalue_seen": tr.min_eigenvalue_seen,
        "converged": tr.converged,
        "final_residual": tr.final_residual,
        "dt": dt,
        "t_end": t_end,
    }
    if fmt_name == "json":
        text = json.dumps({"columns": header, "rows": rows, **summary}, indent=2) + "\n"
    else:
        text = _csv_text(header, rows)
    note = (
        f"trace_drift={fmt(tr.trace_drift)} min_eigenvalue={fmt(tr.min_eigenvalue_seen)} "
        f"converged={str(tr.converged).lower()} final_residual={fmt(tr.final_residual)}\n"
    )
    return text, note, EXIT_OK


def cmd_sweep(cfg: ModelConfig, fmt_name: str = "csv") -> tuple[str, str, int]:
    if cfg.sweep is None:
        raise ConfigError("sweep: the config has no sweep section")
    table = sweep(cfg.system, cfg.reservoirs, cfg.sweep.parameter, cfg.sweep.grid)
    header = ["parameter", "F", "rho00", "rho11", "rho_psipsi", "rho_etaeta", "residual"]
    rows = [[p.value, p.F, p.rho00, p.rho11, p.rho_psipsi, p.rho_etaeta, p.residual] for p in table.points]
    flagged = [p.value for p in table.points if p.flagged]
    notes = [f"sweep {table.parameter}: {len(rows)} points, F {table.monotonicity()}"]
    if table.parameter == "gamma0_em":
        change = table.final_decade_change()
        notes.append(
            "saturation: final-decade relative change of F = "
            + ("n/a" if change is None else fmt(change))
        )
    if flagged:
        notes.append("flagged points (residual above tolerance): " + ", ".join(fmt(v) for v in flagged))
    if fmt_name == "json":
        text = json.dumps(
            {
                "parameter": table.parameter,
                "columns": header,
                "rows": rows,
                "monotonicity": table.monotonicity(),
                "final_decade_change": table.final_decade_change() if table.parameter == "gamma0_em" else None,
                "flagged": flagged,
            },
            indent=2,
        ) + "\n"
    else:
        text = _csv_text(header, rows)
    return text, "\n".join(notes) + "\n", EXIT_NUMERIC if flagged else EXIT_OK


def cmd_dark(cfg: ModelConfig, fmt_name: str = "json") -> tuple[str, int]:
    rates = build_rates(cfg.system, cfg.reservoirs)
    geom = bright_geometry(cfg.system)
    proj = dark_projector(geom)
    basis = dark_basis(geom)
    residuals = []
    for k in range(basis.shape[1]):
        ket = geom.embed(basis[:, k])
        residuals.append(float(np.max(np.abs(apply_total(rates, geom, np.outer(ket, ket.conj()))))))
    if fmt_name == "csv":
        header = ["index", "residual"] + [f"{part}{j}" for j in range(geom.M) for part in ("re", "im")]
        rows = []
        for k in range(basis.shape[1]):
            comps = [float(v) for z in basis[:, k] for v in (z.real, z.imag)]
            rows.append([k, residuals[k]] + comps)
        return _csv_text(header, rows), EXIT_OK
    report = {
        "rank": basis.shape[1],
        "projector": _pairs(proj),
        "basis": [_pairs(basis[:, k]) for k in range(basis.shape[1])],
        "generator_residuals": residuals,
        "lamb_zero": rates.lamb_zero,
        "sin2_alpha": geom.sin_alpha**2,
        "cos2_alpha": geom.cos_alpha**2,
    }
    return json.dumps(report, indent=2) + "\n", EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtransport", description=__doc__.split("\n\n")[0])
    parser.add_argument("verb", choices=("stationary", "evolve", "sweep", "dark"))
    parser.add_argument("--config", required=True, metavar="PATH")
    parser.add_argument("--out", metavar="PATH", help="write the result here instead of stdout")
    parser.add_argument("--initial", default="ground", metavar="SELECTOR",
                        help=f"evolve start: {', '.join(SELECTORS)} or a JSON matrix of [re, im] pairs")
    parser.add_argument("--format", choices=("csv", "json"), default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    note = ""
    try:
        cfg = load_config(args.config)
        if args.verb == "stationary":
            text, code = cmd_stationary(cfg, args.format or "json")
        elif args.verb == "evolve":
            text, note, code = cmd_evolve(cfg, args.initial, args.format or "csv")
        elif args.verb == "sweep":
            text, note, code = cmd_sweep(cfg, args.format or "csv")
        else:
            text, code = cmd_dark(cfg, args.format or "json")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationQualityError, AmbiguityError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if note:
        sys.stderr.write(note)
    return code


if __name__ == "__main__":
    sys.exit(main())
