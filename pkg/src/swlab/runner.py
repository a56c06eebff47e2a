"""Named experiment pipelines behind the CLI.

Each scenario kind wires the library modules into one reproducible pipeline,
evaluates its configured thresholds, and emits a machine-readable report plus
plottable dumps.  Everything is deterministic given the config and seed; the
report echoes the config so a run can be reproduced from its artifacts alone.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from swlab import swdf
from swlab.config import ScenarioConfig
from swlab.distance import (ConeSpec, RegularizationSchedule, ball_comparison,
                            subriemannian_distance)
from swlab.extension import (constant_Cs, constant_Ds, extension_by_heat_quadrature,
                             extension_solution, theta, theta_k, theta_many,
                             trace_derivative_limit)
from swlab.geometry import (Grid, assemble_sum_of_squares, build_grid,
                            make_fields)
from swlab.spectral import (ModalCoefficients, eigendecomposition,
                            masuda_residual, project)
from swlab.wave import (WaveState, cfl_max_step, cone_leakage, cutoff_data,
                        energy_report, solve_wave)

SCHEMA_VERSION = 1

# measured worst-case relative overshoot of the stencil metric against the
# exact Euclidean distance (direction sampling, per dimension and radius)
_STENCIL_ERROR_RATE = {(1, 1): 0.0, (1, 2): 0.0, (1, 3): 0.0,
                       (2, 2): 0.028, (2, 3): 0.014,
                       (3, 2): 0.050, (3, 3): 0.032}


def stencil_error_rate(dim: int, radius: int) -> float:
    return _STENCIL_ERROR_RATE.get((dim, radius), 0.06)


@dataclass
class RunReport:
    kind: str
    scenario: dict
    metrics: dict
    checks: dict
    passed: bool
    wall_clock_sec: float
    artifacts: list = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    def to_json_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "scenario": self.scenario,
            "metrics": self.metrics,
            "checks": self.checks,
            "passed": self.passed,
            "wall_clock_sec": self.wall_clock_sec,
            "artifacts": self.artifacts,
        }


def _json_write(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _bump(coords: np.ndarray, center, radius: float) -> np.ndarray:
    """Compactly supported polynomial bump (1 - rho^2)^4 on rho < 1."""
    rel = (coords - np.asarray(center, dtype=float)) / radius
    rho2 = np.sum(rel * rel, axis=1)
    out = np.zeros(coords.shape[0])
    inside = rho2 < 1.0
    out[inside] = (1.0 - rho2[inside]) ** 4
    return out


def _grid_fields(cfg: ScenarioConfig):
    grid = build_grid(cfg.box, cfg.resolution)
    dim = grid.ndim
    fields = make_fields(cfg.preset, dim if cfg.preset == "euclidean" else None)
    if fields.dim != dim:
        raise ValueError(f"preset '{cfg.preset}' is {fields.dim}-dimensional "
                         f"but the grid is {dim}-dimensional")
    return grid, fields


def _source_node(grid: Grid, point) -> int:
    if point is None:
        center = [grid.origin[a] + 0.5 * grid.spacing[a] * (grid.dims[a] - 1)
                  for a in range(grid.ndim)]
        return grid.nearest_node(center)
    return grid.nearest_node(point)


def run_scenario(cfg: ScenarioConfig, out_dir=None) -> RunReport:
    """Execute the configured scenario and write its artifacts."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    artifacts: list = []

    runners = {"kernels": _run_kernels, "distance": _run_distance,
               "wave-cone": _run_wave_cone, "fractional": _run_fractional,
               "masuda": _run_masuda}
    metrics, checks = runners[cfg.kind](cfg, out, artifacts)

    report = RunReport(kind=cfg.kind, scenario=cfg.echo(), metrics=metrics,
                       checks=checks, passed=all(checks.values()),
                       wall_clock_sec=time.perf_counter() - start,
                       artifacts=sorted(artifacts))
    emit_report(report, out)
    return report


def emit_report(report: RunReport, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "report.json"
    _json_write(path, report.to_json_dict())
    return path


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def _run_kernels(cfg: ScenarioConfig, out: Path, artifacts: list):
    p = cfg.params
    th = cfg.thresholds
    s_values = list(p["s_values"])
    lam_values = list(p["lambda_values"])
    t_values = list(p["t_values"])

    c_half_err = abs(constant_Cs(0.5) + 1.0)
    d_errs = {s: abs(constant_Ds(s) - 4.0 ** (1 - s) * math.gamma(1 - s))
              for s in s_values}

    half_err = 0.0
    rows = []
    for s in sorted(set(s_values + [0.5])):
        for lam in lam_values:
            for t in t_values:
                val = theta(lam, t, s)
                val1 = theta_k(lam, t, s, 1)
                if s == 0.5:
                    err = abs(val - math.exp(-math.sqrt(lam) * t))
                    half_err = max(half_err, err)
                else:
                    err = float("nan")
                rows.append((lam, t, s, val, val1, err))

    zero_err = max(abs(theta(lam, 0.0, s) - 1.0)
                   for s in s_values for lam in lam_values)

    rng = np.random.default_rng(cfg.seed)
    mono_violations = 0
    for _ in range(int(p["monotone_samples"])):
        lam = rng.uniform(0.05, 20.0)
        s = rng.uniform(0.05, 0.95)
        t1 = rng.uniform(0.0, 3.0)
        t2 = t1 + rng.uniform(0.01, 1.0)
        if theta(lam, t2, s) >= theta(lam, t1, s):
            mono_violations += 1

    csv_path = out / "kernels.csv"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("lambda,t,s,theta,theta_1,abs_err\n")
        for row in rows:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
    artifacts.append(csv_path.name)

    metrics = {
        "c_half_error": c_half_err,
        "d_closed_form_errors": {repr(s): e for s, e in d_errs.items()},
        "theta_half_max_error": half_err,
        "theta_zero_max_error": zero_err,
        "monotone_violations": mono_violations,
        "c_values": {repr(s): constant_Cs(s) for s in s_values},
    }
    checks = {
        "c_half_matches": c_half_err < th["c_half_tol"],
        "d_matches_closed_form": max(d_errs.values()) < th["d_closed_form_tol"],
        "theta_half_closed_form": half_err < th["theta_half_tol"],
        "theta_at_zero_is_one": zero_err < th["theta_zero_tol"],
        "theta_monotone": mono_violations == 0,
        "c_nonzero": all(abs(v) > 0 for v in metrics["c_values"].values()),
    }
    return metrics, checks


# ---------------------------------------------------------------------------
# distance
# ---------------------------------------------------------------------------

def _run_distance(cfg: ScenarioConfig, out: Path, artifacts: list):
    p = cfg.params
    th = cfg.thresholds
    grid, fields = _grid_fields(cfg)
    source = _source_node(grid, p["source"])
    schedule = RegularizationSchedule.geometric(eps0=p["eps0"],
                                                levels=p["eps_levels"])
    dist_fields, report = subriemannian_distance(grid, fields, source,
                                                 schedule,
                                                 p["stencil_radius"])
    limit = dist_fields[-1]

    if cfg.dump_fields:
        for k, df in enumerate(dist_fields):
            name = f"distance_eps_{k:02d}.swdf"
            swdf.write_distance_field(out / name, df)
            artifacts.append(name)
    _json_write(out / "convergence.json", report.to_json_dict())
    artifacts.append("convergence.json")

    n_nodes = grid.size
    worst_fraction = max((v / n_nodes for v in report.violations), default=0.0)
    viol_below_tau = all(mv <= tau or nv == 0 for mv, tau, nv in
                         zip(report.max_violation, report.tau_mono,
                             report.violations))

    metrics = {
        "eps": report.eps,
        "max_increment": report.max_increment,
        "violations": report.violations,
        "worst_violation_fraction": worst_fraction,
        "converged": report.converged,
        "max_distance": float(np.max(limit.values)),
    }
    checks = {
        "monotone_fraction": worst_fraction <= th["violation_fraction_tol"],
        "violations_below_tau": viol_below_tau,
    }

    if cfg.preset == "euclidean":
        coords = grid.coords()
        rho = np.linalg.norm(coords - grid.node_coords(source), axis=1)
        mask = rho > 0
        l2 = float(np.linalg.norm(limit.values[mask] - rho[mask])
                   / np.linalg.norm(rho[mask]))
        metrics["euclid_l2_rel_error"] = l2
        metrics["euclid_max_rel_error"] = float(
            np.max(np.abs(limit.values[mask] - rho[mask]) / rho[mask]))
        checks["euclid_matches"] = l2 <= th["euclid_l2_tol"]

    if p["target_point"] is not None and p["target_distance"] is not None:
        node = grid.nearest_node(p["target_point"])
        got = float(limit.values[node])
        metrics["target_distance"] = got
        checks["target_distance"] = (abs(got - p["target_distance"])
                                     <= th["target_tol"] * p["target_distance"])

    if p["ball_axis"] is not None:
        bc = ball_comparison(limit, along_axis=p["ball_axis"])
        metrics["ball_exponent"] = bc.delta
        metrics["ball_constant"] = bc.m_upper
        checks["ball_exponent_in_window"] = (th["delta_low"] <= bc.delta
                                             <= th["delta_high"])
    return metrics, checks


# ---------------------------------------------------------------------------
# wave-cone
# ---------------------------------------------------------------------------

def _auto_delta(grid: Grid, radius: int, t0: float, last_increment: float) -> float:
    hmax = max(grid.spacing)
    rate = stencil_error_rate(grid.ndim, radius)
    inc = last_increment if np.isfinite(last_increment) else 0.0
    return 2.0 * (rate * t0 + hmax) + 2.0 * max(inc, 0.0)


def _run_wave_cone(cfg: ScenarioConfig, out: Path, artifacts: list):
    p = cfg.params
    th = cfg.thresholds
    grid, fields = _grid_fields(cfg)
    op = assemble_sum_of_squares(fields, grid, epsilon=0.0)
    source = _source_node(grid, p["source"])

    schedule = RegularizationSchedule.geometric(eps0=p["eps0"],
                                                levels=p["eps_levels"])
    dist_fields, dreport = subriemannian_distance(grid, fields, source,
                                                  schedule,
                                                  p["stencil_radius"])
    dhat = dist_fields[-1]
    t0 = p["t0"]
    delta = p["delta"] if p["delta"] != "auto" else \
        _auto_delta(grid, p["stencil_radius"], t0, dreport.max_increment[-1])

    coords = grid.coords()
    if p["bump_center"] is None:
        margin_ok = grid.interior_margin_mask(0.2)
        candidates = np.where(margin_ok)[0]
        center = coords[candidates[np.argmax(dhat.values[candidates])]]
    else:
        center = np.asarray(p["bump_center"], dtype=float)
    raw = _bump(coords, center, p["bump_radius"])
    ramp = max(delta, 4.0 * max(grid.spacing))
    u0, u1, chi = cutoff_data(raw, np.zeros_like(raw), dhat, t0, delta,
                              inner=t0, outer=t0 + ramp)
    peak = float(np.max(np.abs(u0)))
    if peak < 1e-12:
        raise ValueError("cutoff removed the bump entirely; move bump_center "
                         "outside the metric ball of radius t0")

    dt_max = cfl_max_step(op)
    traj = solve_wave(op, WaveState(u=u0, v=u1), t0,
                      dt=p["dt_factor"] * dt_max,
                      snapshot_stride=max(1, int(round(t0 / (p["dt_factor"] * dt_max)
                                                       / p["snapshots"]))))
    cone = ConeSpec(t0=t0, distance=dhat, margin=delta)
    leak = cone_leakage(traj, cone)
    er = energy_report(traj, op)

    _json_write(out / "leakage.json", leak.to_json_dict())
    artifacts.append("leakage.json")
    if cfg.dump_fields:
        swdf.write_distance_field(out / "distance_estimate.swdf", dhat)
        artifacts.append("distance_estimate.swdf")
        swdf.write_trajectory(out / "trajectory.swdf", traj, grid, op.epsilon)
        artifacts.append("trajectory.swdf")

    metrics = {
        "leakage_ratio": leak.headline_ratio,
        "energy_drift_rel": er.max_drift_rel,
        "delta": delta,
        "dt": traj.dt,
        "steps": traj.steps,
        "data_peak": leak.data_peak,
        "precondition_sup": leak.precondition_sup,
        "bump_center": [float(c) for c in center],
    }
    checks = {
        "precondition_valid": leak.valid,
        "leakage_below_threshold": leak.headline_ratio <= th["leakage_tol"],
        "energy_conserved": er.max_drift_rel <= th["energy_drift_tol"],
    }
    return metrics, checks


# ---------------------------------------------------------------------------
# fractional
# ---------------------------------------------------------------------------

def _run_fractional(cfg: ScenarioConfig, out: Path, artifacts: list):
    p = cfg.params
    th = cfg.thresholds
    grid, fields = _grid_fields(cfg)
    op = assemble_sum_of_squares(fields, grid, epsilon=0.0)
    m = min(p["modes"], grid.size)
    spec = eigendecomposition(op, m)

    coords = grid.coords()
    if p["bump_center"] is None:
        center = [grid.origin[a] + 0.5 * grid.spacing[a] * (grid.dims[a] - 1)
                  for a in range(grid.ndim)]
    else:
        center = p["bump_center"]
    phi = _bump(coords, center, p["bump_radius"])

    s = p["s"]
    t0 = None if p["t0"] == "auto" else p["t0"]
    trace = trace_derivative_limit(spec, phi, s, t0=t0, levels=p["t_levels"])
    _json_write(out / "trace_limit.json", trace.to_json_dict())
    artifacts.append("trace_limit.json")

    # route equivalence on the first few strictly positive modes; numerically
    # zero eigenvalues make the heat-route integrand decay only at tau ~ 1/lam
    lam_floor = max(1e-9, 1e-12 * float(np.max(spec.eigenvalues)))
    positive = np.where(spec.eigenvalues > lam_floor)[0]
    k = min(p["route_modes"], positive.size)
    sel = positive[:k]
    c_trunc = np.zeros(m)
    modal = project(spec, phi)
    c_trunc[sel] = modal.coefficients[sel]
    sub = ModalCoefficients(coefficients=c_trunc, tail=0.0)
    lam_k = max(float(spec.eigenvalues[sel[-1]]), 1.0)
    t_probe = 0.5 / math.sqrt(lam_k)
    u_heat = extension_by_heat_quadrature(spec, sub, s, t_probe)
    u_kern = extension_solution(spec, sub, s, [t_probe]).fields[0]
    scale = float(np.max(np.abs(u_kern)))
    route_diff = float(np.max(np.abs(u_heat - u_kern)))

    metrics = {
        "s": s,
        "modes": m,
        "trace_rel_error": trace.extrapolated_rel_error,
        "trace_raw_errors": trace.raw_rel_errors.tolist(),
        "t_levels": trace.t_levels.tolist(),
        "two_route_max_diff": route_diff,
        "two_route_scale": scale,
        "projection_tail": modal.tail,
    }
    checks = {
        "trace_limit_matches": trace.extrapolated_rel_error <= th["trace_rel_tol"],
        "two_route_equivalence": route_diff <= th["two_route_tol"],
        "extrapolation_monotone": trace.monotone,
    }
    return metrics, checks


# ---------------------------------------------------------------------------
# masuda
# ---------------------------------------------------------------------------

def _run_masuda(cfg: ScenarioConfig, out: Path, artifacts: list):
    p = cfg.params
    th = cfg.thresholds
    grid, fields = _grid_fields(cfg)
    op = assemble_sum_of_squares(fields, grid, epsilon=0.0)
    m = min(p["modes"], grid.size)
    spec = eigendecomposition(op, m)

    coords = grid.coords()
    # off-center bump so both parity classes of low modes carry weight; the
    # heat smoothing keeps the probe's finite-difference error budget pinned
    # to the lowest retained pair
    center = [grid.origin[a] + 0.4 * grid.spacing[a] * (grid.dims[a] - 1)
              for a in range(grid.ndim)]
    extent = min(grid.spacing[a] * (grid.dims[a] - 1) for a in range(grid.ndim))
    raw = _bump(coords, center, 0.3 * extent)
    coeff = project(spec, raw).coefficients \
        * np.exp(-p["smoothing_tau"] * np.maximum(spec.eigenvalues, 0.0))
    u0 = spec.modes @ coeff                             # exact m-mode expansion

    step = p["step"]
    npts = max(5, int(round(2 * p["xi_extent"] / step)) + 1)

    def probe(h):
        xi = (np.arange(npts) - (npts - 1) / 2) * h
        eta = p["eta0"] + np.arange(npts) * h
        return masuda_residual(spec, u0, xi, eta)

    rep = probe(step)
    metrics = {
        "max_rel_residual": rep.max_rel_residual,
        "max_rel_harmonic": rep.max_rel_harmonic,
        "tail": rep.tail,
        "step": step,
        "points_per_axis": npts,
    }
    checks = {
        "residual_below_threshold": rep.max_rel_residual <= th["masuda_residual_tol"],
        "harmonic_below_threshold": rep.max_rel_harmonic <= th["masuda_residual_tol"],
    }
    if p["refine_check"]:
        rep2 = probe(step / 2.0)
        order = math.log2(rep.max_rel_residual / rep2.max_rel_residual) \
            if rep2.max_rel_residual > 0 else float("inf")
        metrics["refined_max_rel_residual"] = rep2.max_rel_residual
        metrics["observed_order"] = order
        checks["second_order_reduction"] = (th["order_min"] <= order
                                            <= th["order_max"])

    _json_write(out / "masuda.json", {
        "xi": rep.xi.tolist(), "eta": rep.eta.tolist(),
        "rel_residual": rep.rel_residual.tolist(),
        "rel_harmonic": rep.rel_harmonic.tolist(),
        "metrics": metrics,
    })
    artifacts.append("masuda.json")
    return metrics, checks
