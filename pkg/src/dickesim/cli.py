"""Batch front-end: simulations, sweeps, planners and analytics from JSON configs.

Every command reads a single JSON config (flags override config fields) and
emits machine-readable CSV or JSON; with --plot, report figures are rendered
next to the delimited output.  Outputs are deterministic: identical configs
give byte-identical files, and parallel sweeps preserve input order.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analytics, photonics, reporting
from .dynamics import PhysicalParams, fidelity, run_sequence
from .protocol import (
    PulseSequence,
    TargetSuperposition,
    optimal_detuning,
    plan_superposition,
)
from .state_space import basis_state, build_basis

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2


class ConfigError(Exception):
    pass


def _load_config(path: str | None) -> dict:
    if path is None:
        raise ConfigError("a --config file is required")
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return doc


def _require(config: dict, key: str):
    if key not in config:
        raise ConfigError(f"config is missing required field {key!r}")
    return config[key]


def _params_from_config(config: dict) -> PhysicalParams:
    n_atoms = int(_require(config, "n_atoms"))
    if "p1d" in config:
        return PhysicalParams.from_purcell(n_atoms, float(config["p1d"]))
    if "gamma_star" in config:
        return PhysicalParams(n_atoms=n_atoms, gamma_star=float(config["gamma_star"]))
    raise ConfigError("config needs either 'p1d' or 'gamma_star'")


def _target_from_spec(spec: dict) -> tuple[TargetSuperposition, str]:
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError("target must be an object with a 'type' field")
    kind = spec["type"]
    if kind == "fock":
        m = int(_require(spec, "m"))
        return TargetSuperposition.fock(m), f"D{m}"
    if kind == "phi":
        m = int(_require(spec, "m"))
        return TargetSuperposition.phi(m), f"Phi{m}"
    if kind == "coefficients":
        values = _require(spec, "values")
        coeffs = [complex(v[0], v[1]) for v in values]
        return TargetSuperposition.from_unnormalized(coeffs), "custom"
    raise ConfigError(f"unknown target type {kind!r}")


def _drive_settings(config: dict) -> dict:
    drive = dict(config.get("drive", {}))
    return {
        "omega_r_factor": float(drive.get("omega_r_factor", 0.01)),
        "omega_c": float(drive.get("omega_c", 0.02)),
        "delta_e": drive.get("delta_e"),  # None -> optimal
        "k_max": int(drive.get("k_max", 2)),
    }


def _plan_for(target: TargetSuperposition, params: PhysicalParams, drive: dict):
    delta = (
        float(drive["delta_e"])
        if drive["delta_e"] is not None
        else optimal_detuning(params)
    )
    omega_r = drive["omega_r_factor"] * delta
    seq = plan_superposition(target, params.n_atoms, omega_r, delta, drive["omega_c"])
    return seq, delta


def _simulate_target(target: TargetSuperposition, params: PhysicalParams, drive: dict):
    seq, delta = _plan_for(target, params, drive)
    basis = build_basis(params.n_atoms, max(target.m_max, 1), drive["k_max"])
    initial = basis_state(basis, 0, 0, "g")
    traj = run_sequence(seq, initial, params)
    target_state = target.state_vector(basis)
    fids = [fidelity(state, target_state) for state in traj.states]
    fids_renorm = [
        fidelity(state, target_state, renormalize=True) for state in traj.states
    ]
    return {
        "sequence": seq,
        "delta_e": delta,
        "trajectory": traj,
        "fidelities": fids,
        "fidelities_renormalized": fids_renorm,
    }


def cmd_simulate(config: dict) -> int:
    params = _params_from_config(config)
    target, label = _target_from_spec(_require(config, "target"))
    drive = _drive_settings(config)
    result = _simulate_target(target, params, drive)
    traj = result["trajectory"]

    out = Path(config.get("out", "simulate"))
    fmt = config.get("format", "csv")
    summary = {
        "command": "simulate",
        "target": label,
        "n_atoms": params.n_atoms,
        "p1d": params.purcell,
        "delta_e": result["delta_e"],
        "n_segments": len(result["sequence"]),
        "total_duration": result["sequence"].total_duration,
        "final_fidelity": result["fidelities"][-1],
        "final_fidelity_renormalized": result["fidelities_renormalized"][-1],
        "times": list(traj.times),
        "norm_history": list(traj.norms),
    }
    if fmt == "json":
        reporting.write_json(out.with_suffix(".json"), summary)
    else:
        header = [
            "step[1]",
            "time[1/Gamma1D]",
            "norm[1]",
            "fidelity[1]",
            "fidelity_renormalized[1]",
        ]
        rows = [
            [i, t, n, f, fr]
            for i, (t, n, f, fr) in enumerate(
                zip(
                    traj.times,
                    traj.norms,
                    result["fidelities"],
                    result["fidelities_renormalized"],
                )
            )
        ]
        reporting.write_csv(out.with_suffix(".csv"), header, rows)
    if config.get("plot"):
        from . import plots

        plots.plot_trajectory(traj.times, traj.norms, out.with_suffix(".png"))
    return EXIT_OK


def _sweep_point(payload: dict) -> dict:
    """One (target, p1d) evaluation; top level so worker pools can pickle it."""
    target, label = _target_from_spec(payload["target_spec"])
    params = PhysicalParams.from_purcell(payload["n_atoms"], payload["p1d"])
    drive = payload["drive"]
    result = _simulate_target(target, params, drive)
    totals = analytics.total_infidelities(
        max(target.m_max, 1), params.n_atoms, params
    )
    fid = result["fidelities"][-1]
    return {
        "target": label,
        "m_max": target.m_max,
        "p1d": payload["p1d"],
        "delta_e": result["delta_e"],
        "total_duration": result["sequence"].total_duration,
        "fidelity": fid,
        "infidelity": 1.0 - fid,
        "infidelity_analytic": totals.one_minus_f1,
    }


def cmd_sweep(config: dict) -> int:
    n_atoms = int(_require(config, "n_atoms"))
    p1d_values = [float(p) for p in _require(config, "p1d_values")]
    if not p1d_values:
        raise ConfigError("p1d_values must be non-empty")
    target_specs = _require(config, "targets")
    if not target_specs:
        raise ConfigError("targets must be non-empty")
    for spec in target_specs:
        _target_from_spec(spec)  # validate early
    drive = _drive_settings(config)
    jobs = int(config.get("jobs", 1))

    payloads = [
        {"target_spec": spec, "n_atoms": n_atoms, "p1d": p1d, "drive": drive}
        for spec in target_specs
        for p1d in p1d_values
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, payloads))
    else:
        rows = [_sweep_point(p) for p in payloads]

    out = Path(config.get("out", "sweep"))
    fmt = config.get("format", "csv")
    if fmt == "json":
        reporting.write_json(out.with_suffix(".json"), {"command": "sweep", "rows": rows})
    else:
        header = [
            "target[label]",
            "m_max[1]",
            "p1d[1]",
            "delta_e[Gamma1D]",
            "total_duration[1/Gamma1D]",
            "fidelity[1]",
            "infidelity[1]",
            "infidelity_analytic[1]",
        ]
        reporting.write_csv(
            out.with_suffix(".csv"),
            header,
            [[r[k.split("[")[0]] for k in header] for r in rows],
        )
    if config.get("plot"):
        from . import plots

        plots.plot_sweep(rows, out.with_suffix(".png"))
    return EXIT_OK


def cmd_plan(config: dict) -> int:
    params = _params_from_config(config)
    target, label = _target_from_spec(_require(config, "target"))
    drive = _drive_settings(config)
    seq, delta = _plan_for(target, params, drive)
    if config.get("emission"):
        from .protocol import with_emission

        omega_fast = float(config["emission"].get("omega_r", 20.0 * params.n_atoms))
        seq = with_emission(seq, omega_fast, drive["omega_c"], params.n_atoms)
    out = Path(config.get("out", "plan"))
    doc = {
        "command": "plan",
        "target": label,
        "n_atoms": params.n_atoms,
        "p1d": params.purcell,
        "delta_e": delta,
        **seq.to_json_dict(),
    }
    if config.get("format", "json") == "csv":
        header = [
            "index[1]",
            "annotation[label]",
            "re_omega_r[Gamma1D]",
            "im_omega_r[Gamma1D]",
            "re_omega_anc[Gamma1D]",
            "im_omega_anc[Gamma1D]",
            "re_omega_c[Gamma1D]",
            "im_omega_c[Gamma1D]",
            "delta_e[Gamma1D]",
            "duration[1/Gamma1D]",
        ]
        rows = [
            [
                i,
                ann,
                complex(seg.omega_r).real,
                complex(seg.omega_r).imag,
                complex(seg.omega_anc).real,
                complex(seg.omega_anc).imag,
                complex(seg.omega_c).real,
                complex(seg.omega_c).imag,
                seg.delta_e,
                seg.duration,
            ]
            for i, (seg, ann) in enumerate(zip(seq.segments, seq.annotations))
        ]
        reporting.write_csv(out.with_suffix(".csv"), header, rows)
    else:
        reporting.write_json(out.with_suffix(".json"), doc)
    return EXIT_OK


def cmd_photon(config: dict) -> int:
    n_atoms = int(_require(config, "n_atoms"))
    grid_cfg = dict(config.get("grid", {}))
    out = Path(config.get("out", "photon"))

    if "overlap_table" in config:
        table = config["overlap_table"]
        m_values = [int(m) for m in _require(table, "m_values")]
        n_values = [int(n) for n in table.get("n_values", [n_atoms])]
        n_points = int(table.get("grid_points", 1025))
        rows = []
        for n in n_values:
            grid = photonics.build_grid(n, n_points)
            for m in m_values:
                closed = photonics.overlap_hp_closed(m, n)
                numeric = (
                    photonics.overlap_hp_numeric(m, n, grid)
                    if 1 <= m <= 3
                    else float("nan")
                )
                rows.append([m, n, closed.overlap, numeric, closed.deficit])
        header = [
            "photons[1]",
            "n_atoms[1]",
            "overlap_closed[1]",
            "overlap_numeric[1]",
            "deficit_closed[1]",
        ]
        if config.get("format", "csv") == "json":
            payload = [
                dict(zip(("photons", "n_atoms", "overlap_closed", "overlap_numeric", "deficit_closed"), r))
                for r in rows
            ]
            reporting.write_json(out.with_suffix(".json"), {"command": "photon", "overlap_table": payload})
        else:
            reporting.write_csv(out.with_suffix(".csv"), header, rows)
        return EXIT_OK

    m = int(config.get("photons", 1))
    if m > 2:
        raise ConfigError("dense wavepacket export supports photons <= 2")
    n_points = int(grid_cfg.get("n_points", 1025 if m == 1 else 257))
    grid = photonics.build_grid(
        n_atoms, n_points, span_halfwidths=grid_cfg.get("span_halfwidths")
    )
    pack = photonics.build_wavepacket(m, n_atoms, grid)
    meta = {
        "command": "photon",
        "photons": m,
        "n_atoms": n_atoms,
        "n_points": grid.n_points,
        "norm_squared": pack.norm_squared,
        "single_photon_norm": grid.single_photon_norm(),
        "single_mode_overlap_closed": photonics.overlap_hp_closed(m, n_atoms).overlap,
    }
    if m == 1:
        header = [
            "delta_omega[Gamma1D]",
            "weight[Gamma1D]",
            "re_amplitude[1]",
            "im_amplitude[1]",
        ]
        rows = [
            [d, w, a.real, a.imag]
            for d, w, a in zip(grid.detunings, grid.weights, pack.amplitudes)
        ]
    else:
        header = [
            "delta_omega_1[Gamma1D]",
            "delta_omega_2[Gamma1D]",
            "weight[Gamma1D^2]",
            "re_amplitude[1]",
            "im_amplitude[1]",
        ]
        rows = [
            [
                d1,
                d2,
                grid.weights[i] * grid.weights[j],
                pack.amplitudes[i, j].real,
                pack.amplitudes[i, j].imag,
            ]
            for i, d1 in enumerate(grid.detunings)
            for j, d2 in enumerate(grid.detunings)
        ]
    reporting.write_csv(out.with_suffix(".csv"), header, rows)
    reporting.write_json(Path(str(out) + "_meta.json"), meta)
    if config.get("plot"):
        from . import plots

        if m == 1:
            plots.plot_line_shape(grid.detunings, pack.amplitudes, n_atoms, out.with_suffix(".png"))
        else:
            plots.plot_two_photon(grid.detunings, pack.amplitudes, n_atoms, out.with_suffix(".png"))
    return EXIT_OK


def cmd_analytic(config: dict) -> int:
    params = _params_from_config(config)
    m_values = [int(m) for m in config.get("m_values", [1])]
    drive = _drive_settings(config)
    delta = (
        float(drive["delta_e"])
        if drive["delta_e"] is not None
        else optimal_detuning(params)
    )
    omega_r = drive["omega_r_factor"] * delta
    post = bool(config.get("post_selected", False))
    rows = []
    budgets = []
    for m in m_values:
        budget = analytics.error_rates(
            m, params.n_atoms, omega_r, delta, params, post_selected=post
        )
        budgets.append(budget.as_dict())
        rows.append(
            [
                m,
                params.n_atoms,
                delta,
                budget.rate_psi_e,
                budget.rate_chi_s,
                budget.rate_chi_g,
                budget.t_op,
                budget.per_step_infidelity,
            ]
        )
    totals = analytics.total_infidelities(max(m_values), params.n_atoms, params)
    out = Path(config.get("out", "analytic"))
    if config.get("format", "csv") == "json":
        reporting.write_json(
            out.with_suffix(".json"),
            {
                "command": "analytic",
                "budgets": budgets,
                "totals": {
                    "one_minus_f1": totals.one_minus_f1,
                    "one_minus_f2": totals.one_minus_f2,
                    "single_mode_overlap": totals.single_mode_overlap,
                    "combined_fidelity": totals.combined_fidelity,
                },
            },
        )
    else:
        header = [
            "m[1]",
            "n_atoms[1]",
            "delta_e[Gamma1D]",
            "rate_psi_e[Gamma1D]",
            "rate_chi_s[Gamma1D]",
            "rate_chi_g[Gamma1D]",
            "t_op[1/Gamma1D]",
            "per_step_infidelity[1]",
        ]
        reporting.write_csv(out.with_suffix(".csv"), header, rows)
    return EXIT_OK


def cmd_feasibility(config: dict) -> int:
    wg_cfg = dict(config.get("waveguide", {}))
    base = analytics.CS_SIN_PRESET
    alphas = [float(a) for a in config.get("alpha_values", [wg_cfg.get("alpha", base.alpha)])]
    n_atoms = int(config.get("n_atoms", 100))
    rows = []
    for alpha in alphas:
        spec = analytics.WaveguideSpec(
            group_index=float(wg_cfg.get("group_index", base.group_index)),
            mode_area_um2=float(wg_cfg.get("mode_area_um2", base.mode_area_um2)),
            lambda0_um=float(wg_cfg.get("lambda0_um", base.lambda0_um)),
            cavity_factor=float(wg_cfg.get("cavity_factor", base.cavity_factor)),
            refractive_index=float(wg_cfg.get("refractive_index", base.refractive_index)),
            q_factor=float(wg_cfg.get("q_factor", base.q_factor)),
            gamma_a=float(wg_cfg.get("gamma_a", base.gamma_a)),
            alpha=alpha,
        )
        est = analytics.purcell_ratio(spec)
        lim = analytics.propagation_and_retardation(spec, n_atoms)
        rows.append(
            [
                alpha,
                est.ratio,
                est.p1d,
                lim.l_prop_over_lambda_a,
                lim.n_max_retardation,
                lim.epsilon_prop,
            ]
        )
    out = Path(config.get("out", "feasibility"))
    header = [
        "alpha[1]",
        "purcell_ratio[1]",
        "p1d[1]",
        "l_prop_over_lambda_a[1]",
        "n_max_retardation[1]",
        "epsilon_prop[1]",
    ]
    if config.get("format", "csv") == "json":
        payload = [
            dict(
                zip(
                    (
                        "alpha",
                        "purcell_ratio",
                        "p1d",
                        "l_prop_over_lambda_a",
                        "n_max_retardation",
                        "epsilon_prop",
                    ),
                    r,
                )
            )
            for r in rows
        ]
        reporting.write_json(out.with_suffix(".json"), {"command": "feasibility", "rows": payload})
    else:
        reporting.write_csv(out.with_suffix(".csv"), header, rows)
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "plan": cmd_plan,
    "photon": cmd_photon,
    "analytic": cmd_analytic,
    "feasibility": cmd_feasibility,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dickesim",
        description="Dissipation-assisted Dicke-state preparation and photon mapping",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=False, help="JSON config file")
        p.add_argument("--out", help="output path stem (overrides config)")
        p.add_argument("--format", choices=("csv", "json"), help="output format")
        p.add_argument("--jobs", type=int, help="parallel workers for sweeps")
        p.add_argument("--plot", action="store_true", help="render figures next to the data")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args.config)
        for key in ("out", "format", "jobs"):
            value = getattr(args, key)
            if value is not None:
                config[key] = value
        if args.plot:
            config["plot"] = True
        fmt = config.get("format", None)
        if fmt is not None and fmt not in ("csv", "json"):
            raise ConfigError(f"unknown format {fmt!r}")
        return _COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: invalid config value: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
