"""Batch experiment runner.

Usage:
    wpscat run <config>     execute one experiment described by a config file
    wpscat list [--json]    list the available experiments

Config files are flat key-value text with dotted section prefixes::

    experiment = wave-op
    seed = 1
    output_dir = out
    grid.dim = 1
    grid.N = 4096
    grid.L = 160.0
    potential.family = power_law
    potential.delta = 2.0
    ...

The environment variable WPS_OUTPUT_DIR overrides output_dir.  Exit codes:
0 success, 2 config parse error, 3 validation error, 4 runtime numerical
guard tripped.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_GUARD = 4


class ConfigError(Exception):
    pass


class ValidationError(Exception):
    pass


EXPERIMENTS = {
    "transform-check": (
        "seeded Parseval/polarization/inversion residual suite",
        "grid.*, seed, check.count",
    ),
    "evolve": (
        "propagate a state and dump snapshots plus a norm/boundary CSV",
        "grid.*, state.*, potential.*, evolve.dt, evolve.T, evolve.stride",
    ),
    "wave-op": (
        "forward wave-operator horizon estimates with Cauchy-tail fit",
        "grid.*, state.*, potential.*, evolve.dt, schedule.T, run.direction, run.tau",
    ),
    "inverse-limit": (
        "inverse wave-operator horizon estimates with Cauchy-tail fit",
        "grid.*, state.*, potential.*, evolve.dt, schedule.T, run.direction, run.tau",
    ),
    "classify": (
        "phase-space mask classifier over a time schedule",
        "grid.*, state.*, window.*, potential.*, evolve.dt, schedule.t, masks.*",
    ),
    "remainder-decay": (
        "masked-complement interaction-term norms over a time schedule",
        "grid.*, state.*, window.r, potential.*, evolve.dt, schedule.t, mask.*",
    ),
    "bound-state": (
        "reference bound-state propagation fidelity",
        "grid.*, potential.coupling, evolve.dt, evolve.T",
    ),
    "orthogonality": (
        "bound-state overlap of wave-operator horizon estimates",
        "grid.*, state.*, potential.coupling, evolve.dt, schedule.T",
    ),
    "cook": (
        "free-flight interaction-norm integrand samples with decay fit",
        "grid.*, state.*, potential.*, schedule.t",
    ),
}


def parse_config(path) -> tuple[dict, str]:
    """Flat `key = value` lines; '#' starts a comment.  Returns the mapping
    plus the verbatim text for the summary echo."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}")
    cfg = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if not key or not val:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in cfg:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        cfg[key] = val
    return cfg, text


def _get(cfg, key, cast=str, default=None, required=False):
    if key not in cfg:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return cast(cfg[key])
    except (ValueError, TypeError):
        raise ConfigError(f"key {key!r}: cannot parse {cfg[key]!r}")


def _floats(s):
    return [float(v) for v in s.replace(",", " ").split()]


def _vector(s):
    vals = _floats(s)
    return vals[0] if len(vals) == 1 else tuple(vals)


def build_grid(cfg):
    import wpscat as w

    dim = _get(cfg, "grid.dim", int, 1)
    n = _get(cfg, "grid.N", int, required=True)
    L = _get(cfg, "grid.L", float, required=True)
    return w.SpatialGrid(dim, n, L)


def build_potential(cfg):
    import wpscat as w

    family = _get(cfg, "potential.family", str, "zero")
    return w.PotentialSpec(
        family=family,
        delta=_get(cfg, "potential.delta", float, 2.0),
        coupling=_get(cfg, "potential.coupling", float, 0.0),
        time_profile=_get(cfg, "potential.time_profile", str, "constant"),
        omega=_get(cfg, "potential.omega", float, 0.0),
        rho=_get(cfg, "potential.rho", float, None),
    )


def build_state(cfg, grid, prefix="state"):
    import wpscat as w

    kind = _get(cfg, f"{prefix}.kind", str, "gaussian")
    if kind == "gaussian":
        return w.gaussian(
            grid,
            center=_get(cfg, f"{prefix}.center", _vector, 0.0),
            width=_get(cfg, f"{prefix}.width", float, 1.0),
            momentum=_get(cfg, f"{prefix}.momentum", _vector, 0.0),
        )
    if kind == "bound_state":
        psi, _ = w.bound_state(grid)
        return psi
    if kind == "file":
        return w.load_wavefunction(_get(cfg, f"{prefix}.path", str, required=True))
    if kind == "bump":
        Phi = build_window(cfg, grid)
        return w.phase_space_bump(
            grid,
            Phi,
            x_center=_get(cfg, f"{prefix}.x_center", _vector, 0.0),
            x_radius=_get(cfg, f"{prefix}.x_radius", float, 1.0),
            xi_center=_get(cfg, f"{prefix}.xi_center", _vector, required=True),
            xi_radius=_get(cfg, f"{prefix}.xi_radius", float, 1.0),
        )
    raise ConfigError(f"unknown state kind {kind!r}")


def build_window(cfg, grid):
    import wpscat as w

    kind = _get(cfg, "window.kind", str, "gaussian")
    if kind == "gaussian":
        return w.make_scat_window(grid, _get(cfg, "window.width", float, 1.0))
    if kind == "annulus":
        return w.make_annulus_window(grid, _get(cfg, "window.r", float, required=True))
    raise ConfigError(f"unknown window kind {kind!r}")


def build_masks(cfg):
    import wpscat as w

    masks = []
    gam = _get(cfg, "masks.gamma", str)
    if gam:
        for entry in gam.split(","):
            a, R = (float(v) for v in entry.split(":"))
            masks.append(w.PhaseSpaceMask(kind="gamma_aR", a=a, R=R))
    con = _get(cfg, "masks.conic", str)
    if con:
        for entry in con.split(","):
            a, sigma = (float(v) for v in entry.split(":"))
            masks.append(w.PhaseSpaceMask(kind="gamma_tilde_a_sigma", a=a, sigma=sigma))
    if not masks:
        raise ConfigError("no masks configured (masks.gamma / masks.conic)")
    return masks


def validate_physics(cfg, spec):
    """Reject configs outside the supported regime before any compute."""
    if spec.family == "power_law" and spec.delta <= 1.0:
        raise ValidationError(
            "potential decay exponent delta must exceed 1 "
            "(short-range decay requirement)"
        )


def validate_budget(cfg, grid, masks, window_width, t_max):
    import wpscat as w
    from wpscat.propagators import propagation_budget_ok

    ok = []
    for m in masks:
        if m.kind == "gamma_aR":
            ok.append(
                propagation_budget_ok(m.a, t_max, m.R, window_width, grid.half_length)
            )
        else:
            ok.append(m.a * t_max + 6.0 * window_width < grid.half_length)
    if not any(ok):
        raise ValidationError(
            "no configured mask fits the propagation budget "
            f"(T_max={t_max}, L={grid.half_length})"
        )


def write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


def write_summary(outdir, payload, config_text, cfg=None):
    payload = dict(payload)
    if cfg is not None and "experiment" in cfg:
        payload["experiment"] = cfg["experiment"]
    payload["config_echo"] = config_text
    payload["config_sha"] = hashlib.sha1(config_text.encode()).hexdigest()
    with open(os.path.join(outdir, "summary.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_transform_check(cfg, outdir, config_text):
    import numpy as np
    import wpscat as w

    grid = build_grid(cfg)
    count = _get(cfg, "check.count", int, 20)
    seed = _get(cfg, "seed", int, 0)
    rng = np.random.default_rng(seed)

    def random_state():
        vals = rng.standard_normal(grid.shape()) + 1j * rng.standard_normal(grid.shape())
        f = w.WaveFunction(grid, vals)
        f.values /= f.norm()
        return f

    rows = []
    worst = {"parseval": 0.0, "polarization": 0.0, "inversion": 0.0}
    for trial in range(count):
        f, g = random_state(), random_state()
        width = 0.3 + 0.1 * float(rng.uniform(0, 4))
        phi = w.make_scat_window(grid, width)
        psi = w.make_scat_window(grid, 0.3 + 0.1 * float(rng.uniform(0, 4)))
        F = w.wpt_forward(f, phi)
        G = w.wpt_forward(g, psi)
        pv = abs(w.ps_norm(F) - f.norm()) / f.norm()
        pol = abs(
            w.ps_inner(F, G) - w.inner(psi.wavefunction, phi.wavefunction) * w.inner(f, g)
        )
        back = w.wpt_inverse(F, phi)
        inv = float(
            np.sqrt(np.sum(np.abs(back.values - f.values) ** 2) * f.weight)
        )
        rows.append((trial, pv, pol, inv))
        worst["parseval"] = max(worst["parseval"], pv)
        worst["polarization"] = max(worst["polarization"], pol)
        worst["inversion"] = max(worst["inversion"], inv)
    write_csv(
        os.path.join(outdir, "residuals.csv"),
        "trial,parseval,polarization,inversion",
        rows,
    )
    write_summary(outdir, {"max_residuals": worst, "trials": count}, config_text, cfg)


def run_evolve(cfg, outdir, config_text):
    import wpscat as w

    grid = build_grid(cfg)
    spec = build_potential(cfg)
    validate_physics(cfg, spec)
    state = build_state(cfg, grid)
    dt = _get(cfg, "evolve.dt", float, required=True)
    T = _get(cfg, "evolve.T", float, required=True)
    stride = _get(cfg, "evolve.stride", float, T)
    guard = _get(cfg, "guard.boundary_mass", float, 1e-6)
    run_cfg = w.EvolutionConfig(dt=dt, potential=spec)
    rows = [(0.0, state.norm(), state.boundary_mass())]
    t = 0.0
    snap = 0
    w.save_wavefunction(state, os.path.join(outdir, f"snapshot_{snap:04d}.wps"))
    while t < T - 1e-12:
        t_next = min(t + stride, T)
        state = w.evolve(state, t, t_next, run_cfg)
        t = t_next
        bm = state.boundary_mass()
        rows.append((t, state.norm(), bm))
        snap += 1
        w.save_wavefunction(state, os.path.join(outdir, f"snapshot_{snap:04d}.wps"))
        if bm > guard:
            write_csv(os.path.join(outdir, "trajectory.csv"), "t,norm,boundary_mass", rows)
            raise GuardTripped(f"boundary mass {bm:.3e} exceeds guard {guard:.3e} at t={t}")
    write_csv(os.path.join(outdir, "trajectory.csv"), "t,norm,boundary_mass", rows)
    write_summary(
        outdir,
        {"final_norm": state.norm(), "final_boundary_mass": state.boundary_mass()},
        config_text,
        cfg,
    )


def _run_horizons(cfg, outdir, config_text, inverse):
    import wpscat as w

    grid = build_grid(cfg)
    spec = build_potential(cfg)
    validate_physics(cfg, spec)
    state = build_state(cfg, grid)
    dt = _get(cfg, "evolve.dt", float, required=True)
    schedule = _get(cfg, "schedule.T", _floats, required=True)
    direction = _get(cfg, "run.direction", str, "plus")
    tau = _get(cfg, "run.tau", float, 0.0)
    run_cfg = w.EvolutionConfig(dt=dt, potential=spec)
    fn = w.inverse_limit if inverse else w.estimate_wave_operator
    run = fn(state, direction, tau, schedule, run_cfg) if not inverse else fn(
        state, tau, schedule, run_cfg, direction
    )
    rows = list(zip(run.schedule[:-1], run.tails))
    write_csv(os.path.join(outdir, "tails.csv"), "T,tail_norm", rows)
    w.save_wavefunction(run.final_state(), os.path.join(outdir, "final_state.wps"))
    write_summary(
        outdir,
        {"fit": run.fit.as_dict() if run.fit else None, "tails": run.tails},
        config_text,
        cfg,
    )


def run_wave_op(cfg, outdir, config_text):
    _run_horizons(cfg, outdir, config_text, inverse=False)


def run_inverse_limit(cfg, outdir, config_text):
    _run_horizons(cfg, outdir, config_text, inverse=True)


def run_classify(cfg, outdir, config_text):
    import wpscat as w

    grid = build_grid(cfg)
    spec = build_potential(cfg)
    validate_physics(cfg, spec)
    window = build_window(cfg, grid)
    state = build_state(cfg, grid)
    prep_T = _get(cfg, "prep.T", float, 0.0)
    dt = _get(cfg, "evolve.dt", float, required=True)
    sched = _get(cfg, "schedule.t", _floats, required=True)
    masks = build_masks(cfg)
    width = window.params.get("width", window.params.get("r", 1.0))
    validate_budget(cfg, grid, masks, width, max(sched))
    run_cfg = w.EvolutionConfig(dt=dt, potential=spec)
    if prep_T > 0:
        state = w.evolve(w.free_evolve(state, prep_T), prep_T, 0.0, run_cfg)
    res = w.classify_scattering(
        state,
        window,
        _get(cfg, "run.tau", float, 0.0),
        masks,
        sched,
        run_cfg,
        threshold_frac=_get(cfg, "classify.threshold_frac", float, 0.1),
        floor_frac=_get(cfg, "classify.floor_frac", float, 0.5),
        coarsen=(
            _get(cfg, "classify.coarsen_x", int, 1),
            _get(cfg, "classify.coarsen_xi", int, 1),
        ),
    )
    rows = []
    for series in res.per_mask:
        m = series.mask
        second = m.R if m.kind == "gamma_aR" else m.sigma
        for t, val in zip(res.t_schedule, series.masked):
            contrib = "-" if not series.budget_ok else (
                "scattering" if series.ratio <= res.threshold_frac else (
                    "non-scattering" if series.ratio >= res.floor_frac else "inconclusive"
                )
            )
            rows.append((t, m.a, second, val, val / series.masked[0], contrib))
    write_csv(
        os.path.join(outdir, "classify.csv"),
        "t,mask_a,mask_R,masked_norm,ratio,verdict_contrib",
        rows,
    )
    write_summary(
        outdir,
        {
            "verdict": res.verdict,
            "fits": {
                s.mask.label(): (s.fit.as_dict() if s.fit else None)
                for s in res.per_mask
            },
            "ratios": {s.mask.label(): s.ratio for s in res.per_mask},
        },
        config_text,
        cfg,
    )


def run_remainder_decay(cfg, outdir, config_text):
    import wpscat as w

    grid = build_grid(cfg)
    spec = build_potential(cfg)
    validate_physics(cfg, spec)
    window = build_window(cfg, grid)
    state = build_state(cfg, grid)
    dt = _get(cfg, "evolve.dt", float, required=True)
    sched = _get(cfg, "schedule.t", _floats, required=True)
    a = _get(cfg, "mask.a", float, required=True)
    R = _get(cfg, "mask.R", float, required=True)
    mask = w.PhaseSpaceMask(kind="gamma_aR", a=a, R=R)
    coarsen = (
        _get(cfg, "remainder.coarsen_x", int, 1),
        _get(cfg, "remainder.coarsen_xi", int, 1),
    )
    xi_cap = _get(cfg, "remainder.xi_cap", float, None)
    guard = _get(cfg, "guard.boundary_mass", float, 1e-6)
    run_cfg = w.EvolutionConfig(dt=dt, potential=spec)
    rows = []
    t_prev = 0.0
    for s in sched:
        state = w.evolve(state, t_prev, s, run_cfg)
        t_prev = s
        if state.boundary_mass() > guard:
            raise GuardTripped(
                f"boundary mass {state.boundary_mass():.3e} exceeds guard at t={s}"
            )
        F = w.remainder(
            s,
            "plus_s_xi",
            state,
            window,
            spec,
            coarsen=coarsen,
            wrap_budget=None if xi_cap is None else s * xi_cap,
        )
        masked = w.masked_norm(F, mask, complement=True)
        total = w.ps_norm(F)
        rows.append((s, masked, total, masked / total if total > 0 else 0.0))
    write_csv(
        os.path.join(outdir, "remainder.csv"), "t,masked_norm,total_norm,ratio", rows
    )
    from wpscat.fitting import fit_power_law
    import numpy as np

    fit = fit_power_law(
        np.array([r[0] for r in rows]), np.array([r[1] for r in rows])
    )
    write_summary(outdir, {"fit": fit.as_dict()}, config_text, cfg)


def run_bound_state(cfg, outdir, config_text):
    import wpscat as w

    grid = build_grid(cfg)
    spec = build_potential(cfg)
    if spec.family != "poschl_teller":
        raise ValidationError("bound-state experiment needs the reference well")
    psi, energy = w.bound_state(grid)
    dt = _get(cfg, "evolve.dt", float, required=True)
    T = _get(cfg, "evolve.T", float, required=True)
    run_cfg = w.EvolutionConfig(dt=dt, potential=spec)
    evolved = w.evolve(psi, 0.0, T, run_cfg)
    fidelity = abs(w.inner(evolved, psi))
    rows = [(0.0, psi.norm(), psi.boundary_mass()), (T, evolved.norm(), evolved.boundary_mass())]
    write_csv(os.path.join(outdir, "trajectory.csv"), "t,norm,boundary_mass", rows)
    write_summary(
        outdir, {"fidelity": fidelity, "energy": energy, "T": T}, config_text, cfg
    )


def run_orthogonality(cfg, outdir, config_text):
    import wpscat as w

    grid = build_grid(cfg)
    spec = build_potential(cfg)
    if spec.family != "poschl_teller":
        raise ValidationError("orthogonality experiment needs the reference well")
    state = build_state(cfg, grid)
    dt = _get(cfg, "evolve.dt", float, required=True)
    sched = _get(cfg, "schedule.T", _floats, required=True)
    run_cfg = w.EvolutionConfig(dt=dt, potential=spec)
    series = w.orthogonality_check(state, sched, run_cfg)
    rows = [(rec["T"], rec["overlap"]) for rec in series]
    write_csv(os.path.join(outdir, "overlaps.csv"), "T,overlap", rows)
    write_summary(outdir, {"overlaps": rows}, config_text, cfg)


def run_cook(cfg, outdir, config_text):
    import numpy as np
    import wpscat as w
    from wpscat.fitting import fit_power_law

    grid = build_grid(cfg)
    spec = build_potential(cfg)
    validate_physics(cfg, spec)
    state = build_state(cfg, grid)
    sched = _get(cfg, "schedule.t", _floats, required=True)
    series = w.cook_integrand(state, sched, spec)
    rows = [(rec["t"], rec["value"]) for rec in series]
    write_csv(os.path.join(outdir, "integrand.csv"), "t,value", rows)
    fit = fit_power_law(np.array(sched), np.array([r[1] for r in rows]))
    write_summary(outdir, {"fit": fit.as_dict()}, config_text, cfg)


class GuardTripped(Exception):
    pass


RUNNERS = {
    "transform-check": run_transform_check,
    "evolve": run_evolve,
    "wave-op": run_wave_op,
    "inverse-limit": run_inverse_limit,
    "classify": run_classify,
    "remainder-decay": run_remainder_decay,
    "bound-state": run_bound_state,
    "orthogonality": run_orthogonality,
    "cook": run_cook,
}


def cmd_run(args) -> int:
    if args.threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(args.threads))
    try:
        cfg, text = parse_config(args.config)
        name = _get(cfg, "experiment", str, required=True)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_PARSE
    if name not in RUNNERS:
        print(f"validation error: unknown experiment {name!r}", file=sys.stderr)
        return EXIT_VALIDATION
    outdir = os.environ.get("WPS_OUTPUT_DIR") or cfg.get("output_dir", ".")
    os.makedirs(outdir, exist_ok=True)
    from .errors import (
        BoundaryMassError,
        BudgetError,
        ParameterError,
        StepAlignmentError,
    )

    try:
        RUNNERS[name](cfg, outdir, text)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, ParameterError, BudgetError) as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (GuardTripped, BoundaryMassError, StepAlignmentError) as e:
        print(f"numerical guard tripped: {e}", file=sys.stderr)
        return EXIT_GUARD
    return 0


def cmd_list(args) -> int:
    if args.json:
        listing = [
            {"name": name, "description": desc, "keys": keys}
            for name, (desc, keys) in EXPERIMENTS.items()
        ]
        print(json.dumps(listing, indent=2))
    else:
        for name, (desc, keys) in EXPERIMENTS.items():
            print(f"{name:16s} {desc}")
            print(f"{'':16s}   keys: {keys}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="wpscat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--threads", type=int, default=0, help="cap worker threads")
    p_run.set_defaults(fn=cmd_run)
    p_list = sub.add_parser("list", help="list experiments")
    p_list.add_argument("--json", action="store_true")
    p_list.set_defaults(fn=cmd_list)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code not in (0, None) else 0
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
