"""Config-driven command surface: gkdv4 <command> --config file.json [...].

Commands: certify (certificate sweep), profile (resonance sweep), rigidity
(bound chain, power-sum scans, Monte-Carlo), approx (residual/lower-bound
time series), simulate (PDE experiments), verify (cross-module invariant
suite).  Every run writes report.json plus CSV tables into the output
directory; identical config and seed give byte-identical outputs.

Exit codes: 0 all checks passed, 1 a named check failed, 2 bad usage.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import approx, certificate, pde, profiles, resonance, rigidity
from .grids import SampledField
from .rigidity import SolitonTrain

COMMANDS = ("certify", "profile", "rigidity", "approx", "simulate", "verify")


@dataclasses.dataclass
class RunConfig:
    command: str
    train: SolitonTrain | None = None
    c_range: tuple | None = None        # (lo, hi, step)
    k0: float = 20.0
    output_dir: str = "gkdv4-out"
    seed: int = 0
    threads: int = 1
    overrides: dict = dataclasses.field(default_factory=dict)

    @staticmethod
    def from_json(command: str, path: str | None, **kwargs) -> "RunConfig":
        data = {}
        if path is not None:
            with open(path) as fh:
                data = json.load(fh)
        train = None
        if "train" in data:
            train = SolitonTrain(tuple(data["train"]["speeds"]),
                                 tuple(data["train"].get("shifts") or ())
                                 or None)
        c_range = tuple(data["c_range"]) if "c_range" in data else None
        cfg = RunConfig(
            command=command, train=train, c_range=c_range,
            k0=float(data.get("k0", 20.0)),
            output_dir=data.get("output_dir", "gkdv4-out"),
            seed=int(data.get("seed", 0)),
            threads=int(data.get("threads", 1)),
            overrides=data.get("overrides", {}),
        )
        for key, val in kwargs.items():
            if val is not None:
                setattr(cfg, key, val)
        return cfg


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(path: Path, header: list, rows: list) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


class CheckCollector:
    """Accumulates named pass/fail checks for the report and exit code."""

    def __init__(self):
        self.checks = []

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append({"name": name, "ok": bool(ok), "detail": detail})
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}" + (f": {detail}" if detail else ""))

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)


def _write_report(cfg: RunConfig, out: Path, collector: CheckCollector,
                  extra: dict | None = None) -> None:
    report = {
        "command": cfg.command,
        "seed": cfg.seed,
        "checks": collector.checks,
        "ok": collector.ok,
    }
    if extra:
        report.update(extra)
    with open(out / "report.json", "w") as fh:
        json.dump(report, fh, indent=1, default=_fmt)


# ---------------------------------------------------------------------------
# Command handlers


def cmd_certify(cfg: RunConfig, out: Path, col: CheckCollector) -> None:
    lo, hi, step = cfg.c_range or (0.75, 1.0, 0.01)
    c_values = np.arange(lo, hi + step / 2, step)
    reports = certificate.certificate_sweep(c_values)
    rows = [(r.c, r.alpha, r.beta, r.k1, r.k2, r.k, r.margin) for r in reports]
    write_csv(out / "certificate.csv",
              ["c", "alpha", "beta", "k1", "k2", "k", "margin"], rows)
    k_max = max(r.k for r in reports)
    col.add("certificate-bound", all(0.0 <= r.k <= 0.5 for r in reports),
            f"max k = {k_max:.6f}")
    col.add("certificate-positivity", all(r.k2 > 0 for r in reports),
            f"min k2 = {min(r.k2 for r in reports):.6f}")
    with open(out / "certificate_full.json", "w") as fh:
        json.dump([dataclasses.asdict(r) for r in reports], fh, indent=1)


def cmd_profile(cfg: RunConfig, out: Path, col: CheckCollector) -> None:
    lo, hi, step = cfg.c_range or (0.75, 0.95, 0.05)
    c_values = list(np.arange(lo, hi + step / 2, step))
    rows_data = resonance.sweep_aI(c_values)
    write_csv(out / "resonance_sweep.csv",
              ["c", "gamma0", "gammaI", "gammaII", "aI", "aII", "fit_residual"],
              [(r["c"], r["gamma0"], r["gammaI"], r["gammaII"],
                r["aI"], r["aII"], r["fit_residual"]) for r in rows_data])
    signs = {np.sign(r["aI"]) for r in rows_data if not r["inconclusive"]}
    col.add("tail-coefficient-sign-constant", len(signs) == 1,
            f"signs: {sorted(signs)}")
    col.add("tail-fit-quality",
            all(r["fit_residual"] < 1e-6 for r in rows_data),
            f"max fit residual = {max(r['fit_residual'] for r in rows_data):.2e}")
    # sample profile export: solved samples, two-mode model, pointwise gap
    c_mid = rows_data[len(rows_data) // 2]["c"]
    prof = resonance.solve_resonance(resonance.ResonanceParams.below_one(c_mid))
    x = prof.grid.x
    model = (prof.aI * np.exp(-prof.rates.gammaI * np.maximum(x, 0.0))
             + prof.aII * np.exp(-prof.rates.gammaII * np.maximum(x, 0.0)))
    keep = slice(None, None, 20)
    write_csv(out / f"profile_c{c_mid:.2f}.csv",
              ["x", "A", "tail_model", "gap"],
              list(zip(x[keep], prof.values[keep], model[keep],
                       (prof.values - model)[keep])))
    # closed-form profile export (x, value) tables
    g = profiles.default_grid()
    xg = g.x[::20]
    write_csv(out / "closed_form_profiles.csv",
              ["x", "Q", "H0", "J0", "F0"],
              list(zip(xg, profiles.q(xg),
                       profiles.h0_profile(g).values[::20],
                       profiles.j0_profile(g).values[::20],
                       profiles.f0_weight(xg))))


def cmd_rigidity(cfg: RunConfig, out: Path, col: CheckCollector) -> None:
    train = cfg.train or SolitonTrain((1.0, 0.8))
    bounds = rigidity.incoming_speed_bounds(train)
    col.add("speed-bracket",
            bounds.sharp_lower > bounds.lower and bounds.sharp_upper < bounds.upper,
            f"({bounds.sharp_lower:.4f}, {bounds.sharp_upper:.4f})")
    fb = rigidity.f_bounds_check()
    col.add("power-function-envelope", fb["ok"],
            f"min slack = {fb['min_lower_slack']:.2e}")
    mc = rigidity.monte_carlo_inequalities(1000, seed=cfg.seed)
    col.add("tail-inequalities-monte-carlo", mc["violations"] == 0,
            f"{mc['count']} trains, {mc['violations']} violations")
    samples = rigidity.sample_admissible_trains(1000, seed=cfg.seed)
    rows = []
    for i, tr in enumerate(samples):
        rep = rigidity.claim_bm_check(tr)
        rows.append((i, tr.n, rep.ratio_slack, rep.unit_slack, rep.window_slack))
    write_csv(out / "monte_carlo.csv",
              ["sample", "n", "ratio_slack", "unit_slack", "window_slack"], rows)
    scans = []
    for x in (0.5, 0.7, 0.9):
        cands = rigidity.two_soliton_rigidity_scan(x, n_max=3)
        two = [c for c in cands if c["n"] == 2]
        three = [c for c in cands if c["n"] > 2]
        ok = (len(two) == 1 and abs(two[0]["values"][0] - 1.0) < 1e-6
              and abs(two[0]["values"][1] - x) < 1e-6 and not three)
        scans.append(ok)
        col.add(f"power-sum-scan-x={x}", ok, f"{len(two)} pair / {len(three)} higher")


def cmd_approx(cfg: RunConfig, out: Path, col: CheckCollector) -> None:
    train = cfg.train or SolitonTrain((1.0, 0.8), (10.0, 0.0))
    model = approx.build_model(train, k0=cfg.k0)
    s0 = model.geometry.sigma0
    ts = np.linspace(10.0, 30.0, 11)
    fit = approx.decay_rate_fit(model, ts)
    rows = [(t, fit["residual_norms"][i],
             *(fit[f"E{m}_norms"][i] for m in range(1, 6)))
            for i, t in enumerate(ts)]
    write_csv(out / "residual_series.csv",
              ["t", "E_V_h3", "E1", "E2", "E3", "E4", "E5"], rows)
    col.add("residual-decay-rate",
            abs(fit["residual_slope"] + 2 * s0) <= 0.02,
            f"slope {fit['residual_slope']:.4f} vs {-2 * s0:.4f}")
    ok_terms = all(fit[f"E{m}_slope"] <= -2 * s0 + 0.02 for m in range(1, 6))
    col.add("error-term-rates", ok_terms,
            ", ".join(f"E{m}: {fit[f'E{m}_slope']:.3f}" for m in range(1, 6)))
    tlb = np.linspace(60.0, 120.0, 13)
    rep = approx.lower_bound_check(model, tlb)
    v_line = [abs(model.evaluate(t, float(model.x0(t)))) for t in tlb]
    write_csv(out / "lower_bound.csv", ["t", "V_at_line", "m"],
              list(zip(rep.t, v_line, rep.m_values)))
    manifest = {
        "train": {"speeds": list(model.train.speeds),
                  "shifts": list(model.train.shifts)},
        "geometry": {"j0": model.geometry.j0, "sigma0": model.geometry.sigma0,
                     "gamma0": model.geometry.gamma0,
                     "x0_slope": model.geometry.x0_slope},
        "profiles": {
            f"pair_{j}_{k}": hashlib.sha256(
                prof.base.values.tobytes()).hexdigest()[:16]
            for (j, k), prof in sorted(model.pair_profiles.items())
        } | {
            f"triple_{j}_{k}_{l}_{b}": hashlib.sha256(
                prof.base.values.tobytes()).hexdigest()[:16]
            for (j, k, l, b), prof in sorted(model.triple_profiles.items())
        },
    }
    with open(out / "model_manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1)
    col.add("tail-lower-bound",
            rep.kappa_lo > 0 and rep.variation < 0.2,
            f"kappa in [{rep.kappa_lo:.4f}, {rep.kappa_hi:.4f}]")
    col.add("observation-shift-scaling", rep.k0_scaling_error < 0.02,
            f"error {rep.k0_scaling_error:.4f}")
    return {"sigma0": s0, "gamma0": model.geometry.gamma0,
            "residual_slope": fit["residual_slope"]}


def cmd_simulate(cfg: RunConfig, out: Path, col: CheckCollector) -> None:
    grid = pde.PeriodicGrid(128.0, 2 ** 12)
    state = pde.soliton_sum_state(grid, [1.0], [-60.0])
    d0 = pde.diagnostics(state)
    state = pde.integrate(state, 20.0, 1e-3)
    d1 = pde.diagnostics(state)
    c_fit, s_fit = pde.fit_soliton(state, pde.detect_peaks(state)[0])
    write_csv(out / "calibration.csv", ["metric", "value"],
              [("mass_drift", abs(d1.mass - d0.mass) / d0.mass),
               ("energy_drift", abs(d1.energy - d0.energy) / abs(d0.energy)),
               ("phase_error", abs(s_fit + 40.0)),
               ("fitted_speed", c_fit)])
    col.add("solver-mass-conservation",
            abs(d1.mass - d0.mass) / d0.mass < 1e-8,
            f"drift {abs(d1.mass - d0.mass) / d0.mass:.2e}")
    col.add("solver-phase-accuracy", abs(s_fit + 40.0) < 1e-3,
            f"phase error {abs(s_fit + 40.0):.2e}")


def cmd_verify(cfg: RunConfig, out: Path, col: CheckCollector) -> None:
    grid = profiles.default_grid()
    x = grid.x
    mask = np.abs(x) <= 15.0
    qv = profiles.q(x)

    h0 = profiles.h0_profile(grid)
    lh0 = profiles.apply_L(1.0, h0)
    col.add("identity-L-H0", np.max(np.abs(lh0.values[mask] - 1.0)) < 1e-6)
    lqp = profiles.apply_L(1.0, SampledField(grid, profiles.q_prime(x)))
    col.add("identity-L-kernel", np.max(np.abs(lqp.values[mask])) < 1e-6)
    llam = profiles.apply_L(1.0, SampledField(grid, profiles.lam_q(x)))
    col.add("identity-L-scaling", np.max(np.abs((llam.values + qv)[mask])) < 1e-6)
    lq52 = profiles.apply_L(1.0, SampledField(grid, qv ** 2.5))
    col.add("identity-L-power", np.max(np.abs((lq52.values + 5.25 * qv ** 2.5)[mask])) < 1e-6)
    base = profiles.base_integrals(grid)
    col.add("ratio-gradient-mass",
            abs(base["int_qp2"] / base["int_q2"] - 3.0 / 7.0) < 1e-8)
    lam = profiles.lam_q(x)
    col.add("ratio-scaling-mass",
            abs(np.trapezoid(qv * lam, dx=grid.h) / base["int_q2"] - 1.0 / 12.0) < 1e-8)
    col.add("ratio-H0-mass",
            abs(np.trapezoid(qv * h0.values, dx=grid.h) / base["int_q"] - 1.0 / 6.0) < 1e-8)
    qp = profiles.q_prime(x)
    col.add("pointwise-gradient-identity",
            np.max(np.abs(qp ** 2 - (qv ** 2 - 0.4 * qv ** 5))) < 1e-12)
    xg = np.linspace(-30.0, 30.0, 6001)
    col.add("cutoff-third-derivative",
            np.all(profiles.phi_third(xg) <= profiles.phi_prime(xg) + 1e-15))
    f0 = profiles.f0_weight(x)
    col.add("weight-positivity",
            np.all(f0 > 0) and np.all(f0 * qv >= profiles.F0_COEFF - 1e-12))


def run(cfg: RunConfig) -> int:
    """Execute a config; returns the exit status."""
    if cfg.command not in COMMANDS:
        print(f"unknown command {cfg.command!r}", file=sys.stderr)
        return 2
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    np.random.seed(cfg.seed)
    col = CheckCollector()
    handler = {
        "certify": cmd_certify, "profile": cmd_profile,
        "rigidity": cmd_rigidity, "approx": cmd_approx,
        "simulate": cmd_simulate, "verify": cmd_verify,
    }[cfg.command]
    extra = handler(cfg, out, col)
    _write_report(cfg, out, col, extra if isinstance(extra, dict) else None)
    return 0 if col.ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gkdv4",
        description="Numerical laboratory for quartic gKdV solitons")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = RunConfig.from_json(args.command, args.config,
                                  output_dir=args.out, seed=args.seed,
                                  threads=args.threads)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
