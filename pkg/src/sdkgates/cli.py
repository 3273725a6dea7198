"""Command-line interface.

Every command resolves a run configuration (built-in defaults, then an
optional JSON config file, then command-line flags), performs its
computation and writes JSON/CSV files to ``<out>/<command>/``.  The
resolved configuration is written to ``config.json`` in that directory and
embedded in every JSON output; re-running with ``--config`` on that file
reproduces the outputs byte for byte.

Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import crosstalk as xt
from . import io
from .constants import doppler_temperature, species_database
from .design import ROUNDING_MODES, solve_design
from .errors import DomainError, NumericalError
from .lattice import build_square_lattice, crystal_modes, dispersion_grid, lattice_sum, zeta
from .propagation import (evolve_disturbance, exterior_response, light_cone_radius, radial_distances,
                          radial_exponent, velocity_field)
from .pulses import build_pulse_sequence, expand_pattern, gate_infidelity, trajectory

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    species: str = "Yb171"
    species_db: dict = field(default_factory=dict)
    d: float = 50e-6
    rows: int = 10
    cols: int = 10
    pair: list | None = None
    pattern: str = "+M,-M"
    rounding: str = "nearest"
    temperature: str | float = "doppler"
    samples_per_kick: int = 8
    lattice_sum_radius: int = 100
    zeta_radius: int = 1000
    dispersion_grid: int = 101
    velocity_grid: int = 201
    velocity_radius: int | None = None
    block_size: int = 10
    fit_rmin: float = 3.0
    fit_rmax: float = 10.0
    sweep_variable: str = "d"
    sweep_start: float = 30e-6
    sweep_stop: float = 250e-6
    sweep_num: int = 23
    z0: float = 1e-9
    v0: float = 0.0
    time_points: int = 257
    time_window: float | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise DomainError(f"unknown config field(s): {', '.join(unknown)}")
        return cls(**data)

    # resolved physics objects -------------------------------------------------

    def ion_species(self):
        db = species_database(self.species_db)
        if self.species not in db:
            raise DomainError(f"unknown species {self.species!r} (known: {', '.join(sorted(db))})")
        return db[self.species]

    def kelvin(self, species) -> float:
        t = self.temperature
        if t == "doppler":
            return doppler_temperature(species.linewidth)
        if t == "zero":
            return 0.0
        try:
            value = float(t)
        except (TypeError, ValueError):
            raise DomainError(f"temperature must be 'doppler', 'zero' or kelvin, got {t!r}") from None
        if value < 0:
            raise DomainError("temperature must be non-negative")
        return value

    def validate(self) -> None:
        if not (isinstance(self.d, (int, float)) and self.d > 0):
            raise DomainError(f"spacing d must be positive, got {self.d!r}")
        if int(self.rows) != self.rows or int(self.cols) != self.cols or self.rows < 1 or self.cols < 1:
            raise DomainError("rows and cols must be positive integers")
        if self.rounding not in ROUNDING_MODES:
            raise DomainError(f"rounding must be one of {ROUNDING_MODES}")
        for name in ("samples_per_kick", "lattice_sum_radius", "zeta_radius", "time_points", "sweep_num"):
            if int(getattr(self, name)) < 1:
                raise DomainError(f"{name} must be >= 1")


# --- shared pipeline -----------------------------------------------------------

def _design(cfg: RunConfig, d=None):
    return solve_design(cfg.ion_species(), cfg.d if d is None else d, cfg.rounding)


def _sequence(cfg, design):
    sp = design.species
    arms = expand_pattern(cfg.pattern, design.kicks_per_arm)
    return build_pulse_sequence(arms, sp.repetition_rate, sp.delta_k)


def _pair(cfg, geometry):
    if cfg.pair is None:
        return geometry.central_pair()
    if len(cfg.pair) != 2:
        raise DomainError("pair must list two ion indices")
    i, j = (int(x) for x in cfg.pair)
    n = geometry.ion_count
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise DomainError(f"pair ({i}, {j}) invalid for a {geometry.shape[0]}x{geometry.shape[1]} lattice")
    return i, j


def _fidelity(cfg, d=None, design=None):
    design = design or _design(cfg, d)
    sp = design.species
    geometry = build_square_lattice(cfg.rows, cfg.cols, design.spacing)
    modes = crystal_modes(geometry, sp.mass, design.omega_z)
    seq = _sequence(cfg, design)
    i, j = _pair(cfg, geometry)
    report = gate_infidelity(modes, seq, i, j, cfg.kelvin(sp))
    return design, geometry, modes, seq, report


# --- commands ------------------------------------------------------------------

def cmd_design(cfg, out):
    design = _design(cfg)
    print(f"species        {design.species.name}")
    print(f"d              {design.spacing * 1e6:.6g} um")
    print(f"M              {design.kicks_per_arm}")
    print(f"omega_z/2pi    {design.omega_z / (2 * math.pi) / 1e6:.6f} MHz")
    print(f"T              {design.gate_time * 1e6:.6g} us")
    print(f"epsilon        {design.epsilon:.4e}")
    print(f"round-off      {design.roundoff_bound:.4e}")
    io.write_text(out / "design.json", io.json_text(io.document("design", cfg.to_dict(), design.to_dict())))


def cmd_modes(cfg, out):
    design = _design(cfg)
    geometry = build_square_lattice(cfg.rows, cfg.cols, cfg.d)
    modes = crystal_modes(geometry, design.species.mass, design.omega_z)
    io.write_text(out / "modes.json", io.json_text(io.document("modes", cfg.to_dict(), modes.to_dict())))
    wz = design.omega_z
    rows = [(k, w / (2 * math.pi), w / wz, (wz - w) / (modes.epsilon * wz))
            for k, w in enumerate(modes.frequencies)]
    io.write_csv(out / "frequencies.csv", ("mode", "frequency_hz", "omega_over_omega_z", "shift_over_eps"),
                 rows, cfg.to_dict())
    print(f"{modes.size} modes, epsilon = {modes.epsilon:.4e}")
    print(f"lowest  {modes.frequencies[0] / (2 * math.pi) / 1e6:.9f} MHz")
    print(f"highest {modes.frequencies[-1] / (2 * math.pi) / 1e6:.9f} MHz")
    if modes.size == 2:
        print(f"ratio   {modes.frequencies[0] / modes.frequencies[1]:.12f}")


def cmd_fidelity(cfg, out):
    design, geometry, modes, seq, report = _fidelity(cfg)
    result = {"design": design.to_dict(), "lattice": [cfg.rows, cfg.cols],
              "report": report.to_dict(modes.frequencies)}
    io.write_text(out / "fidelity.json", io.json_text(io.document("fidelity", cfg.to_dict(), result)))
    io.write_csv(out / "per_mode.csv", ("mode", "frequency_hz", "contribution"),
                 [(k, w / (2 * math.pi), c) for k, (w, c) in enumerate(zip(modes.frequencies, report.per_mode))],
                 cfg.to_dict())
    traj = trajectory(modes, seq, report.pair, cfg.samples_per_kick)
    header = ["t_seconds"] + [f"dkz_ion{i}" for i in traj.ions]
    for k in traj.tracked_modes:
        header += [f"mode{k}_x", f"mode{k}_p"]
    rows = []
    for n, t in enumerate(traj.times):
        row = [t, *traj.displacements[n]]
        for q in traj.quadratures[n]:
            row += [q.real, q.imag]
        rows.append(row)
    io.write_csv(out / "trajectory.csv", header, rows, cfg.to_dict())
    print(f"pair           {report.pair}")
    print(f"theta          {report.theta:.10f} rad")
    print(f"rotation err   {report.rotation_error:.4e}")
    print(f"displacement   {report.displacement_error:.4e}")
    print(f"infidelity     {report.worst_case_infidelity:.4e}")
    print(f"average        {report.average_infidelity:.4e}")


def cmd_sweep(cfg, out):
    if cfg.sweep_variable == "d":
        values = np.linspace(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_num)
        values = np.unique(values)
        if len(values) == 0 or values[0] <= 0:
            raise DomainError("sweep range must contain positive spacings")
        rows = []
        for d in values:
            design, _, _, _, rep = _fidelity(cfg, d=float(d))
            rows.append((float(d), design.omega_z / (2 * math.pi), design.kicks_per_arm, design.gate_time,
                         design.epsilon, rep.worst_case_infidelity, rep.theta, rep.rotation_error,
                         design.roundoff_bound))
        header = ("d_m", "omega_z_hz", "M", "gate_time_s", "epsilon", "infidelity", "theta_rad",
                  "rotation_error", "roundoff_bound")
    elif cfg.sweep_variable == "n":
        lo, hi = int(round(cfg.sweep_start)), int(round(cfg.sweep_stop))
        if lo < 2 or hi < lo:
            raise DomainError("block-size sweep needs 2 <= start <= stop")
        design = _design(cfg)
        seq = _sequence(cfg, design)
        rows = []
        for n in range(lo, hi + 1):
            side = xt.lattice_size_for_blocks(n)
            geometry = build_square_lattice(side, side, design.spacing)
            modes = crystal_modes(geometry, design.species.mass, design.omega_z)
            pc = xt.parallel_crosstalk_per_gate(n, geometry, modes, seq, radius=cfg.lattice_sum_radius)
            rows.append((n, side, pc.numeric, pc.analytic, pc.gates_averaged))
        header = ("n", "lattice_side", "crosstalk_numeric", "crosstalk_analytic", "gates_averaged")
    else:
        raise DomainError(f"sweep_variable must be 'd' or 'n', got {cfg.sweep_variable!r}")
    io.write_csv(out / "sweep.csv", header, rows, cfg.to_dict())
    io.write_text(out / "sweep.json", io.json_text(io.document(
        "sweep", cfg.to_dict(), {"variable": cfg.sweep_variable, "columns": list(header), "rows": rows})))
    print(io.csv_text(header, rows), end="")


def cmd_dispersion(cfg, out):
    design = _design(cfg)
    eps, wz = design.epsilon, design.omega_z
    kd, omega, first = dispersion_grid(wz, eps, cfg.dispersion_grid)
    rows = [(kd[a], kd[b], omega[a, b] / (2 * math.pi), first[a, b] / (2 * math.pi))
            for a in range(len(kd)) for b in range(len(kd))]
    io.write_csv(out / "dispersion.csv", ("k1d", "k2d", "omega_hz", "omega_first_order_hz"), rows, cfg.to_dict())
    z = zeta(cfg.zeta_radius)
    summary = {"epsilon": eps, "omega_z_hz": wz / (2 * math.pi), "zeta": z,
               "band_min_hz": float(omega.min()) / (2 * math.pi), "band_max_hz": float(omega.max()) / (2 * math.pi),
               "band_min_over_omega_z": float(omega.min()) / wz}
    io.write_text(out / "dispersion.json", io.json_text(io.document("dispersion", cfg.to_dict(), summary)))
    print(f"zeta = {z:.6f}; band [{summary['band_min_over_omega_z']:.9f}, {float(omega.max()) / wz:.9f}] omega_z")


def cmd_velocity(cfg, out):
    design = _design(cfg)
    f = velocity_field(design.epsilon, design.omega_z, design.spacing, cfg.velocity_grid, cfg.velocity_radius)
    kd = f.k_axis * f.spacing
    speed = f.speed
    rows = [(kd[a], kd[b], f.vx[a, b], f.vy[a, b], speed[a, b])
            for a in range(len(kd)) for b in range(len(kd))]
    io.write_csv(out / "velocity.csv", ("k1d", "k2d", "v_gx", "v_gy", "speed"), rows, cfg.to_dict())
    summary = {"grid": f.grid, "radius": f.radius, "max_speed_m_s": f.max_speed,
               "unit_m_s": f.unit, "normalized_max": f.normalized_max}
    io.write_text(out / "velocity.json", io.json_text(io.document("velocity", cfg.to_dict(), summary)))
    print(f"max |v_g| = {f.max_speed:.6e} m/s = {f.normalized_max:.4f} eps omega_z d")


def cmd_propagate(cfg, out):
    design = _design(cfg)
    geometry = build_square_lattice(cfg.rows, cfg.cols, design.spacing)
    modes = crystal_modes(geometry, design.species.mass, design.omega_z)
    source = geometry.central_ion()
    window = cfg.time_window if cfg.time_window is not None else 2 * math.pi / design.omega_z
    times = np.linspace(0.0, window, cfg.time_points)
    resp = evolve_disturbance(modes, source, cfg.z0, cfg.v0, times)
    r = radial_distances(geometry, source)
    env = resp.envelope
    pos = geometry.positions / geometry.spacing
    rows = [(pos[i, 0], pos[i, 1], r[i], env[i]) for i in range(geometry.ion_count)]
    io.write_csv(out / "envelope.csv", ("x", "y", "r", "max_envelope_m"), rows, cfg.to_dict())
    energy = resp.mode_energy()
    cone = light_cone_radius(3.5, design.epsilon, design.omega_z, window) + 3
    summary = {"source": source, "window_s": window, "epsilon": design.epsilon,
               "energy_drift": float(np.max(np.abs(energy / energy[0] - 1))) if energy[0] else 0.0,
               "exterior_radius": cone, "exterior_response": exterior_response(resp, geometry, cone)}
    try:
        summary["radial_exponent"] = radial_exponent(resp, geometry, cfg.fit_rmin, cfg.fit_rmax)
    except DomainError:
        summary["radial_exponent"] = None
    io.write_text(out / "propagate.json", io.json_text(io.document("propagate", cfg.to_dict(), summary)))
    print(f"radial exponent  {summary['radial_exponent']}")
    print(f"exterior / eps   {summary['exterior_response'] / design.epsilon:.4e}")
    print(f"energy drift     {summary['energy_drift']:.3e}")


def cmd_crosstalk(cfg, out):
    design = _design(cfg)
    geometry = build_square_lattice(cfg.rows, cfg.cols, design.spacing)
    modes = crystal_modes(geometry, design.species.mass, design.omega_z)
    seq = _sequence(cfg, design)
    source = geometry.central_ion()
    entries = xt.crosstalk_map(geometry, modes, seq, source)
    io.write_csv(out / "crosstalk.csv", ("ion", "r", "theta_rad", "theta_sq"),
                 [(e.pair[1], e.separation, e.theta, e.infidelity) for e in entries], cfg.to_dict())
    summary = {"source": source, "slope": xt.power_law_slope(entries, cfg.fit_rmin, cfg.fit_rmax),
               "fit_range": [cfg.fit_rmin, cfg.fit_rmax],
               "lattice_sum_p3": lattice_sum(3, cfg.lattice_sum_radius),
               "analytic_coefficient": xt.analytic_crosstalk_per_gate(1, cfg.lattice_sum_radius)}
    n = cfg.block_size
    if n >= 2 and min(cfg.rows, cfg.cols) >= xt.lattice_size_for_blocks(n):
        pc = xt.parallel_crosstalk_per_gate(n, geometry, modes, seq, radius=cfg.lattice_sum_radius)
        summary["parallel"] = {"n": n, "numeric": pc.numeric, "analytic": pc.analytic,
                               "gates_averaged": pc.gates_averaged}
    io.write_text(out / "crosstalk.json", io.json_text(io.document("crosstalk", cfg.to_dict(), summary)))
    if n >= 1 and min(cfg.rows, cfg.cols) >= n + 1:
        sched = xt.build_block_schedule(cfg.rows, cfg.cols, n)
        io.write_text(out / "schedule.json", io.json_text(io.document("schedule", cfg.to_dict(), sched.to_dict())))
    print(f"slope (r in [{cfg.fit_rmin:g}, {cfg.fit_rmax:g}])  {summary['slope']:.4f}")
    if "parallel" in summary:
        p = summary["parallel"]
        print(f"per-gate crosstalk n={n}  numeric {p['numeric']:.4e}  analytic {p['analytic']:.4e}")


def cmd_schedule(cfg, out):
    sched = xt.build_block_schedule(cfg.rows, cfg.cols, cfg.block_size)
    io.write_text(out / "schedule.json", io.json_text(io.document("schedule", cfg.to_dict(), sched.to_dict())))
    print(f"{sched.serial_depth} groups for n = {sched.n} on {cfg.rows}x{cfg.cols}")


COMMANDS = {
    "design": (cmd_design, "solve trap frequency and kick count"),
    "modes": (cmd_modes, "transverse normal modes of the lattice"),
    "fidelity": (cmd_fidelity, "gate infidelity of a pair in the lattice"),
    "sweep": (cmd_sweep, "parameter sweep over d or block size n"),
    "dispersion": (cmd_dispersion, "infinite-lattice dispersion on a k-grid"),
    "velocity": (cmd_velocity, "group-velocity field and its maximum"),
    "propagate": (cmd_propagate, "response to a disturbance on the central ion"),
    "crosstalk": (cmd_crosstalk, "crosstalk map, inverse-cube fit, parallel crosstalk"),
    "schedule": (cmd_schedule, "block schedule of parallel gates"),
}

# flag name -> (config field, type)
_FLAGS = {
    "species": str, "d": float, "rows": int, "cols": int, "pattern": str, "rounding": str,
    "samples_per_kick": int, "lattice_sum_radius": int, "zeta_radius": int, "dispersion_grid": int,
    "velocity_grid": int, "velocity_radius": int, "block_size": int, "fit_rmin": float, "fit_rmax": float,
    "sweep_variable": str, "sweep_start": float, "sweep_stop": float, "sweep_num": int,
    "z0": float, "v0": float, "time_points": int, "time_window": float,
}


def _temperature_arg(text):
    if text in ("doppler", "zero"):
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'doppler', 'zero' or a temperature in kelvin") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--out", type=Path, default=Path("out"), help="output root (default ./out)")
    common.add_argument("--overwrite", action="store_true", help="replace existing outputs")
    for name, typ in _FLAGS.items():
        common.add_argument("--" + name.replace("_", "-"), dest=name, type=typ, default=argparse.SUPPRESS)
    common.add_argument("--pair", type=int, nargs=2, default=argparse.SUPPRESS, metavar=("I", "J"))
    common.add_argument("--temperature", type=_temperature_arg, default=argparse.SUPPRESS,
                        help="doppler | zero | kelvin")
    parser = argparse.ArgumentParser(prog="sdkgates", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=helptext)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    data = RunConfig().to_dict()
    if args.config is not None:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read config {args.config}: {exc}") from None
        if "config" in loaded and "schema_version" in loaded:
            loaded = loaded["config"]
        data.update(RunConfig.from_dict({**data, **loaded}).to_dict())
    for name in list(_FLAGS) + ["pair", "temperature"]:
        if hasattr(args, name):
            data[name] = getattr(args, name)
    cfg = RunConfig.from_dict(data)
    cfg.validate()
    return cfg


def _prepare_out(root: Path, command: str, overwrite: bool) -> Path:
    out = root / command
    if out.exists() and any(out.iterdir()):
        if not overwrite:
            raise DomainError(f"{out} is not empty; pass --overwrite to replace it")
        for p in out.iterdir():
            if p.is_file():
                p.unlink()
    out.mkdir(parents=True, exist_ok=True)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        out = _prepare_out(args.out, args.command, args.overwrite)
        COMMANDS[args.command][0](cfg, out)
        io.write_text(out / "config.json", io.json_text(cfg.to_dict()))
    except DomainError as exc:
        print(f"sdkgates {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"sdkgates {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
