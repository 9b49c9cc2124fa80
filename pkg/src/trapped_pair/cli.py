"""Command-line front end.

``trapped-pair <command> [--config FILE] [--preset NAME] [--dotted.key value ...]
[--out PATH] [--format csv|json]``

Configuration is a flat ``key = value`` text file with dotted keys; flags of
the same dotted names override it, and a preset supplies defaults. Output is
CSV (header row, ``,`` separator, LF line endings) or JSON
``{"meta": {...}, "data": [...]}``; numbers carry 12 significant digits so
identical runs give identical bytes.

Exit status: 0 on success, 2 when some points failed (left as ``nan``), 1 on
a configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import __version__
from .core import ATOMIC_MASS, DomainError, NoRootError, TrapGeometry, TrappedPairError
from .spectrum import solve_branch, sweep_spectrum, worker_count

COMMANDS = ("spectrum", "wavefunction", "lowdim-compare", "feshbach", "specfun-check")
RB87_MASS_AMU = 86.909180527


class ConfigError(TrappedPairError):
    """Malformed or missing configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"config key '{key}': {message}")
        self.key = key


# ---------------------------------------------------------------------------
# configuration schema

_REQUIRED = object()


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


def _parse_opt_float(text: str) -> Optional[float]:
    return None if text.strip().lower() in ("", "none") else float(text)


_COMMON = {
    "trap.eta": (float, _REQUIRED),
    "trap.omega_z_khz": (_parse_opt_float, None),
    "trap.mass_amu": (_parse_opt_float, None),
    "run.workers": (int, 0),
}

_SWEEP_INV_A = {
    "sweep.inv_a.min": (float, -5.0),
    "sweep.inv_a.max": (float, 5.0),
    "sweep.inv_a.n": (int, 200),
}

SCHEMA: dict[str, dict[str, tuple[Callable[[str], Any], Any]]] = {
    "spectrum": {**_COMMON, **_SWEEP_INV_A, "sweep.branches": (int, 12)},
    "lowdim-compare": {**_COMMON, **_SWEEP_INV_A, "sweep.branches": (int, 3),
                       "lowdim.model": (str, "auto")},
    "wavefunction": {
        **_COMMON,
        "state.inv_a": (float, 0.0),
        "state.branch": (str, "ground"),
        "grid.rho.min": (float, 0.0),
        "grid.rho.max": (float, 1.0),
        "grid.rho.n": (int, 50),
        "grid.rho.values": (_parse_floats, None),
        "grid.z.min": (float, -2.0),
        "grid.z.max": (float, 2.0),
        "grid.z.n": (int, 50),
        "grid.z.values": (_parse_floats, None),
        "wavefunction.normalized": (_parse_bool, False),
        "wavefunction.tol": (float, 1e-10),
        "wavefunction.approx": (str, "none"),
    },
    "feshbach": {
        **_COMMON,
        "feshbach.units": (str, "si"),
        "feshbach.a_bg_nm": (float, None),
        "feshbach.a_bg": (float, None),
        "feshbach.delta_b_mt": (float, _REQUIRED),
        "feshbach.b0_mt": (float, _REQUIRED),
        "feshbach.em_slope_mub": (float, None),
        "feshbach.em_slope": (float, None),
        "sweep.b.min_mt": (float, _REQUIRED),
        "sweep.b.max_mt": (float, _REQUIRED),
        "sweep.b.n": (int, 200),
        "sweep.branches": (int, 6),
    },
    "specfun-check": {"run.workers": (int, 0)},
}

PRESETS: dict[str, dict[str, str]] = {
    "fig1": {"command": "spectrum", "trap.eta": "5", "sweep.inv_a.min": "-5",
             "sweep.inv_a.max": "5", "sweep.inv_a.n": "200", "sweep.branches": "12"},
    "fig2": {"command": "spectrum", "trap.eta": "1.1", "sweep.inv_a.min": "-5",
             "sweep.inv_a.max": "5", "sweep.inv_a.n": "200", "sweep.branches": "12"},
    "fig2-sphere": {"command": "spectrum", "trap.eta": "1", "sweep.inv_a.min": "-5",
                    "sweep.inv_a.max": "5", "sweep.inv_a.n": "200", "sweep.branches": "12"},
    "fig3": {"command": "lowdim-compare", "trap.eta": "10", "sweep.inv_a.min": "-5",
             "sweep.inv_a.max": "5", "sweep.inv_a.n": "200", "sweep.branches": "3",
             "lowdim.model": "1d"},
    "fig-pancake": {"command": "spectrum", "trap.eta": "0.2", "sweep.inv_a.min": "-5",
                    "sweep.inv_a.max": "5", "sweep.inv_a.n": "200", "sweep.branches": "12"},
    "fig4": {"command": "lowdim-compare", "trap.eta": "0.1", "sweep.inv_a.min": "-5",
             "sweep.inv_a.max": "5", "sweep.inv_a.n": "200", "sweep.branches": "3",
             "lowdim.model": "2d"},
    "fig5": {"command": "wavefunction", "trap.eta": "100", "state.inv_a": "0",
             "state.branch": "ground", "grid.rho.min": "0", "grid.rho.max": "0.3",
             "grid.rho.n": "61", "grid.z.min": "-1.5", "grid.z.max": "1.5", "grid.z.n": "61",
             "wavefunction.approx": "q1d-bound"},
    "fig6": {"command": "wavefunction", "trap.eta": "100", "state.inv_a": "0",
             "state.branch": "first-excited", "grid.rho.min": "0", "grid.rho.max": "0.3",
             "grid.rho.n": "61", "grid.z.min": "-3", "grid.z.max": "3", "grid.z.n": "61"},
    "fig7": {"command": "wavefunction", "trap.eta": "100", "state.inv_a": "0",
             "state.branch": "first-excited", "grid.rho.values": "0,0.08,0.16",
             "grid.z.min": "0.01", "grid.z.max": "3", "grid.z.n": "300",
             "wavefunction.approx": "q1d-excited"},
    "fig8": {"command": "wavefunction", "trap.eta": "100", "state.inv_a": "0",
             "state.branch": "first-excited", "grid.rho.min": "0.002", "grid.rho.max": "0.4",
             "grid.rho.n": "200", "grid.z.values": "0,0.5,1",
             "wavefunction.approx": "q1d-excited"},
    "fig9": {"command": "wavefunction", "trap.eta": "0.01", "state.inv_a": "0",
             "state.branch": "ground", "grid.rho.min": "0.1", "grid.rho.max": "20",
             "grid.rho.n": "61", "grid.z.min": "-2", "grid.z.max": "2", "grid.z.n": "41",
             "wavefunction.approx": "q2d-bound"},
    "fig10": {"command": "wavefunction", "trap.eta": "0.01", "state.inv_a": "0",
              "state.branch": "first-excited", "grid.rho.min": "0.05", "grid.rho.max": "30",
              "grid.rho.n": "300", "grid.z.values": "0,1,2",
              "wavefunction.approx": "q2d-excited"},
    "fig11": {"command": "feshbach", "trap.eta": "100", "trap.omega_z_khz": "5",
              "trap.mass_amu": str(RB87_MASS_AMU), "feshbach.units": "si",
              "sweep.b.n": "200", "sweep.branches": "6"},
    "fig12": {"command": "feshbach", "trap.eta": "0.01", "trap.omega_z_khz": "500",
              "trap.mass_amu": str(RB87_MASS_AMU), "feshbach.units": "si",
              "sweep.b.n": "200", "sweep.branches": "6"},
}


@dataclass
class RunConfig:
    """Validated configuration of one run."""

    command: str
    values: dict[str, Any]
    output_path: Optional[str] = None
    format: str = "csv"
    echo: dict[str, str] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def trap(self) -> TrapGeometry:
        eta = self.values["trap.eta"]
        wz = self.values.get("trap.omega_z_khz")
        mass = self.values.get("trap.mass_amu")
        try:
            if wz is None and mass is None:
                return TrapGeometry(eta)
            if wz is None or mass is None:
                key = "trap.omega_z_khz" if wz is None else "trap.mass_amu"
                raise ConfigError(key, "physical units need both trap.omega_z_khz and trap.mass_amu")
            return TrapGeometry(eta, 2.0 * math.pi * 1e3 * wz, 0.5 * mass * ATOMIC_MASS)
        except DomainError as exc:
            raise ConfigError("trap.eta", str(exc)) from None


def read_config_file(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line.split()[0], f"line {num} is not 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def build_config(command: str, raw: dict[str, str], out: Optional[str] = None,
                 fmt: str = "csv") -> RunConfig:
    """Type-check ``raw`` against the command's schema."""
    if command not in SCHEMA:
        raise ConfigError("command", f"unknown command {command!r}")
    if fmt not in ("csv", "json"):
        raise ConfigError("--format", f"must be csv or json, got {fmt!r}")
    schema = SCHEMA[command]
    values: dict[str, Any] = {}
    for key in raw:
        if key != "command" and key not in schema:
            raise ConfigError(key, f"not a valid key for '{command}'")
    for key, (conv, default) in schema.items():
        if key in raw:
            try:
                values[key] = conv(raw[key])
            except (TypeError, ValueError):
                raise ConfigError(key, f"cannot parse {raw[key]!r}") from None
        elif default is _REQUIRED:
            raise ConfigError(key, "required but missing")
        else:
            values[key] = default
    for key in ("sweep.inv_a.n", "grid.rho.n", "grid.z.n", "sweep.b.n", "sweep.branches"):
        if key in values and values[key] < 1:
            raise ConfigError(key, "must be at least 1")
    echo = {k: raw[k] for k in sorted(raw) if k != "command"}
    return RunConfig(command, values, out, fmt, echo)


# ---------------------------------------------------------------------------
# output


def _fmt(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".12g")
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return float(format(v, ".12g"))
    return v


def render(cfg: RunConfig, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    if cfg.format == "json":
        doc = {"meta": {"command": cfg.command, "config": cfg.echo, "version": __version__},
               "data": [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows]}
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows([_fmt(v) for v in row] for row in rows)
    return buf.getvalue()


def _linspace(cfg: RunConfig, lo_key: str, hi_key: str, n_key: str) -> np.ndarray:
    lo, hi, n = cfg[lo_key], cfg[hi_key], cfg[n_key]
    if n == 1:
        return np.array([lo], dtype=float)
    for key in (lo_key, hi_key):
        if not math.isfinite(cfg[key]):
            raise ConfigError(key, "must be finite unless the grid has a single point")
    return np.linspace(lo, hi, n)


def _grid(cfg: RunConfig, prefix: str) -> np.ndarray:
    values = cfg.values.get(f"{prefix}.values")
    if values:
        return np.asarray(values, dtype=float)
    return _linspace(cfg, f"{prefix}.min", f"{prefix}.max", f"{prefix}.n")


def _workers(cfg: RunConfig, n: int) -> int:
    w = cfg.values.get("run.workers", 0)
    return worker_count(n) if not w else max(1, min(w, n))


# ---------------------------------------------------------------------------
# commands


def run_spectrum(cfg: RunConfig):
    trap = cfg.trap()
    grid = _linspace(cfg, "sweep.inv_a.min", "sweep.inv_a.max", "sweep.inv_a.n")
    nb = cfg["sweep.branches"]
    sw = sweep_spectrum(grid, nb, trap, workers=_workers(cfg, nb))
    rows, gaps = [], 0
    for b in range(nb):
        for i, ia in enumerate(grid):
            e = sw.branches[b][i]
            gaps += not math.isfinite(e)
            rows.append((float(ia), b, e + trap.e_zero, e, sw.residuals[b][i]))
    return ("inv_a", "branch", "E_total", "E_shifted", "residual"), rows, gaps


def _lowdim_point(args):
    ia, eta, nb, model = args
    from .lowdim import compare_lowdim
    return [(r.inv_a, r.branch, r.e_exact, r.e_static, r.e_energy)
            for r in compare_lowdim([ia], TrapGeometry(eta), nb, model)]


def run_lowdim(cfg: RunConfig):
    trap = cfg.trap()
    model = cfg["lowdim.model"]
    if model not in ("auto", "1d", "2d"):
        raise ConfigError("lowdim.model", "must be auto, 1d or 2d")
    grid = _linspace(cfg, "sweep.inv_a.min", "sweep.inv_a.max", "sweep.inv_a.n")
    nb = cfg["sweep.branches"]
    tasks = [(float(ia), trap.eta, nb, model) for ia in grid]
    results = _map(_lowdim_point, tasks, _workers(cfg, len(tasks)))
    from .spectrum import eigen_residual
    rows, gaps = [], 0
    for block in results:
        for ia, b, ex, st, en in block:
            gaps += not math.isfinite(ex)
            res = eigen_residual(ex, ia, trap.eta) if math.isfinite(ex) else math.nan
            rows.append((ia, b, ex + trap.e_zero, st + trap.e_zero, en + trap.e_zero, res))
    return ("inv_a", "branch", "E_exact", "E_lowdim_static", "E_lowdim_energy", "residual"), rows, gaps


def _state_branch(text: str) -> int:
    low = text.strip().lower()
    names = {"ground": 0, "first-excited": 1, "second-excited": 2}
    if low in names:
        return names[low]
    if low.startswith("excited-"):
        return int(low.split("-", 1)[1])
    return int(low)


_APPROX = ("none", "q1d-bound", "q2d-bound", "q1d-excited", "q2d-excited")


def _wave_row(args):
    from . import wavefun as wf
    e, eta, rho, z, tol, approx = args
    trap = TrapGeometry(eta)
    r = math.hypot(rho, z)
    if r == 0:
        val, err = math.inf, 0.0
        r_psi = 1.0 / (2.0 * math.pi)
    else:
        try:
            ev = wf.psi(e, rho, z, trap, tol)
            val, err = ev.value, ev.abs_err
        except (TrappedPairError, ArithmeticError):
            val, err = math.nan, math.nan
        r_psi = r * val
    out = [rho, z, val, r_psi, err]
    if approx != "none":
        fn = {"q1d-bound": wf.psi_q1d_bound, "q2d-bound": wf.psi_q2d_bound,
              "q1d-excited": wf.psi_q1d_excited, "q2d-excited": wf.psi_q2d_excited}[approx]
        try:
            out.append(fn(e, rho, z, trap).value)
        except (TrappedPairError, ArithmeticError):
            out.append(math.nan)
    return out


def run_wavefunction(cfg: RunConfig):
    from .wavefun import norm_axial
    trap = cfg.trap()
    approx = cfg["wavefunction.approx"]
    if approx not in _APPROX:
        raise ConfigError("wavefunction.approx", f"must be one of {', '.join(_APPROX)}")
    try:
        branch = _state_branch(cfg["state.branch"])
    except ValueError:
        raise ConfigError("state.branch", "use ground, first-excited, excited-N or an integer") from None
    try:
        energy = solve_branch(cfg["state.inv_a"], branch, trap)
    except (NoRootError, DomainError) as exc:
        raise ConfigError("state.branch", f"no eigenstate: {exc}") from None
    rho = _grid(cfg, "grid.rho")
    z = _grid(cfg, "grid.z")
    if np.any(rho < 0):
        raise ConfigError("grid.rho.min", "rho must be nonnegative")
    tasks = [(energy.value, trap.eta, float(r), float(zz), cfg["wavefunction.tol"], approx)
             for r in rho for zz in z]
    rows = _map(_wave_row, tasks, _workers(cfg, len(tasks)), chunks=True)
    if cfg["wavefunction.normalized"]:
        factor = norm_axial(energy, trap).factor
        for row in rows:
            for i in (2, 3):
                row[i] *= factor
            if len(row) > 5:
                row[5] *= factor
    gaps = sum(1 for row in rows if math.isnan(row[2]))
    cols = ["rho", "z", "psi", "r_psi", "residual"]
    if approx != "none":
        cols.append("psi_approx")
    return tuple(cols), rows, gaps


def _feshbach_params(cfg: RunConfig, trap: TrapGeometry):
    from .feshbach import BOHR_MAGNETON, FeshbachParams
    units = cfg["feshbach.units"]
    db = cfg["feshbach.delta_b_mt"] * 1e-3
    b0 = cfg["feshbach.b0_mt"] * 1e-3
    try:
        if units == "si":
            if not trap.has_physical_units:
                raise ConfigError("trap.omega_z_khz", "SI Feshbach parameters need physical trap units")
            for key in ("feshbach.a_bg_nm", "feshbach.em_slope_mub"):
                if cfg.values.get(key) is None:
                    raise ConfigError(key, "required when feshbach.units = si")
            return FeshbachParams.from_si(cfg["feshbach.a_bg_nm"] * 1e-9, db, b0,
                                          cfg["feshbach.em_slope_mub"] * BOHR_MAGNETON, trap)
        if units == "trap":
            for key in ("feshbach.a_bg", "feshbach.em_slope"):
                if cfg.values.get(key) is None:
                    raise ConfigError(key, "required when feshbach.units = trap")
            # em_slope is given per mT
            return FeshbachParams(cfg["feshbach.a_bg"], db, b0, cfg["feshbach.em_slope"] * 1e3)
    except DomainError as exc:
        raise ConfigError("feshbach.units", str(exc)) from None
    raise ConfigError("feshbach.units", "must be si or trap")


def run_feshbach(cfg: RunConfig):
    from .feshbach import sweep_feshbach
    trap = cfg.trap()
    params = _feshbach_params(cfg, trap)
    grid_mt = _linspace(cfg, "sweep.b.min_mt", "sweep.b.max_mt", "sweep.b.n")
    nb = cfg["sweep.branches"]
    sw = sweep_feshbach(params, TrapGeometry(trap.eta), grid_mt * 1e-3, nb,
                        workers=_workers(cfg, len(grid_mt)))
    rows, gaps = [], 0
    for b in range(nb):
        for i, bm in enumerate(grid_mt):
            e = sw.energies[b][i]
            gaps += not math.isfinite(e)
            rows.append((float(bm), b, e, sw.a_eff[b][i], 0, sw.residuals[b][i]))
    for i, bm in enumerate(grid_mt):
        rows.append((float(bm), -1, sw.locus[i], math.inf, 1, 0.0))
    return ("B", "branch", "E", "a_eff", "is_divergence_locus", "residual"), rows, gaps


def specfun_checks() -> list[tuple[str, float, float, float, bool]]:
    """Internal consistency checks against closed forms and tabulated constants."""
    from .fcal import f_value, phi_eval
    from .specfun import ZETA_HALF, digamma, gamma_ratio, hurwitz_zeta, EULER_GAMMA
    from .quadrature import integrate_semi_infinite
    checks = [
        ("zeta(1/2)", ZETA_HALF, -1.4603545088095868, 1e-13),
        ("zetaH(2,1)=pi^2/6", hurwitz_zeta(2.0, 1.0), math.pi ** 2 / 6, 1e-14),
        ("psi(1)=-gamma", digamma(1.0), -EULER_GAMMA, 1e-14),
        ("Gamma(1/2)/Gamma(1)", gamma_ratio(0.5, 1.0), math.sqrt(math.pi), 1e-14),
        ("Phi(0)", phi_eval(0.0), 1.9377897837407083, 1e-12),
        ("F(2.3) at eta=1", f_value(2.3, 1.0),
         -2 * math.sqrt(math.pi) * math.gamma(2.3) / math.gamma(1.8), 1e-12),
        ("F(0.7) at eta=1", f_value(0.7, 1.0),
         -2 * math.sqrt(math.pi) * math.gamma(0.7) / math.gamma(0.2), 1e-12),
        ("int exp(-t) dt", integrate_semi_infinite(lambda t: np.exp(-t)).value, 1.0, 1e-12),
    ]
    return [(name, float(v), float(ref), abs(v - ref) / max(1.0, abs(ref)),
             abs(v - ref) <= tol * max(1.0, abs(ref))) for name, v, ref, tol in checks]


def run_specfun_check(cfg: RunConfig):
    rows = specfun_checks()
    gaps = sum(1 for r in rows if not r[4])
    return ("name", "value", "reference", "rel_err", "pass"), rows, gaps


RUNNERS = {"spectrum": run_spectrum, "wavefunction": run_wavefunction,
           "lowdim-compare": run_lowdim, "feshbach": run_feshbach,
           "specfun-check": run_specfun_check}


def _map(fn, tasks, workers: int, chunks: bool = False):
    if workers > 1 and len(tasks) > 1:
        size = max(1, len(tasks) // (8 * workers)) if chunks else 1
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks, chunksize=size))
    return [fn(t) for t in tasks]


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute a validated configuration and write its output."""
    columns, rows, gaps = RUNNERS[cfg.command](cfg)
    text = render(cfg, columns, rows)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        (stdout or sys.stdout).write(text)
    return 2 if gaps else 0


# ---------------------------------------------------------------------------
# argument handling


def _split_overrides(extra: Sequence[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--"):
            raise ConfigError(tok, "expected a --dotted.key flag")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extra):
                raise ConfigError(key, "flag needs a value")
            value = extra[i + 1]
            i += 2
        out[key] = value
    return out


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="trapped-pair",
        description="Spectra and wavefunctions of two atoms with a contact interaction "
                    "in an axially symmetric harmonic trap.",
        epilog="Any schema key can be given as --dotted.key VALUE. Presets: "
               + ", ".join(PRESETS) + ".")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat 'key = value' file with dotted keys")
    p.add_argument("--preset", choices=sorted(PRESETS), help="built-in figure configuration")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", default="csv", choices=("csv", "json"))
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    args, extra = parser.parse_known_args(argv)
    try:
        raw: dict[str, str] = {}
        if args.preset:
            preset = dict(PRESETS[args.preset])
            if preset.pop("command") != args.command:
                raise ConfigError("--preset", f"preset {args.preset} is for "
                                  f"'{PRESETS[args.preset]['command']}'")
            raw.update(preset)
        if args.config:
            raw.update(read_config_file(args.config))
        raw.update(_split_overrides(extra))
        cfg = build_config(args.command, raw, args.out, args.format)
        return run(cfg)
    except ConfigError as exc:
        print(f"trapped-pair: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
