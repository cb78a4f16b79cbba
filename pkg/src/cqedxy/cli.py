"""Command-line interface.

Frequencies on the command line are linear (GHz, i.e. omega / 2 pi) and times
are in ns; they are converted to angular units once, here.  Configuration
comes from flags or from a JSON file (``--config``); flags win.

Exit codes: 0 success, 2 validation error, 3 tolerance failure, 4 range error.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import lattice as lat
from .dynamics import compare_full_effective, evolve, site_state
from .linalg import eig_hermitian
from .star import (
    StarParams,
    ancilla_energy_formula,
    ancilla_residual,
    build_star_hamiltonian,
    dress_star,
    effective_coupling,
)
from .transmon import CouplingRangeError, TransmonParams, coupling_at_flux, flux_for_coupling

TWO_PI = 2.0 * math.pi

EXIT_OK, EXIT_VALIDATION, EXIT_TOLERANCE, EXIT_RANGE = 0, 2, 3, 4

DEFAULTS = {
    "n": 3,
    "omega_r_ghz": 5.0,
    "omega_a_ghz": 6.0,
    "f_ghz": 0.1,
    "precision": 12,
    "format": "csv",
    "output": None,
    "flavor": "effective",
    "initial_site": 0,
    "lattice": {"kind": "chain", "n_sites": 6, "l1": 4, "l2": 4, "boundary": "periodic"},
    "transmon": {"ej_max_ghz": 50.0, "ec_ghz": 0.25, "flux_over_phi0": 0.0},
}


class ConfigError(ValueError):
    pass


# -- config -----------------------------------------------------------------

def parse_grid(value):
    """Grid from a number, a list, ``{"min", "max", "count"}`` or ``"min:max:count"``."""
    if isinstance(value, dict):
        lo, hi, count = float(value["min"]), float(value["max"]), int(value.get("count", 1))
    elif isinstance(value, str) and ":" in value:
        parts = value.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {value!r} must look like min:max:count")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    elif isinstance(value, (list, tuple)):
        return np.array([float(v) for v in value])
    else:
        return np.array([float(value)])
    if count < 1 or lo > hi:
        raise ConfigError(f"invalid grid min={lo} max={hi} count={count}")
    if count == 1:
        return np.array([lo])
    return np.linspace(lo, hi, count)


def scalar(value, name):
    grid = parse_grid(value)
    if len(grid) != 1:
        raise ConfigError(f"{name} must be a single value")
    return float(grid[0])


def merge_config(file_cfg, flags):
    cfg = json.loads(json.dumps(DEFAULTS))
    for source in (file_cfg, flags):
        for key, value in source.items():
            if value is None:
                continue
            if isinstance(value, dict) and isinstance(cfg.get(key), dict):
                cfg[key].update({k: v for k, v in value.items() if v is not None})
            else:
                cfg[key] = value
    if int(cfg["precision"]) < 1:
        raise ConfigError("precision must be >= 1")
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"unknown format {cfg['format']!r}")
    return cfg


def star_params(cfg, n=None, omega_a_ghz=None, f_ghz=None):
    n = int(cfg["n"] if n is None else n)
    wa = scalar(cfg["omega_a_ghz"], "omega_a_ghz") if omega_a_ghz is None else omega_a_ghz
    f = scalar(cfg["f_ghz"], "f_ghz") if f_ghz is None else f_ghz
    return StarParams.uniform(n, TWO_PI * float(cfg["omega_r_ghz"]), TWO_PI * wa, TWO_PI * f)


def lattice_spec(cfg):
    spec = cfg["lattice"]
    kind = spec.get("kind", "chain")
    if kind == "chain":
        return lat.LatticeSpec.chain(int(spec["n_sites"]), spec.get("boundary", "periodic"))
    return lat.LatticeSpec.kagome(int(spec["l1"]), int(spec["l2"]), spec.get("boundary", "periodic"))


def lattice_model(cfg, flavor=None):
    spec = lattice_spec(cfg)
    flavor = flavor or cfg["flavor"]
    full = lat.build_lattice(spec, "full", star_params(cfg, n=spec.n_star))
    if flavor == "full":
        return full
    if flavor == "effective":
        return lat.effective_from_full(full)
    raise ConfigError(f"unknown flavor {flavor!r}")


def transmon_params(cfg):
    t = cfg["transmon"]
    return TransmonParams(
        ej_max=TWO_PI * float(t["ej_max_ghz"]),
        ec=TWO_PI * float(t["ec_ghz"]),
        flux=float(t.get("flux_over_phi0", 0.0)),
        flux_quantum=1.0,
    )


# -- output -----------------------------------------------------------------

def fmt(x, precision):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), f".{precision}g")


def render_table(header, rows, cfg):
    p = int(cfg["precision"])
    if cfg["format"] == "json":
        records = [{h: _json_number(v, p) for h, v in zip(header, row)} for row in rows]
        return json.dumps(records, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v, p) for v in row])
    return buf.getvalue()


def _json_number(v, precision):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(fmt(v, precision))
    return v


def render_json(payload, cfg):
    p = int(cfg["precision"])

    def clean(obj):
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [clean(v) for v in obj]
        if isinstance(obj, (np.bool_, bool)):
            return bool(obj)
        return _json_number(obj, p)

    return json.dumps(clean(payload), indent=1, sort_keys=False) + "\n"


def emit(text, cfg, suffix=None):
    path = cfg.get("output")
    if path is None:
        if suffix is None:
            sys.stdout.write(text)
        return
    if suffix is not None:
        path = path.rsplit(".", 1)[0] + suffix
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# -- commands ---------------------------------------------------------------

def cmd_coupling_sweep(cfg):
    wr = float(cfg["omega_r_ghz"])
    omega_a = parse_grid(cfg["omega_a_ghz"])
    fs = parse_grid(cfg["f_ghz"])
    n = int(cfg["n"])
    rows = []
    for f in fs:
        for wa in omega_a:
            j = effective_coupling(n, TWO_PI * f, TWO_PI * (wa - wr)) / TWO_PI
            rows.append((wa, f, wa - wr, j))
    emit(render_table(["omega_a_ghz", "f_ghz", "delta_ghz", "j_n_ghz"], rows, cfg), cfg)
    return EXIT_OK


def star_report(params):
    """Verification bundle for one star; ``ok`` is False if an asserted check fails."""
    n = params.n
    h = build_star_hamiltonian(params)
    transformed, d = dress_star(params)
    scale = float(np.linalg.norm(h))
    residual = ancilla_residual(transformed)
    j_formula = effective_coupling(n, params.f, params.delta)
    off = transformed[:n, :n][~np.eye(n, dtype=bool)]
    j_error = float(np.max(np.abs(off - j_formula))) if n > 1 else 0.0
    eps_a_error = abs(d.eps_a - ancilla_energy_formula(n, params.f, params.delta, params.omega_r))
    eps_r_deviation = float(np.max(np.abs(np.diag(transformed)[:n] - d.eps_r_formula)))
    trace_error = abs(np.trace(transformed) - np.trace(h))
    checks = {
        "decoupling": residual < 1e-10 * scale,
        "j_agreement": j_error < 1e-10,
        "eps_a_agreement": eps_a_error < 1e-10,
        "trace": trace_error < 1e-10,
    }
    if n == 2:
        checks["eps_r_agreement"] = eps_r_deviation < 1e-10
    report = {
        "n": n,
        "omega_r_ghz": params.omega_r / TWO_PI,
        "omega_a_ghz": params.omega_a / TWO_PI,
        "f_ghz": params.f / TWO_PI,
        "theta": d.theta,
        "j_ghz": d.J / TWO_PI,
        "eps_r_ghz": d.eps_r / TWO_PI,
        "eps_r_formula_ghz": d.eps_r_formula / TWO_PI,
        "eps_a_ghz": d.eps_a / TWO_PI,
        # absolute errors in angular units (rad/ns)
        "decoupling_residual": residual,
        "j_error": j_error,
        "eps_a_error": eps_a_error,
        "eps_r_deviation": eps_r_deviation,
        "trace_error": trace_error,
        "checks": checks,
    }
    return report, all(checks.values())


def cmd_star_verify(cfg):
    ns = [int(v) for v in np.atleast_1d(cfg.get("n_values") or cfg["n"])]
    omega_a = parse_grid(cfg["omega_a_ghz"])
    fs = parse_grid(cfg["f_ghz"])
    points, ok = [], True
    for n in ns:
        for f in fs:
            for wa in omega_a:
                report, good = star_report(star_params(cfg, n=n, omega_a_ghz=wa, f_ghz=f))
                points.append(report)
                ok &= good
    emit(render_json({"passed": ok, "points": points}, cfg), cfg)
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_spectrum(cfg):
    model = lattice_model(cfg)
    w = eig_hermitian(model.hamiltonian).eigenvalues / TWO_PI
    emit(render_table(["index", "energy_ghz"], list(enumerate(w)), cfg), cfg)
    return EXIT_OK


def cmd_bands(cfg):
    model = lattice_model(cfg)
    counts = cfg.get("k_counts")
    grid = lat.uniform_k_grid(model, counts)
    table = lat.band_structure(model, grid)
    rows = []
    for k, band, e in table.rows():
        ky = k[1] if len(k) > 1 else 0.0
        rows.append((k[0], ky, band, e / TWO_PI))
    emit(render_table(["kx", "ky", "band", "energy_ghz"], rows, cfg), cfg)
    scale = abs(model.params.J) if model.flavor == "effective" else 1.0
    flat = lat.flat_bands(table, 1e-9, scale) if scale > 0 else []
    summary = {
        "kind": model.spec.kind,
        "flavor": model.flavor,
        "bands": int(table.energies.shape[1]),
        "k_points": int(len(grid)),
        "band_spread_ghz": [s / TWO_PI for s in table.spreads()],
        "flat_band": bool(flat),
        "flat_band_indices": flat,
    }
    emit(render_json(summary, cfg), cfg, suffix=".summary.json")
    return EXIT_OK


def cmd_dynamics(cfg):
    times = parse_grid(cfg.get("times_ns", {"min": 0.0, "max": 100.0, "count": 101}))
    site = int(cfg["initial_site"])
    if cfg.get("mode") == "compare":
        spec = lattice_spec(cfg)
        params = star_params(cfg, n=spec.n_star)
        n_res = lat.build_lattice(spec, "effective", lat.EffectiveParams(0.0)).dim
        comp = compare_full_effective(spec, params, site_state(n_res, site), times)
        trace, extra = comp.effective, comp.deviation
    else:
        model = lattice_model(cfg)
        trace, extra = evolve(model.hamiltonian, site_state(model.dim, site), times), None
    header = ["time_ns"] + [f"p_{i}" for i in range(trace.populations.shape[1])] + ["norm"]
    if extra is not None:
        header.append("deviation")
    rows = []
    for i, t in enumerate(trace.times):
        row = [t, *trace.populations[i], trace.norm[i]]
        if extra is not None:
            row.append(extra[i])
        rows.append(row)
    emit(render_table(header, rows, cfg), cfg)
    return EXIT_OK


def cmd_tune(cfg):
    if cfg.get("target_j_ghz") is None:
        raise ConfigError("tune needs target_j_ghz")
    target = float(cfg["target_j_ghz"])
    n = int(cfg["n"])
    f = TWO_PI * scalar(cfg["f_ghz"], "f_ghz")
    wr = TWO_PI * float(cfg["omega_r_ghz"])
    tp = transmon_params(cfg)
    try:
        flux = flux_for_coupling(TWO_PI * target, n, f, wr, tp)
    except CouplingRangeError as err:
        lo, hi = err.interval
        payload = {
            "target_j_ghz": target,
            "error": "range",
            "achievable_j_ghz": [lo / TWO_PI, hi / TWO_PI],
        }
        emit(render_json(payload, cfg), cfg)
        return EXIT_RANGE
    achieved = coupling_at_flux(tp, n, f, wr, flux) / TWO_PI
    payload = {
        "target_j_ghz": target,
        "flux_over_phi0": flux,
        "achieved_j_ghz": achieved,
        "residual": abs(achieved - target),
    }
    emit(render_json(payload, cfg), cfg)
    return EXIT_OK


COMMANDS = {
    "coupling-sweep": cmd_coupling_sweep,
    "star-verify": cmd_star_verify,
    "spectrum": cmd_spectrum,
    "bands": cmd_bands,
    "dynamics": cmd_dynamics,
    "tune": cmd_tune,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="cqedxy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--n", type=int)
        p.add_argument("--omega-r-ghz", type=float, dest="omega_r_ghz")
        p.add_argument("--omega-a-ghz", dest="omega_a_ghz", help="value or min:max:count")
        p.add_argument("--f-ghz", dest="f_ghz", help="value or min:max:count")
        p.add_argument("--output", "-o")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--precision", type=int)

    def lattice_flags(p):
        p.add_argument("--kind", choices=["chain", "kagome"])
        p.add_argument("--n-sites", type=int, dest="n_sites")
        p.add_argument("--l1", type=int)
        p.add_argument("--l2", type=int)
        p.add_argument("--boundary", choices=["open", "periodic"])
        p.add_argument("--flavor", choices=["full", "effective"])

    p = sub.add_parser("coupling-sweep", help="J_n over an (omega_a, f) grid")
    common(p)
    p = sub.add_parser("star-verify", help="check the decoupling transformation")
    common(p)
    p.add_argument("--n-values", dest="n_values", type=int, nargs="+")
    p = sub.add_parser("spectrum", help="eigenvalues of a lattice model")
    common(p)
    lattice_flags(p)
    p = sub.add_parser("bands", help="Bloch bands of a periodic lattice model")
    common(p)
    lattice_flags(p)
    p.add_argument("--k-counts", dest="k_counts", type=int, nargs="+")
    p = sub.add_parser("dynamics", help="single-excitation populations in time")
    common(p)
    lattice_flags(p)
    p.add_argument("--times-ns", dest="times_ns", help="value or min:max:count")
    p.add_argument("--initial-site", dest="initial_site", type=int)
    p.add_argument("--compare", dest="mode", action="store_const", const="compare")
    p = sub.add_parser("tune", help="flux giving a target coupling")
    common(p)
    p.add_argument("--target-j-ghz", dest="target_j_ghz", type=float)
    p.add_argument("--ej-max-ghz", dest="ej_max_ghz", type=float)
    p.add_argument("--ec-ghz", dest="ec_ghz", type=float)
    return parser


LATTICE_KEYS = ("kind", "n_sites", "l1", "l2", "boundary")
TRANSMON_KEYS = ("ej_max_ghz", "ec_ghz")


def main(argv=None):
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    try:
        file_cfg = {}
        if args.get("config"):
            with open(args["config"], encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        command = args.get("command") or file_cfg.get("command")
        if command not in COMMANDS:
            parser.error("a command is required")
        flags = {k: v for k, v in args.items() if k not in ("config", "command")}
        flags["lattice"] = {k: flags.pop(k, None) for k in LATTICE_KEYS}
        flags["transmon"] = {k: flags.pop(k, None) for k in TRANSMON_KEYS}
        if command == "coupling-sweep":
            # default (omega_a, f) window: omega_a from omega_r up 2 GHz, f up to 0.3 GHz
            base = float(flags.get("omega_r_ghz") or file_cfg.get("omega_r_ghz") or DEFAULTS["omega_r_ghz"])
            file_cfg = {
                "omega_a_ghz": {"min": base, "max": base + 2.0, "count": 41},
                "f_ghz": {"min": 0.0, "max": 0.3, "count": 31},
                **file_cfg,
            }
        cfg = merge_config(file_cfg, flags)
        return COMMANDS[command](cfg)
    except (ValueError, KeyError, TypeError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION


def entry():
    sys.exit(main())
