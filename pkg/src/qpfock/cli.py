"""Command-line front end: ``qpfock <subcommand> [--config FILE] [--key value ...]``.

Every subcommand writes report.json (validated against the shipped schema),
table.csv and plot_*.dat data files into --out. Wall-clock timing goes to a
separate timing.json so that data outputs are byte-identical across runs
with the same configuration and seed.

Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 partial
(sweep with failed rows).
"""
from dataclasses import dataclass, field
from importlib import resources
import json
import math
import os
import sys
import time

import click
import jsonschema
import numpy as np

from . import __version__
from .errors import ConfigError, QPFockError
from .experiments import (density_summary, kernel_check, reconstruction_experiment,
                          run_sweep, sweep_betas, truncation_table)
from .fock import FockParams
from .gabor import riesz_bounds
from .interpolation import (ProductTruncation, evaluate_interpolant_log, growth_profile,
                            interpolate, interpolation_report, node_residuals)
from .logcomplex import log_rel_error
from .pointsets import pointset_from_descriptor
from .rng import rng_stream
from .theta import theta_eval

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_PARTIAL = 0, 2, 3, 4

DEFAULTS = {
    "density": {"pointset": None, "r_list": [4.0, 8.0, 16.0, 32.0, 64.0], "w_samples": None,
                "alpha": None, "metric": "cylinder"},
    "frame-bounds": {"pointset": None, "nu": 0.0, "K": [24, 48], "margin": 6, "precision": "auto"},
    "riesz-bounds": {"pointset": None, "nu": 0.0, "tol": 1e-15, "precision": "auto"},
    "sweep": {"beta_min": 0.6, "beta_max": 1.6, "steps": 21, "K": [24, 48], "margin": 6,
              "nu": 0.0, "precision": "auto"},
    "interpolate": {"pointset": None, "alpha": math.pi, "data": None, "weighted": False,
                    "n_terms": None, "tail_tol": 1e-12, "complete": False, "y_range": None,
                    "norm": True},
    "reconstruct": {"alpha": math.pi, "beta": 1.3 * math.pi, "coeffs": {"0": 1.0},
                    "n_points": 20, "y_max": 2.0, "extra": 12.0},
    "growth": {"pointset": None, "alpha": math.pi, "Y": 8.0, "nx": 32, "dist_floor": 0.05,
               "n_terms": None, "tail_tol": 1e-12, "complete": False},
    "kernel-check": {"params": [[math.pi, 0.0], [2.0, 0.3], [5.0, 0.9]], "n_pairs": 50,
                     "y_max": 3.0},
    "theta-eval": {"a": 0.0, "b": 0.0, "z": [0.0, 0.0], "tau": [0.0, 1.0], "abs_tol": 1e-16},
}


def _load_schema(name):
    return json.loads(resources.files("qpfock").joinpath("schemas", name).read_text())


# serialization ------------------------------------------------------------

def fmt_real(x):
    """17-significant-digit rendering; non-finite values as inf/-inf/nan."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else fmt_real(x)
    if isinstance(obj, complex):
        return [_jsonable(obj.real), _jsonable(obj.imag)]
    return obj


def dump_json(obj, indent=0):
    """JSON text with floats at 17 significant digits (stable across runs)."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dump_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dump_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dump_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, float):
        return fmt_real(obj)
    return json.dumps(obj)


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_real(v)
    s = "" if v is None else str(v)
    if any(c in s for c in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(_cell(r[h]) for h in header) + "\n")


def write_plot(path, columns, rows):
    with open(path, "w") as fh:
        fh.write("# " + " ".join(columns) + "\n")
        for r in rows:
            fh.write(" ".join(fmt_real(v) for v in r) + "\n")


# configuration ----------------------------------------------------------

def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_pointset(value):
    """Descriptor object, inline JSON text or path to a JSON file."""
    if isinstance(value, str):
        if os.path.exists(value):
            try:
                with open(value) as fh:
                    value = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read point set {value!r}: {exc}") from None
        else:
            try:
                value = json.loads(value)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"malformed point-set JSON: {exc}") from None
    return pointset_from_descriptor(value)


def build_config(command, config_path, overrides):
    """Merge defaults, the config file and inline flags; validate the result."""
    cfg = dict(DEFAULTS[command])
    if config_path:
        try:
            with open(config_path) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config_path!r}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update(loaded)
    for k, v in overrides.items():
        if v is not None:
            cfg[k] = _parse_value(v) if k != "pointset" else v
    if isinstance(cfg.get("pointset"), str):
        cfg["pointset"] = load_pointset(cfg["pointset"]).origin
    if "pointset" in cfg and cfg["pointset"] is None:
        raise ConfigError(f"{command} needs a point set (--pointset)")
    schema = _load_schema("config.schema.json")
    sub = dict(schema["$defs"][command])
    sub["$defs"] = schema["$defs"]
    try:
        jsonschema.validate(cfg, sub)
    except jsonschema.ValidationError as exc:
        path = "/".join(map(str, exc.absolute_path)) or "(root)"
        raise ConfigError(f"invalid config at {path}: {exc.message}") from None
    return cfg


def _cplx(v):
    return complex(v) if not isinstance(v, list) else complex(v[0], v[1])


def _precision(v):
    return None if v == "double" else v


# subcommands -------------------------------------------------------------

@dataclass
class Output:
    results: dict
    header: list
    rows: list
    plots: dict = field(default_factory=dict)    # name -> (columns, rows)
    status: str = "ok"
    timing: dict = field(default_factory=dict)


def cmd_density(cfg, seed, threads):
    """Beurling density curves, separation and uniform closeness of a point set."""
    Z = pointset_from_descriptor(cfg["pointset"])
    res = density_summary(Z, cfg["r_list"], cfg["w_samples"], cfg["alpha"], cfg["metric"])
    rows = res["per_r"]
    plots = {"density_minus": (["r", "inf_count_over_r"], [(r["r"], r["inf"]) for r in rows]),
             "density_plus": (["r", "sup_count_over_r"], [(r["r"], r["sup"]) for r in rows])}
    return Output(res, ["r", "inf", "sup"], rows, plots)


def _fb_row(fb):
    return {"K": fb.trunc.K, "margin": fb.trunc.margin, "A": fb.A, "B": fb.B,
            "log10_A": fb.log10_A, "A_lower": fb.A_lower, "A_upper": fb.A_upper,
            "method": fb.method, "dps": fb.dps, "structural_zero": fb.structural_zero,
            "z_min": fb.z_extent[0], "z_max": fb.z_extent[1]}


def cmd_frame_bounds(cfg, seed, threads):
    """Theta-Gabor frame bounds of a point set at several truncations."""
    Z = pointset_from_descriptor(cfg["pointset"])
    fbs = truncation_table(Z, cfg["nu"], cfg["K"], cfg["margin"], _precision(cfg["precision"]),
                           threads)
    rows = [_fb_row(fb) for fb in fbs]
    plots = {"frame_bounds": (["K", "log10_A"], [(r["K"], r["log10_A"]) for r in rows])}
    return Output({"truncations": rows, "n_points": len(Z)}, list(rows[0]), rows, plots)


def cmd_riesz(cfg, seed, threads):
    """Riesz lower bound (smallest Gram eigenvalue) of a point set."""
    Z = pointset_from_descriptor(cfg["pointset"])
    rb = riesz_bounds(Z, cfg["nu"], cfg["tol"], _precision(cfg["precision"]))
    row = {"riesz_lower": rb.value, "log10_riesz_lower": rb.log10_value, "lower": rb.lower,
           "upper": rb.upper, "largest": rb.largest, "n_points": rb.n_points,
           "method": rb.method, "dps": rb.dps}
    return Output(row, list(row), [row])


def cmd_sweep(cfg, seed, threads):
    """Frame and Riesz bounds across a range of lattice spacings."""
    betas = sweep_betas(cfg["beta_min"], cfg["beta_max"], cfg["steps"])
    rows = run_sweep(betas, cfg["K"], cfg["nu"], cfg["margin"], _precision(cfg["precision"]),
                     threads)
    data = [r.data() for r in rows]
    failed = sum(1 for r in rows if r.error)
    plots = {}
    for K in cfg["K"]:
        sel = [r for r in rows if r.K == K]
        plots[f"A_K{K}"] = (["beta", "A"], [(r.beta, r.A) for r in sel])
        plots[f"log10A_K{K}"] = (["beta", "log10_A"], [(r.beta, r.log10_A) for r in sel])
        plots[f"riesz_K{K}"] = (["beta", "riesz_lower"], [(r.beta, r.riesz_lower) for r in sel])
        plots[f"log10riesz_K{K}"] = (["beta", "log10_riesz_lower"],
                                     [(r.beta, r.log10_riesz) for r in sel])
    timing = {"rows_ms": [{"beta": r.beta, "K": r.K, "wall_ms": r.wall_ms} for r in rows]}
    return Output({"rows": data, "failed_rows": failed}, list(data[0]), data, plots,
                  "partial" if failed else "ok", timing)


def cmd_interpolate(cfg, seed, threads):
    """Interpolate data on a point set; report node residuals and norm ratio."""
    Z = pointset_from_descriptor(cfg["pointset"])
    p = FockParams(cfg["alpha"], 0.0)
    if cfg["data"] is None:
        rng = rng_stream(seed)
        data = rng.standard_normal(len(Z)) + 1j * rng.standard_normal(len(Z))
    else:
        if len(cfg["data"]) != len(Z):
            raise ConfigError(f"data has {len(cfg['data'])} values for {len(Z)} nodes")
        data = np.array([_cplx(v) for v in cfg["data"]])
    spec = interpolate(Z, data, p, ProductTruncation(cfg["n_terms"], cfg["tail_tol"], cfg["complete"]),
                       weighted=cfg["weighted"])
    y_range = tuple(cfg["y_range"]) if cfg["y_range"] else spec.band
    res = {"n_nodes": len(spec.product.zk), "band": list(spec.band), "y_range": list(y_range)}
    if cfg["norm"]:
        rep = interpolation_report(spec, y_max=y_range)
        res.update(max_node_residual=rep.max_node_residual, norm_ratio=rep.norm_ratio,
                   norm_sq=rep.norm_sq, data_norm_sq=rep.data_norm_sq)
    else:
        r = node_residuals(spec)
        res.update(max_node_residual=float(r.max()) if len(r) else 0.0, norm_ratio=None)
    zk = spec.product.zk
    inside = (zk.imag >= spec.band[0]) & (zk.imag <= spec.band[1])
    got = np.full(len(zk), np.nan + 0j)
    got[inside] = evaluate_interpolant_log(spec, zk[inside])
    err = np.where(inside, log_rel_error(got, spec.log_data), np.nan)
    rows = [{"index": int(i), "x": float(z.real), "y": float(z.imag), "in_band": bool(b),
             "log_abs_data": float(ld.real), "log_abs_value": float(g.real),
             "rel_residual": float(e)}
            for i, z, b, ld, g, e in zip(spec.product.idx, zk, inside, spec.log_data, got, err)]
    ys = np.linspace(y_range[0], y_range[1], 201)
    xs = np.arange(16) / 16
    zz = xs[None, :] + 1j * ys[:, None]
    lw = evaluate_interpolant_log(spec, zz).real - 0.5 * p.alpha * np.abs(zz) ** 2
    plots = {"interpolant": (["y", "sup_x_log_weighted_abs"], list(zip(ys, lw.max(axis=1))))}
    header = ["index", "x", "y", "in_band", "log_abs_data", "log_abs_value", "rel_residual"]
    return Output(res, header, rows, plots)


def cmd_reconstruct(cfg, seed, threads):
    """Rebuild a Fock function from its samples on a denser lattice."""
    try:
        coeffs = {int(k): _cplx(v) for k, v in cfg["coeffs"].items()}
    except ValueError:
        raise ConfigError("coeffs keys must be integers") from None
    res = reconstruction_experiment(coeffs, cfg["alpha"], cfg["beta"], cfg["n_points"],
                                    cfg["y_max"], cfg["extra"], seed)
    rows = [{"x": x, "y": y, "rel_error": e} for (x, y), e in zip(res["points"], res["rel_errors"])]
    plots = {"reconstruction_error": (["y", "rel_error"],
                                      sorted((r["y"], r["rel_error"]) for r in rows))}
    return Output(res, ["x", "y", "rel_error"], rows, plots)


def cmd_growth(cfg, seed, threads):
    """Growth fits of the weighted product function G."""
    Z = pointset_from_descriptor(cfg["pointset"])
    p = FockParams(cfg["alpha"], 0.0)
    g = growth_profile(Z, p, cfg["Y"], cfg["nx"], dist_floor=cfg["dist_floor"],
                       trunc=ProductTruncation(cfg["n_terms"], cfg["tail_tol"], cfg["complete"]))
    res = {"gamma_plus": g.gamma_plus, "gamma_minus": g.gamma_minus,
           "slopes_sup": g.slopes_sup, "slopes_inf": g.slopes_inf,
           "intercepts_sup": g.intercepts_sup, "intercepts_inf": g.intercepts_inf,
           "max_residual_sup": g.max_residual_sup, "max_residual_inf": g.max_residual_inf}
    rows = [{"side": s, "slope_sup": g.slopes_sup[s], "slope_inf": g.slopes_inf[s],
             "intercept_sup": g.intercepts_sup[s], "intercept_inf": g.intercepts_inf[s]}
            for s in ("plus", "minus")]
    plots = {"growth_sup": (["y", "sup_log_weighted_G"], list(zip(g.ys, g.sup_curve))),
             "growth_inf": (["y", "inf_log_weighted_G_over_dist"], list(zip(g.ys, g.inf_curve)))}
    return Output(res, list(rows[0]), rows, plots)


def cmd_kernel_check(cfg, seed, threads):
    """Pairwise agreement of the three reproducing-kernel series."""
    rows = kernel_check([tuple(x) for x in cfg["params"]], cfg["n_pairs"], cfg["y_max"], seed)
    dev = max(v for r in rows for k, v in r.items() if "_vs_" in k)
    return Output({"max_deviation": dev, "rows": rows}, list(rows[0]), rows)


def cmd_theta_eval(cfg, seed, threads):
    """Evaluate a theta function with characteristics."""
    v = theta_eval((cfg["a"], cfg["b"], _cplx(cfg["z"]), _cplx(cfg["tau"])), cfg["abs_tol"])
    c = complex(v.to_complex())
    row = {"re": c.real, "im": c.imag, "log_mod": float(v.log_mod), "phase": float(v.phase)}
    return Output({"value": [c.real, c.imag], "log_mod": row["log_mod"], "phase": row["phase"]},
                  list(row), [row])


COMMANDS = {
    "density": cmd_density,
    "frame-bounds": cmd_frame_bounds,
    "riesz-bounds": cmd_riesz,
    "sweep": cmd_sweep,
    "interpolate": cmd_interpolate,
    "reconstruct": cmd_reconstruct,
    "growth": cmd_growth,
    "kernel-check": cmd_kernel_check,
    "theta-eval": cmd_theta_eval,
}


def run(command, config_path=None, overrides=None, out=".", threads=1, seed=0, fmt="both"):
    """Execute one subcommand and write its outputs; returns the exit code."""
    t0 = time.perf_counter()
    try:
        if threads < 1:
            raise ConfigError("--threads must be >= 1")
        if not 0 <= seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        cfg = build_config(command, config_path, overrides or {})
        output = COMMANDS[command](cfg, seed, threads)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return EXIT_CONFIG
    except (QPFockError, ArithmeticError, FloatingPointError, ValueError) as exc:
        click.echo(f"numerical failure: {type(exc).__name__}: {exc}", err=True)
        return EXIT_NUMERIC
    os.makedirs(out, exist_ok=True)
    report = _jsonable({
        "command": command, "version": __version__, "seed": seed,
        "input": cfg, "status": output.status, "results": output.results,
        "timing_file": "timing.json",
    })
    jsonschema.validate(report, _load_schema("report.schema.json"))
    if fmt in ("json", "both"):
        with open(os.path.join(out, "report.json"), "w") as fh:
            fh.write(dump_json(report) + "\n")
    if fmt in ("csv", "both"):
        write_csv(os.path.join(out, "table.csv"), output.header, output.rows)
    for name, (cols, rows) in output.plots.items():
        write_plot(os.path.join(out, f"plot_{name}.dat"), cols, rows)
    timing = {"command": command, "threads": threads,
              "total_ms": int(round(1000 * (time.perf_counter() - t0)))}
    timing.update(output.timing)
    with open(os.path.join(out, "timing.json"), "w") as fh:
        fh.write(json.dumps(_jsonable(timing), indent=2) + "\n")
    if output.status == "partial":
        click.echo("some rows failed; see the error column", err=True)
        return EXIT_PARTIAL
    return EXIT_OK


def _make_command(name):
    params = [
        click.Option(["--config"], type=click.Path(), default=None, help="JSON config file."),
        click.Option(["--out"], type=click.Path(), default=".", show_default=True,
                     help="Output directory."),
        click.Option(["--threads"], type=int, default=1, show_default=True),
        click.Option(["--seed"], type=int, default=0, show_default=True),
        click.Option(["--format", "fmt"], type=click.Choice(["csv", "json", "both"]),
                     default="both", show_default=True),
    ]
    for key, default in DEFAULTS[name].items():
        params.append(click.Option([f"--{key.replace('_', '-')}", key], default=None,
                                   help=f"JSON value (default {json.dumps(default)})."))

    def callback(config, out, threads, seed, fmt, **overrides):
        sys.exit(run(name, config, overrides, out, threads, seed, fmt))

    doc = COMMANDS[name].__doc__ or f"Run the {name} experiment."
    return click.Command(name, params=params, callback=callback, help=doc)


@click.group()
@click.version_option(__version__)
def main():
    """Quasi-periodic Fock space and theta-Gabor experiments."""


for _name in COMMANDS:
    main.add_command(_make_command(_name))


if __name__ == "__main__":
    main()
