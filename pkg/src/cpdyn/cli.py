"""cpdyn command line: point, sweep, oracle, check.

Configuration is flat ``section.key = value`` text. Any key can be given on
the command line as ``--section.key value``; ``--out`` and ``--format`` are
shorthands for ``output.path`` and ``output.format``.

Exit codes: 0 ok, 1 check or numerical failure, 2 config error, 3 I/O error,
4 oracle deviation over bound.
"""

import argparse
import io
import json
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import params as P
from .oracle import OracleCtrl, oracle_eq5, oracle_eq7a
from .potential import EPS_LC, TOL, LightConeError, potential_total
from .quad import AccuracyError

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_IO, EXIT_ORACLE = 0, 1, 2, 3, 4
MAX_ORACLE_POINTS = 16

SWEEP_COLUMNS = ("R", "t", "x", "tau", "term_resonant", "term_cp_dispersion",
                 "term_dynamic", "total", "reduced_total", "err_flag")
POINT_COLUMNS = ("R", "t", "x", "tau", "energy_unit", "term_resonant", "term_cp_dispersion",
                 "term_dynamic", "total", "reduced_resonant", "reduced_cp_dispersion",
                 "reduced_dynamic", "reduced_total", "err_est", "err_flag")
ORACLE_COLUMNS = ("R", "t", "x", "tau", "route", "closed_form", "oracle", "deviation",
                  "oracle_err_est", "err_flag")

# oracle grid used when none is configured, in units of 1/k0 and 1/(c k0)
DESK_X = (1.0, 2.0)
DESK_TAU = (3.0, 6.0)

DEFAULTS = {
    "atomA.mu": "2.5e-18, 0, 0",
    "atomA.k0": "1e5",
    "atomA.gamma": "",
    "atomA.excited_sign": "as_printed",
    "atomA.isotropic": "false",
    "atomB.model": "static_constant",
    "atomB.alpha0": "2.4e-23",
    "atomB.mu": "",
    "atomB.kB": "",
    "atomB.table": "",
    "atomB.rule": "pchip",
    "atomB.alpha_k0": "",
    "conventions.resonant_alpha_choice": "alpha_at_k0",
    "conventions.dynamic_normalization": "mode_sum",
    "units.hbar_c": repr(P.HBAR_C),
    "units.c": repr(P.C_LIGHT),
    "point.R": "",
    "point.t": "",
    "grid.R": "",
    "grid.R.min": "",
    "grid.R.max": "",
    "grid.R.count": "",
    "grid.t": "",
    "grid.t.min": "",
    "grid.t.max": "",
    "grid.t.count": "",
    "grid.direction": "0, 0, 1",
    "quad.tol": repr(TOL),
    "quad.rule": "adaptive",
    "quad.eps_lc": repr(EPS_LC),
    "oracle.k_max": "60",
    "oracle.tol": "1e-4",
    "oracle.regulator": "exp_damping",
    "oracle.pv_offset": "1e-6",
    "oracle.extrap_rtol": "1e-2",
    "oracle.route": "double_sum",
    "oracle.max_dev": "0.02",
    "output.format": "csv",
    "output.path": "-",
    "check.only": "",
}


class ConfigError(ValueError):
    pass


def parse_config_text(text, source="<config>"):
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"{source}:{n}: unknown key {key!r}")
        out[key] = val
    return out


def parse_overrides(tokens):
    out = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--"):
            raise ConfigError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
        else:
            val = next(it, None)
            if val is None:
                raise ConfigError(f"missing value for --{key}")
        if key not in DEFAULTS:
            raise ConfigError(f"unknown option --{key}")
        out[key] = val
    return out


def _float(raw, key):
    try:
        return float(raw[key])
    except ValueError:
        raise ConfigError(f"{key}: not a number: {raw[key]!r}") from None


def _opt_float(raw, key):
    return _float(raw, key) if raw[key] != "" else None


def _floats(raw, key):
    try:
        return tuple(float(v) for v in raw[key].replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"{key}: not a list of numbers: {raw[key]!r}") from None


def _bool(raw, key):
    v = raw[key].lower()
    if v not in ("true", "false", "1", "0", "yes", "no"):
        raise ConfigError(f"{key}: expected true or false")
    return v in ("true", "1", "yes")


def _grid(raw, name):
    key = f"grid.{name}"
    geo = [raw[f"{key}.{p}"] for p in ("min", "max", "count")]
    if raw[key] and any(geo):
        raise ConfigError(f"{key}: give a list or min/max/count, not both")
    if raw[key]:
        g = np.array(_floats(raw, key))
    elif all(geo):
        lo, hi = _float(raw, f"{key}.min"), _float(raw, f"{key}.max")
        count = _float(raw, f"{key}.count")
        if count != int(count) or count < 1:
            raise ConfigError(f"{key}.count must be a positive integer")
        if not 0 < lo <= hi or (count > 1 and lo == hi):
            raise ConfigError(f"{key}: need 0 < min < max")
        g = np.geomspace(lo, hi, int(count))
    elif any(geo):
        raise ConfigError(f"{key}: min, max and count must all be given")
    else:
        return ()
    if g.size == 0 or np.any(np.diff(g) <= 0):
        raise ConfigError(f"{key}: grid must be non-empty and strictly increasing")
    if np.any(g < 0) or (name == "R" and np.any(g == 0)):
        raise ConfigError(f"{key}: values out of range")
    return tuple(float(v) for v in g)


def _pol_B(raw):
    model = raw["atomB.model"]
    if model == "two_level":
        return P.TwoLevel(_float(raw, "atomB.mu"), _float(raw, "atomB.kB"))
    if model == "static_constant":
        return P.StaticConstant(_float(raw, "atomB.alpha0"))
    if model == "tabulated":
        path = raw["atomB.table"]
        if not path:
            raise ConfigError("atomB.table: path to a two-column (u, alpha) file required")
        try:
            tab = np.loadtxt(path, ndmin=2)
        except OSError as e:
            raise ConfigError(f"atomB.table: {e}") from None
        if tab.shape[1] != 2:
            raise ConfigError("atomB.table: expected two columns")
        return P.Tabulated(tab[:, 0], tab[:, 1], raw["atomB.rule"],
                           _opt_float(raw, "atomB.alpha_k0"))
    raise ConfigError(f"atomB.model: unknown model {model!r}")


@dataclass(frozen=True)
class RunConfig:
    params: P.SystemParams
    R_grid: tuple
    t_grid: tuple
    direction: tuple
    point_R: tuple
    point_t: float
    fmt: str
    path: str
    tol: float
    rule: str
    eps_lc: float
    normalization: str
    oracle: OracleCtrl
    oracle_route: str
    max_dev: float
    only: tuple


def build_config(raw):
    """Validated RunConfig from a fully populated key -> string mapping."""
    params = P.SystemParams(
        mu_A=_floats(raw, "atomA.mu"),
        k0=_float(raw, "atomA.k0"),
        pol_B=_pol_B(raw),
        gamma=_opt_float(raw, "atomA.gamma"),
        excited_sign=raw["atomA.excited_sign"],
        resonant_alpha_choice=raw["conventions.resonant_alpha_choice"],
        isotropic=_bool(raw, "atomA.isotropic"),
        hbar_c=_float(raw, "units.hbar_c"),
        c=_float(raw, "units.c"),
    )
    direction = np.array(_floats(raw, "grid.direction"))
    if direction.shape != (3,) or not np.linalg.norm(direction) > 0:
        raise ConfigError("grid.direction must be a nonzero 3-vector")
    direction = direction / np.linalg.norm(direction)

    point_R = ()
    if raw["point.R"]:
        v = _floats(raw, "point.R")
        if len(v) == 1:
            v = tuple(v[0] * direction)
        if len(v) != 3:
            raise ConfigError("point.R must be a length or a 3-vector")
        point_R = tuple(v)
    point_t = _opt_float(raw, "point.t")

    fmt = raw["output.format"]
    if fmt not in ("csv", "json"):
        raise ConfigError("output.format must be csv or json")
    tol = _float(raw, "quad.tol")
    if not 1e-14 <= tol <= 1e-3:
        raise ConfigError("quad.tol must lie in [1e-14, 1e-3]")
    rule = raw["quad.rule"]
    if rule not in ("adaptive", "de"):
        raise ConfigError("quad.rule must be adaptive or de")
    eps_lc = _float(raw, "quad.eps_lc")
    if not 0 < eps_lc < 1:
        raise ConfigError("quad.eps_lc must lie in (0, 1)")
    norm = raw["conventions.dynamic_normalization"]
    if norm not in ("mode_sum", "as_printed"):
        raise ConfigError("conventions.dynamic_normalization must be mode_sum or as_printed")
    route = raw["oracle.route"]
    if route not in ("double_sum", "single_sum", "both"):
        raise ConfigError("oracle.route must be double_sum, single_sum or both")
    ctrl = OracleCtrl(k_max=_float(raw, "oracle.k_max"), tol=_float(raw, "oracle.tol"),
                      regulator=raw["oracle.regulator"],
                      pv_offset=_float(raw, "oracle.pv_offset"),
                      extrap_rtol=_float(raw, "oracle.extrap_rtol"))
    only = ()
    if raw["check.only"]:
        try:
            only = tuple(int(v) for v in raw["check.only"].replace(",", " ").split())
        except ValueError:
            raise ConfigError("check.only: expected criterion numbers") from None
    return RunConfig(params, _grid(raw, "R"), _grid(raw, "t"), tuple(direction), point_R,
                     point_t, fmt, raw["output.path"], tol, rule, eps_lc, norm, ctrl, route,
                     _float(raw, "oracle.max_dev"), only)


def load_config(path=None, overrides=None):
    raw = dict(DEFAULTS)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                raw.update(parse_config_text(fh.read(), path))
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from None
    raw.update(overrides or {})
    return build_config(raw)


# formatting

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return f"{float(v):.16e}"


def render(rows, columns, fmt):
    if fmt == "json":
        objs = [{c: (r[c] if r[c] is None or isinstance(r[c], str) else float(r[c]))
                 for c in columns} for r in rows]
        return json.dumps(objs, indent=1, allow_nan=False) + "\n"
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(r[c]) for c in columns) + "\n")
    return buf.getvalue()


def _open_out(path):
    if path in ("", "-"):
        return None
    return open(path, "w", encoding="utf-8", newline="\n")


def _emit(text, fh):
    if fh is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        fh.write(text)
        fh.close()


# evaluation

def _workers():
    env = os.environ.get("CPDYN_THREADS", "")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError("CPDYN_THREADS must be a positive integer") from None
        if n < 1:
            raise ConfigError("CPDYN_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def _pmap(fn, jobs):
    """Order-preserving map; every row is computed independently."""
    n = min(_workers(), len(jobs))
    if n <= 1 or len(jobs) < 4:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, jobs))


def _breakdown_row(job):
    cfg, R, t = job
    r = float(np.linalg.norm(R))
    pt = P.reduce(cfg.params, R, t)
    row = {"R": r, "t": t, "x": pt.x, "tau": pt.tau}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        try:
            b = potential_total(cfg.params, R, t, cfg.tol, cfg.rule, cfg.eps_lc,
                                cfg.normalization)
        except LightConeError as e:
            return {**row, "err_flag": "light_cone", "message": str(e)}
        except AccuracyError as e:
            return {**row, "err_flag": "accuracy", "message": str(e)}
    row.update(energy_unit=b.energy_unit, term_resonant=b.resonant,
               term_cp_dispersion=b.cp_dispersion, term_dynamic=b.dynamic, total=b.total,
               reduced_resonant=b.reduced.resonant,
               reduced_cp_dispersion=b.reduced.cp_dispersion,
               reduced_dynamic=b.reduced.dynamic, reduced_total=b.reduced.total,
               err_est=b.err_est, err_flag="ok")
    return row


def _blank(row, columns):
    return {c: row.get(c) for c in columns}


def _warn_validity(cfg, t_max):
    for w in P.validity_check(cfg.params, t_max):
        print(f"warning: {w}", file=sys.stderr)


def cmd_point(cfg: RunConfig):
    R, t = cfg.point_R, cfg.point_t
    if not R and len(cfg.R_grid) == 1:
        R = tuple(cfg.R_grid[0] * np.array(cfg.direction))
    if t is None and len(cfg.t_grid) == 1:
        t = cfg.t_grid[0]
    if not R or t is None:
        raise ConfigError("point needs point.R and point.t")
    fh = _open_out(cfg.path)
    _warn_validity(cfg, t)
    row = _breakdown_row((cfg, np.array(R), float(t)))
    if row["err_flag"] != "ok":
        print(f"error: {row['message']}", file=sys.stderr)
        if fh is not None:
            fh.close()
        return EXIT_CONFIG if row["err_flag"] == "light_cone" else EXIT_CHECK
    _emit(render([_blank(row, POINT_COLUMNS)], POINT_COLUMNS, cfg.fmt), fh)
    return EXIT_OK


def _grid_jobs(cfg):
    if not cfg.R_grid or not cfg.t_grid:
        raise ConfigError("sweep needs grid.R and grid.t")
    d = np.array(cfg.direction)
    return [(cfg, R * d, t) for R in cfg.R_grid for t in cfg.t_grid]


def cmd_sweep(cfg: RunConfig):
    jobs = _grid_jobs(cfg)
    fh = _open_out(cfg.path)
    _warn_validity(cfg, cfg.t_grid[-1])
    rows = _pmap(_breakdown_row, jobs)
    for r in rows:
        if r["err_flag"] != "ok":
            print(f"note: R={r['R']:.6g} t={r['t']:.6g}: {r['message']}", file=sys.stderr)
    _emit(render([_blank(r, SWEEP_COLUMNS) for r in rows], SWEEP_COLUMNS, cfg.fmt), fh)
    return EXIT_OK


def _oracle_row(job):
    cfg, R, t, route = job
    p = cfg.params
    pt = P.reduce(p, R, t)
    row = {"R": float(np.linalg.norm(R)), "t": t, "x": pt.x, "tau": pt.tau, "route": route}
    run = oracle_eq5 if route == "double_sum" else oracle_eq7a
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            cf = potential_total(p, R, t, cfg.tol, cfg.rule, cfg.eps_lc, cfg.normalization).total
        if pt.tau > pt.x:
            o = run(p, R, t, cfg.oracle)
            dev = abs(o.value - cf) / abs(cf) if cf != 0 else abs(o.value)
        elif route == "single_sum":
            return {**row, "closed_form": cf, "err_flag": "outside_form"}
        else:
            # compare with zero on the scale of the tau = 2x response
            o = run(p, R, t, cfg.oracle)
            ref = run(p, R, 2 * pt.x / (p.c * p.k0), cfg.oracle)
            dev = abs(o.value) / abs(ref.value)
    except (LightConeError, AccuracyError) as e:
        return {**row, "err_flag": "light_cone" if isinstance(e, LightConeError) else "accuracy",
                "message": str(e)}
    return {**row, "closed_form": cf, "oracle": o.value, "deviation": dev,
            "oracle_err_est": o.err_est, "err_flag": "ok"}


def cmd_oracle(cfg: RunConfig):
    if cfg.R_grid or cfg.t_grid:
        jobs = _grid_jobs(cfg)
    else:
        k0, c = cfg.params.k0, cfg.params.c
        d = np.array(cfg.direction)
        jobs = [(cfg, x / k0 * d, tau / (c * k0)) for x in DESK_X for tau in DESK_TAU]
    if len(jobs) > MAX_ORACLE_POINTS:
        raise ConfigError(f"oracle grid has {len(jobs)} points; the limit is {MAX_ORACLE_POINTS}")
    P_ = cfg.params
    if not isinstance(P_.pol_B, P.StaticConstant):
        raise ConfigError("oracle comparisons need atomB.model = static_constant")
    if cfg.oracle.regulator != "exp_damping":
        raise ConfigError("oracle comparisons need oracle.regulator = exp_damping")
    routes = ("double_sum", "single_sum") if cfg.oracle_route == "both" else (cfg.oracle_route,)
    fh = _open_out(cfg.path)
    rows = _pmap(_oracle_row, [(*j, r) for j in jobs for r in routes])
    bad = False
    for r in rows:
        if r["err_flag"] not in ("ok", "outside_form"):
            print(f"error: R={r['R']:.6g} t={r['t']:.6g} {r['route']}: {r['message']}",
                  file=sys.stderr)
            bad = True
        elif r["err_flag"] == "ok" and not r["deviation"] < cfg.max_dev:
            bad = True
    _emit(render([_blank(r, ORACLE_COLUMNS) for r in rows], ORACLE_COLUMNS, cfg.fmt), fh)
    return EXIT_ORACLE if bad else EXIT_OK


def cmd_check(cfg: RunConfig, perturb_tensor=False):
    from . import checks

    numbers = cfg.only or tuple(checks.CHECKS)
    unknown = [n for n in numbers if n not in checks.CHECKS]
    if unknown:
        raise ConfigError(f"no such criterion: {unknown}")
    results = []
    for n in numbers:
        if perturb_tensor:
            with checks.perturbed_tensor():
                res = checks.run_check(n)
        else:
            res = checks.run_check(n)
        results.append(res)
        print(checks.format_line(res), flush=True)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} passed")
    return EXIT_OK if passed == len(results) else EXIT_CHECK


COMMANDS = {"point": cmd_point, "sweep": cmd_sweep, "oracle": cmd_oracle, "check": cmd_check}


def make_parser():
    ap = argparse.ArgumentParser(prog="cpdyn", description=__doc__.split("\n\n")[0],
                                 epilog="Any config key may be overridden as --section.key VALUE.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="flat key = value config file")
    ap.add_argument("--out", help="output path (default stdout)")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--only", help="check: comma-separated criterion numbers")
    ap.add_argument("--perturb-tensor", action="store_true",
                    help="check: bias the closed-form tensor (test hook)")
    return ap


def main(argv=None):
    ap = make_parser()
    args, rest = ap.parse_known_args(argv)
    try:
        over = parse_overrides(rest)
        if args.out is not None:
            over["output.path"] = args.out
        if args.format is not None:
            over["output.format"] = args.format
        if args.only is not None:
            over["check.only"] = args.only
        cfg = load_config(args.config, over)
        if args.command == "check":
            return cmd_check(cfg, args.perturb_tensor)
        return COMMANDS[args.command](cfg)
    except (ConfigError, P.DomainError, P.ResonancePoleError, P.ExtrapolationError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
