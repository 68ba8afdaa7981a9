"""Command-line entry point: ``jensenlab <command> --config run.json``.

Exit codes: 0 success, 2 invalid input or config, 3 numerical
non-convergence, 4 a checked inequality or invariant failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__, acceptance, bounds, conditions, wkb
from .errors import CheckFailed, ConfigError, InputError, JensenLabError, NumericalError
from .grid import GridSpec, assemble, build_laplacian, direct_negative_sum, from_matrix, negative_eigenvalues
from .jensen import default_schedule, default_t, eigensum_jensen, zero_correspondence_check
from .potential import PotentialSpec
from .semigroup import semigroup_difference

TOOL = f"jensenlab {__version__}"

COMMANDS = ("jensen-sum", "direct-sum", "zero-check", "bounds-sweep", "mz-profile", "jp-table",
            "check-potential", "u2-check", "lt-quantity", "lp-classify", "wkb-sweep", "compare-ob-fo")

TOP_KEYS = {"command", "potential", "grid", "matrices", "part", "t", "schedule", "seed",
            "output_path", "format", "params"}
GRID_KEYS = {"d", "L", "points_per_axis", "boundary"}
MATRIX_KEYS = {"A", "B", "basis_weight"}
SCHEDULE_KEYS = {
    "jensen": {"k_min", "k_max", "theta0", "max_theta", "stable_count", "stable_tol"},
    "refinement": {"levels", "r0", "eps0"},
    "ks": {"ks"},
}

# command -> (operator source, schedule kind, allowed params, required params)
SPECS = {
    "jensen-sum": ("operators", "jensen", set(), set()),
    "direct-sum": ("operators", None, set(), set()),
    "zero-check": ("operators", None, {"max_theta"}, set()),
    "bounds-sweep": ("periodic", "jensen", {"rel"}, set()),
    "compare-ob-fo": ("periodic", "ks", set(), set()),
    "mz-profile": (None, "ks", {"d"}, {"d"}),
    "jp-table": (None, "ks", {"p"}, {"p"}),
    "check-potential": ("potential", "refinement", {"conditions", "c", "samples", "alphas"}, set()),
    "u2-check": ("potential", "refinement", {"samples"}, set()),
    "lt-quantity": ("potential", "refinement", {"gamma", "samples"}, {"gamma"}),
    "lp-classify": (None, None, {"d", "p", "v_is_kato", "v_in_L1"}, {"d", "p"}),
    "wkb-sweep": (None, None, {"alpha", "L", "n", "h"}, {"alpha"}),
}


# config ----------------------------------------------------------------------------
def _strict(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be a JSON object")
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ConfigError(f"unknown key {extra[0]!r} in {where}")
    return obj


def _number(cfg, key, where, positive=False):
    val = cfg[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ConfigError(f"{where}.{key} must be a finite number")
    if positive and not val > 0:
        raise ConfigError(f"{where}.{key} must be > 0")
    return val


def validate(command: str, cfg: dict) -> dict:
    """Check ``cfg`` against the schema for ``command`` and fill in defaults."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    cfg = dict(_strict(cfg, TOP_KEYS, "config"))
    if cfg.setdefault("command", command) != command:
        raise ConfigError(f"config.command is {cfg['command']!r} but {command!r} was requested")
    source, sched_kind, allowed, required = SPECS[command]

    if "grid" in cfg:
        _strict(cfg["grid"], GRID_KEYS, "grid")
    if "matrices" in cfg:
        _strict(cfg["matrices"], MATRIX_KEYS, "matrices")
        for key in ("A", "B"):
            if key not in cfg["matrices"]:
                raise ConfigError(f"matrices.{key} is required")
    if source == "operators" and "matrices" not in cfg:
        for key in ("grid", "potential"):
            if key not in cfg:
                raise ConfigError(f"{command} needs either matrices or grid + potential ({key} missing)")
    if source == "periodic":
        for key in ("grid", "potential"):
            if key not in cfg:
                raise ConfigError(f"{command} needs grid + potential ({key} missing)")
        if cfg["grid"].get("boundary") != "periodic":
            raise ConfigError("grid.boundary must be 'periodic' for this command")
    if source == "potential" and "potential" not in cfg:
        raise ConfigError(f"{command} needs potential")
    if "part" in cfg and cfg["part"] not in ("minus_only", "full"):
        raise ConfigError("part must be 'minus_only' or 'full'")

    params = _strict(cfg.get("params", {}), allowed, "params")
    for key in sorted(required - set(params)):
        raise ConfigError(f"params.{key} is required for {command}")
    cfg["params"] = dict(params)

    sched = cfg.get("schedule", {})
    _strict(sched, SCHEDULE_KEYS.get(sched_kind, set()), "schedule")
    cfg["schedule"] = dict(sched)

    if "t" in cfg:
        _number(cfg, "t", "config", positive=True)
    seed = cfg.setdefault("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    fmt = cfg.setdefault("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError("format must be 'json' or 'csv'")
    if "output_path" in cfg and not isinstance(cfg["output_path"], str):
        raise ConfigError("output_path must be a string")
    return cfg


# operator construction ----------------------------------------------------------------
def _potential(cfg):
    try:
        return PotentialSpec.from_dict(cfg["potential"])
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"potential: {exc}") from None


def _grid(cfg):
    g = cfg["grid"]
    try:
        return GridSpec(g["d"], g["L"], g["points_per_axis"], g.get("boundary", "dirichlet"))
    except KeyError as exc:
        raise ConfigError(f"grid.{exc.args[0]} is required") from None


def operators(cfg):
    if "matrices" in cfg:
        m = cfg["matrices"]
        w = m.get("basis_weight", 1.0)
        try:
            a, b = np.array(m["A"], dtype=float), np.array(m["B"], dtype=float)
        except (TypeError, ValueError):
            raise ConfigError("matrices.A and matrices.B must be numeric arrays") from None
        a, b = np.atleast_2d(a), np.atleast_2d(b)
        return from_matrix(a, w, "free"), from_matrix(b, w)
    g = _grid(cfg)
    return build_laplacian(g), assemble(g, _potential(cfg), cfg.get("part", "minus_only"))


def _resolve_t(cfg, a=None):
    if "t" not in cfg:
        cfg["t"] = default_t(a) if a is not None else 1.0
    return float(cfg["t"])


def _ks(cfg, default):
    ks = cfg["schedule"].setdefault("ks", list(default))
    if not isinstance(ks, list) or not ks or not all(isinstance(k, int) and k > 0 for k in ks):
        raise ConfigError("schedule.ks must be a nonempty list of positive integers")
    return ks


def _refinement(cfg):
    s = cfg["schedule"]
    s.setdefault("levels", 10)
    s.setdefault("r0", 2.0)
    s.setdefault("eps0", 0.5)
    return conditions.default_refinement(s["levels"], s["r0"], s["eps0"])


def _radii(cfg):
    s = cfg["schedule"]
    s.setdefault("k_min", 4)
    s.setdefault("k_max", 40)
    return default_schedule(s["k_min"], s["k_max"])


# commands --------------------------------------------------------------------------------
def _fail_if(ok, what):
    if not ok:
        raise CheckFailed(what)


def cmd_jensen_sum(cfg, workers):
    a, b = operators(cfg)
    t = _resolve_t(cfg, a)
    radii = _radii(cfg)
    s = cfg["schedule"]
    res = eigensum_jensen(a, b, t, radii, theta0=s.setdefault("theta0", 64),
                          max_theta=s.setdefault("max_theta", 8192),
                          stable_count=s.setdefault("stable_count", 3),
                          stable_tol=s.setdefault("stable_tol", 1e-8), workers=workers)
    rows = [dict(step) for step in res.trace]
    return res.to_dict(), rows


def cmd_direct_sum(cfg, workers):
    _, b = operators(cfg)
    neg = negative_eigenvalues(b)
    rows = [{"index": i, "eigenvalue": float(x)} for i, x in enumerate(neg)]
    return {"direct_sum": direct_negative_sum(b), "count": int(neg.size),
            "eigenvalues": neg.tolist()}, rows


def cmd_zero_check(cfg, workers):
    a, b = operators(cfg)
    t = _resolve_t(cfg, a)
    rep = zero_correspondence_check(a, b, t, max_theta=cfg["params"].setdefault("max_theta", 1 << 15))
    rows = [{"eigenvalue": lam, "abs_h": h, "threshold": th}
            for lam, h, th in zip(rep.eigenvalues, rep.h_at_zeros, rep.thresholds)]
    _fail_if(rep.holds, f"zero correspondence failed: winding {rep.winding}, "
                        f"expected {rep.expected_count}")
    return rep.to_dict(), rows


def cmd_bounds_sweep(cfg, workers):
    a, b = operators(cfg)
    t = _resolve_t(cfg, a)
    rel = cfg["params"].setdefault("rel", 1e-9)
    dt = semigroup_difference(a, b, t)
    reports, rows = [], []
    for r in _radii(cfg):
        rep = bounds.bound_chain(a, b, t, r, rel, dt)
        reports.append(rep.to_dict())
        for q in rep.inequalities:
            rows.append({"r": r, "label": q.label, "lhs": q.lhs, "rhs": q.rhs, "holds": q.holds})
    broken = [row for row in rows if not row["holds"]]
    _fail_if(not broken, f"bound chain violated: {broken[0]['label']} at r = {broken[0]['r']!r}"
             if broken else "")
    return {"t": t, "c1": dt.c1, "c2": dt.c2, "chain": reports}, rows


def cmd_compare_ob_fo(cfg, workers):
    a, b = operators(cfg)
    t = _resolve_t(cfg, a)
    rows = bounds.compare_ob_fo(a, semigroup_difference(a, b, t), _ks(cfg, range(2, 9)))
    for row in rows:
        row["fo_le_ob"] = row["bound_fo"] <= row["bound_ob"]
    return {"t": t, "rows": rows}, rows


def cmd_mz_profile(cfg, workers):
    d = cfg["params"]["d"]
    t = _resolve_t(cfg)
    rows = []
    for k in _ks(cfg, range(1, 9)):
        r = 1 - 10.0 ** (-k)
        m = bounds.m_z(d, t, r)
        rows.append({"k": k, "r": r, "M": m, "M2_over_log": m * m / math.log(10.0**k),
                     "sb_rhs": bounds.omega(d) * r * r / 2 * t ** (-d / 2) * bounds.j_p(d / 2, r)})
    return {"d": d, "t": t, "rows": rows}, rows


def cmd_jp_table(cfg, workers):
    ps = cfg["params"]["p"]
    ps = ps if isinstance(ps, list) else [ps]
    rows = []
    for p in ps:
        rows.append({"p": p, "a": 0.0, "J": bounds.j_p(p, 0.0)})
        for k in _ks(cfg, range(1, 11)):
            a = 1 - 10.0 ** (-k)
            rows.append({"p": p, "a": a, "J": bounds.j_p(p, a)})
    return {"rows": rows}, rows


def _default_conditions(d):
    out = ["cond0"]
    if d >= 5:
        out.append("cond1")
    if d == 4:
        out.append("cond2")
    if d >= 4:
        out.append("u2")
    if d >= 3:
        out.append("kato")
    return out


def cmd_check_potential(cfg, workers):
    v = _potential(cfg)
    p = cfg["params"]
    conds = p.setdefault("conditions", _default_conditions(v.d))
    samples = p.setdefault("samples", 200_000)
    ref = _refinement(cfg)
    out, rows = {}, []
    for cid in conds:
        if cid == "kato":
            rep = conditions.kato_report(v, p.get("alphas"), seed=cfg["seed"])
        elif cid == "u2":
            rep = conditions.u2_split(v, _resolve_t(cfg), ref, cfg["seed"], samples)
        else:
            par = {"c": p.setdefault("c", 1.0)} if cid == "cond0" else {}
            rep = conditions.condition_integral(v, cid, par, ref, cfg["seed"], samples)
        out[cid] = rep.to_dict()
        rows += _report_rows(rep)
    return {"conditions": out}, rows


def _report_rows(rep):
    rows = []
    for k, (lv, val, err) in enumerate(zip(rep.levels, rep.values, rep.std_errors)):
        row = {"condition_id": rep.condition_id, "k": k}
        row.update({key: lv[key] for key in sorted(lv)})
        row.update({"value": val, "std_error": err, "verdict": rep.verdict})
        rows.append(row)
    return rows


def cmd_u2_check(cfg, workers):
    v = _potential(cfg)
    rep = conditions.u2_split(v, _resolve_t(cfg), _refinement(cfg), cfg["seed"],
                              cfg["params"].setdefault("samples", 200_000))
    return rep.to_dict(), _report_rows(rep)


def cmd_lt_quantity(cfg, workers):
    v = _potential(cfg)
    p = cfg["params"]
    rep = conditions.lt_quantity(v, v.d, p["gamma"], _refinement(cfg), cfg["seed"],
                                 p.setdefault("samples", 200_000))
    return rep.to_dict(), _report_rows(rep)


def cmd_lp_classify(cfg, workers):
    p = cfg["params"]
    rep = conditions.lp_classify(p["d"], p["p"], p.setdefault("v_is_kato", True),
                                 p.setdefault("v_in_L1", False))
    out = rep.to_dict()
    return out, [{"d": out["d"], "p": out["p"], "rule": r, "admissible": out["admissible"]}
                 for r in out["rules_fired"]]


def cmd_wkb_sweep(cfg, workers):
    p = cfg["params"]
    sw = wkb.wkb_sweep(p["alpha"], p.get("L"), p.get("n"), p.setdefault("h", 1.0))
    p["L"], p["n"] = sw.L, sw.n
    rows = [{"fitted_exponent": sw.fitted_exponent, "predicted_exponent": sw.predicted_exponent,
             "k": k, "eigenvalue": lam, "partial_sum": s} for k, lam, s in sw.csv_rows()]
    return sw.to_dict(), rows


HANDLERS = {
    "jensen-sum": cmd_jensen_sum, "direct-sum": cmd_direct_sum, "zero-check": cmd_zero_check,
    "bounds-sweep": cmd_bounds_sweep, "compare-ob-fo": cmd_compare_ob_fo,
    "mz-profile": cmd_mz_profile, "jp-table": cmd_jp_table,
    "check-potential": cmd_check_potential, "u2-check": cmd_u2_check,
    "lt-quantity": cmd_lt_quantity, "lp-classify": cmd_lp_classify, "wkb-sweep": cmd_wkb_sweep,
}


# output --------------------------------------------------------------------------------
def clean(obj):
    """JSON-safe copy: numpy scalars unwrapped, inf -> "divergent", nan -> "sentinel"."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [clean(obj.real), clean(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "sentinel"
        if math.isinf(x):
            return "divergent"
        return x
    return obj


def render(cfg, result, rows) -> str:
    if cfg["format"] == "json":
        doc = {"tool": TOOL, "config": cfg, "result": result}
        return json.dumps(clean(doc), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    rows = clean(rows)
    cols = []
    for row in rows:
        cols += [k for k in row if k not in cols]
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(cols + ["tool", "config"])
    meta = [TOOL, json.dumps(clean(cfg), sort_keys=True)]
    for row in rows:
        w.writerow([_cell(row.get(k, "")) for k in cols] + meta)
    return buf.getvalue()


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return v


def write_atomic(path: str, text: str):
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=folder)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(command, cfg, out=None, workers=None, seed=None):
    """Validate, compute, write.  Returns the rendered text."""
    fmt_given = isinstance(cfg, dict) and "format" in cfg
    cfg = validate(command, cfg)
    if seed is not None:
        cfg["seed"] = seed
    out = out or cfg.get("output_path")
    if out and not fmt_given and out.endswith(".csv"):
        cfg["format"] = "csv"
    failure = None
    try:
        result, rows = HANDLERS[command](cfg, workers)
    except CheckFailed as exc:
        failure = exc
        result, rows = {"check_failed": str(exc)}, []
    text = render(cfg, result, rows)
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)
    if failure is not None:
        raise failure
    return text


def selftest(scale=0.25, force_fail=None, report=print) -> int:
    results = acceptance.run_all(scale, report=report)
    failed = [r.cid for r in results if not r.passed or r.cid == force_fail]
    if failed:
        report(f"selftest FAILED: criteria {failed}")
        return 4
    report("selftest passed")
    return 0


def _parser():
    ap = argparse.ArgumentParser(prog="jensenlab", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS + ("selftest",))
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--out", help="output file (.json or .csv); stdout if omitted")
    ap.add_argument("--workers", type=int, default=None, help="threads for circle sampling")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--scale", type=float, default=0.25, help="selftest instance scale")
    ap.add_argument("--force-fail", type=int, default=None, help=argparse.SUPPRESS)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "selftest":
        return selftest(args.scale, args.force_fail)
    try:
        if not args.config:
            raise ConfigError("--config is required")
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if args.seed is not None and args.seed < 0:
            raise ConfigError("--seed must be >= 0")
        run(args.command, cfg, args.out, args.workers, args.seed)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 4
    except InputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, JensenLabError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
