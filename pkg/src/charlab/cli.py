"""charlab command line: verify, calibrate, scan, explore, char."""
from __future__ import annotations

import argparse
import configparser
import dataclasses
import hashlib
import io
import json
import math
import os
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import arith, suites
from .arith import ResourceError
from .characters import DirichletCharacter, enumerate_characters
from .convolution import XiFamily, cestolog_report, hildebrand_lower
from .pretentious import (
    MultiplicativeModel,
    distance,
    hmt_bound,
    min_distance_over_t,
    nearest_twist,
    orders_report,
    twist_scan,
)
from .sums import savings_profile

DEFAULT_CAPS = "charlab_caps.json"
DEFAULT_EPS = "0.1,0.25,0.5"
DEFAULT_Q_LIMIT = 10**5
MAX_Q_LIMIT = 10**6

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


# -- verify / calibrate -------------------------------------------------------------


def cmd_verify(args) -> int:
    names = list(suites.SUITES) if args.suite == "all" else [args.suite]
    caps = None
    if any(suites.SUITES[n][1] for n in names):
        try:
            caps = suites.load_caps(args.caps)
        except suites.CapsError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    failed = total = 0
    for name in names:
        fn, _ = suites.SUITES[name]
        t0 = time.perf_counter()
        for case in fn(caps):
            total += 1
            failed += not case.ok
            detail = f" ({case.detail})" if case.detail else ""
            print(f"{'PASS' if case.ok else 'FAIL'} [{name}] {case.name}{detail}")
        print(f"     [{name}] done in {time.perf_counter() - t0:.1f}s")
    print(f"summary: {total - failed}/{total} passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def cmd_calibrate(args) -> int:
    doc = suites.calibrate(progress=lambda s: print(f"calibrating: {s}", file=sys.stderr))
    suites.write_caps(doc, args.caps)
    for e in doc["constants"]:
        print(f"{e['constant']} = {e['value']!r} (worst {e['worst_case']['value']!r} at {e['worst_case']['label']})")
    print(f"wrote {args.caps}")
    return EXIT_OK


# -- scan -------------------------------------------------------------------------------


@dataclasses.dataclass
class RunConfig:
    command: str = "scan"
    qmin: int = 3
    qmax: int = 100
    order: int | None = None
    parity: str | None = None
    eps: tuple[float, ...] = (0.1, 0.25, 0.5)
    primes_only: bool = False
    twist_T: float = 1.0
    q_limit: int = DEFAULT_Q_LIMIT
    caps: str = DEFAULT_CAPS
    seed: int = 0
    out: str | None = None
    threads: int = 1
    timing: bool = False

    # fields that cannot change the table body
    _UNHASHED = ("out", "threads", "caps")

    def hashed(self) -> dict:
        d = dataclasses.asdict(self)
        for k in self._UNHASHED:
            d.pop(k)
        d["eps"] = list(d["eps"])
        return d

    def config_hash(self) -> str:
        return hashlib.sha256(json.dumps(self.hashed(), sort_keys=True).encode()).hexdigest()[:16]


def _parse_eps(text: str) -> tuple[float, ...]:
    vals = tuple(float(v) for v in str(text).split(",") if v.strip())
    if not vals or any(not 0 < v <= 1 for v in vals):
        raise ValueError(f"eps grid must be values in (0, 1], got {text!r}")
    return vals


def _read_config_file(path: str) -> dict[str, str]:
    parser = configparser.ConfigParser()
    text = Path(path).read_text(encoding="utf-8")
    parser.read_string("[run]\n" + text)
    return {k.replace("-", "_"): v for k, v in parser["run"].items()}


def build_run_config(args) -> RunConfig:
    cfg = RunConfig()
    raw: dict[str, object] = {}
    if args.config:
        raw.update(_read_config_file(args.config))
    for key in ("qmin", "qmax", "order", "parity", "eps", "out", "threads", "twist_T", "q_limit", "seed"):
        v = getattr(args, key, None)
        if v is not None:
            raw[key] = v
    if args.primes_only:
        raw["primes_only"] = True
    if args.timing:
        raw["timing"] = True
    conv = {"qmin": int, "qmax": int, "order": int, "threads": int, "q_limit": int, "seed": int,
            "twist_T": float, "eps": _parse_eps, "parity": str, "out": str,
            "primes_only": _as_bool, "timing": _as_bool}
    for k, v in raw.items():
        if k not in conv:
            raise ValueError(f"unknown config key {k!r}")
        setattr(cfg, k, conv[k](v))
    if cfg.parity not in (None, "odd", "even"):
        raise ValueError("parity must be odd or even")
    if cfg.qmin < 3 or cfg.qmax < cfg.qmin:
        raise ValueError("need 3 <= qmin <= qmax")
    if cfg.threads < 1:
        raise ValueError("threads must be positive")
    if cfg.q_limit > MAX_Q_LIMIT:
        raise ValueError(f"--q-limit cannot exceed {MAX_Q_LIMIT}")
    return cfg


def _as_bool(v) -> bool:
    if isinstance(v, bool):
        return v
    return str(v).strip().lower() in ("1", "true", "yes", "on")


def scan_characters(cfg: RunConfig) -> list[DirichletCharacter]:
    parity = {"odd": -1, "even": 1, None: None}[cfg.parity]
    out = []
    for q in range(cfg.qmin, cfg.qmax + 1):
        if cfg.primes_only and not arith.is_prime(q):
            continue
        out.extend(enumerate_characters(q, order=cfg.order, parity=parity, primitive_only=True))
    return out


def scan_row(chi: DirichletCharacter, cfg: RunConfig) -> dict:
    t0 = time.perf_counter()
    prof = savings_profile(chi, cfg.eps)
    q = chi.q
    model = MultiplicativeModel.from_character(chi, q)
    d0 = distance(model, MultiplicativeModel.one(q), q)
    near = nearest_twist(twist_scan(chi, cfg.twist_T))
    row = {
        "q": q,
        "label": chi.label,
        "order": chi.order,
        "parity": chi.parity,
        "pv_max": prof.pv_max,
        "a_q": prof.a_q,
        "n_chi": prof.n_chi,
    }
    for eps, d in zip(cfg.eps, prof.delta_eps):
        row[f"delta_{eps:g}"] = d
    row["d0_sq"] = d0
    row["twist_cond"] = near.conductor if near else None
    row["twist_order"] = near.order if near else None
    row["twist_dist"] = near.distance if near else None
    row["runtime_ms"] = (time.perf_counter() - t0) * 1e3 if cfg.timing else None
    return row


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def scan_header(cfg: RunConfig) -> list[str]:
    return (["q", "label", "order", "parity", "pv_max", "a_q", "n_chi"]
            + [f"delta_{e:g}" for e in cfg.eps]
            + ["d0_sq", "twist_cond", "twist_order", "twist_dist", "runtime_ms"])


def spearman_footer(rows: list[dict], cfg: RunConfig) -> list[str]:
    from scipy.stats import spearmanr

    lines = [f"# rows={len(rows)}"]
    a = [r["a_q"] for r in rows]
    for e in cfg.eps:
        key = f"delta_{e:g}"
        d = [r[key] for r in rows]
        if len(rows) < 3 or len(set(a)) < 2 or len(set(d)) < 2:
            rho, p = float("nan"), float("nan")
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                res = spearmanr(a, d)
            rho, p = float(res.statistic), float(res.pvalue)
        lines.append(f"# spearman a_q vs {key}: rho={_fmt(rho)} p={_fmt(p)}")
    return lines


def run_scan(cfg: RunConfig) -> str:
    if cfg.qmax > cfg.q_limit:
        raise ResourceError(f"qmax = {cfg.qmax} exceeds the scan limit {cfg.q_limit}; raise it with --q-limit "
                            f"(at most {MAX_Q_LIMIT})")
    chars = scan_characters(cfg)
    if cfg.threads == 1:
        rows = [scan_row(c, cfg) for c in chars]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(lambda c: scan_row(c, cfg), chars))  # map keeps input order
    buf = io.StringIO()
    buf.write(f"# charlab scan config_hash={cfg.config_hash()} config={json.dumps(cfg.hashed(), sort_keys=True)}\n")
    header = scan_header(cfg)
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(r[h]) for h in header) + "\n")
    for line in spearman_footer(rows, cfg):
        buf.write(line + "\n")
    return buf.getvalue()


def cmd_scan(args) -> int:
    try:
        cfg = build_run_config(args)
    except (ValueError, OSError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = run_scan(cfg)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(text, cfg.out)
    return EXIT_OK


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- explore ------------------------------------------------------------------------------


def _jsonable(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if hasattr(obj, "item"):  # numpy scalars
        return _jsonable(obj.item())
    return obj


def _model_from_args(args, x: int) -> MultiplicativeModel:
    if args.char:
        return MultiplicativeModel.from_character(DirichletCharacter.from_label(args.char), x)
    if args.synthetic:
        s = args.synthetic
        if s == "one":
            return MultiplicativeModel.one(x)
        if s == "minus-one":
            return MultiplicativeModel.minus_one(x)
        if s.startswith("root:"):
            a, m = s[5:].split("/")
            return MultiplicativeModel.constant_root(int(a), int(m), x)
        if s.startswith("twist:"):
            return MultiplicativeModel.archimedean(float(s[6:]), x)
        raise ValueError(f"unknown synthetic model {s!r}")
    raise ValueError("give --char LABEL or --synthetic NAME")


def explore_cestolog(args) -> dict:
    x = args.x or 10**5
    xi = XiFamily.parse(args.xi)
    return cestolog_report(_model_from_args(args, x), x, xi, k=args.k)


def explore_hmt(args) -> dict:
    x = args.x or 10**5
    T = args.T if args.T is not None else math.log(x) ** 2
    model = _model_from_args(args, x)
    bound, mean, ratio = hmt_bound(model, x, T)
    rep = min_distance_over_t(model, x, T)
    return {"model": model.name, "x": x, "T": T, "d_min_squared": rep.d_min_squared, "t_star": rep.t_star,
            "bound": bound, "mean": mean, "ratio": ratio}


def explore_hildebrand(args) -> dict:
    x = args.x or 10**5
    model = _model_from_args(args, x)
    lower, actual = hildebrand_lower(model, x)
    return {"model": model.name, "x": x, "lower": lower, "actual": actual,
            "ratio": actual / lower if lower > 0 else None}


def explore_orders(args) -> dict:
    if args.char:
        chars = [DirichletCharacter.from_label(args.char)]
    else:
        if not args.q:
            raise ValueError("give --q or --char")
        chars = enumerate_characters(args.q, order=args.order, primitive_only=True)
    T = args.T if args.T is not None else 1.0
    reports = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for chi in chars:
            if args.psi:
                reports.append(_jsonable(orders_report(chi, DirichletCharacter.from_label(args.psi), T)))
            else:
                entries = twist_scan(chi, T)
                reports.append({
                    "chi": chi.label, "g": chi.order, "T": T,
                    "scanned": _jsonable(entries),
                    "below_threshold": sum(e.below for e in entries),
                    "nearest": _jsonable(nearest_twist(entries)),
                })
    return {"target": "orders", "reports": reports}


EXPLORERS = {"cestolog": explore_cestolog, "hmt": explore_hmt, "orders": explore_orders,
             "hildebrand": explore_hildebrand}


def cmd_explore(args) -> int:
    try:
        rec = EXPLORERS[args.target](args)
    except (ValueError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(json.dumps(_jsonable(rec), indent=2) + "\n", args.out)
    return EXIT_OK


# -- char ------------------------------------------------------------------------------------


def cmd_char(args) -> int:
    try:
        chi = DirichletCharacter.from_label(args.spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.eval is not None:
        v = chi(args.eval)
        z = complex(v)
        print(json.dumps({"n": args.eval, "value": repr(v), "re": z.real, "im": z.imag}))
    else:
        from .characters import n_chi

        info = {
            "label": chi.label, "q": chi.q, "order": chi.order, "parity": chi.parity,
            "conductor": chi.conductor, "primitive": chi.is_primitive, "conrey": chi.conrey_number(),
            "n_chi": n_chi(chi),
        }
        print(json.dumps(info, indent=2))
    return EXIT_OK


# -- parser --------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="charlab", description="Dirichlet character experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run an identity or calibrated-cap suite")
    v.add_argument("suite", choices=[*suites.SUITES, "all"])
    v.add_argument("--caps", default=DEFAULT_CAPS)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("calibrate", help="write calibrated caps")
    c.add_argument("--caps", default=DEFAULT_CAPS)
    c.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("scan", help="scan primitive characters over a modulus range")
    s.add_argument("--qmin", type=int)
    s.add_argument("--qmax", type=int)
    s.add_argument("--order", type=int)
    s.add_argument("--parity", choices=["odd", "even"])
    s.add_argument("--eps", help=f"comma-separated eps grid (default {DEFAULT_EPS})")
    s.add_argument("--out")
    s.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    s.add_argument("--primes-only", action="store_true", help="only prime moduli")
    s.add_argument("--twist-T", dest="twist_T", type=float, help="|t| range for twist distances (default 1)")
    s.add_argument("--q-limit", dest="q_limit", type=int, help=f"largest allowed qmax (default {DEFAULT_Q_LIMIT})")
    s.add_argument("--seed", type=int)
    s.add_argument("--config", help="INI-style key=value file; flags override it")
    s.add_argument("--timing", action="store_true", help="fill runtime_ms (breaks byte-identical output)")
    s.set_defaults(func=cmd_scan)

    e = sub.add_parser("explore", help="emit a JSON report")
    e.add_argument("target", choices=list(EXPLORERS))
    e.add_argument("--char")
    e.add_argument("--synthetic", help="one | minus-one | root:a/m | twist:t")
    e.add_argument("--x", type=int)
    e.add_argument("--T", type=float)
    e.add_argument("--xi", default="log2-quarter")
    e.add_argument("--k", type=int)
    e.add_argument("--q", type=int)
    e.add_argument("--order", type=int)
    e.add_argument("--psi")
    e.add_argument("--out")
    e.set_defaults(func=cmd_explore)

    ch = sub.add_parser("char", help="evaluate or describe one character")
    ch.add_argument("--spec", required=True, help="q=<int>;e=<exponents>")
    g = ch.add_mutually_exclusive_group(required=True)
    g.add_argument("--eval", type=int)
    g.add_argument("--info", action="store_true")
    ch.set_defaults(func=cmd_char)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
