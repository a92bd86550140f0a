"""Command line entry point: ``thetaforge eval | verify | constants``."""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .characteristics import RationalVector
from .errors import ThetaForgeError
from .reports import jsonable
from .sampling import SEED_ENV, default_seed, sample_tau
from .suites import SUITES, RunConfig, constants_table, run_suite
from .theta import PeriodMatrix, TruncationPolicy, theta_jet

# config-file keys accepted besides the RunConfig fields
CONFIG_ALIASES = {"level": "levels", "all": "all_suites"}


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _complex(x) -> complex:
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(x.replace(" ", ""))
    return complex(x)


def _matrix(text: str) -> np.ndarray:
    rows = json.loads(text)
    return np.array([[_complex(v) for v in row] for row in rows])


def _samples(values: list[str] | None):
    """``--samples 20`` sets every suite; ``--samples rank=8`` one suite."""
    if not values:
        return None
    out = {}
    for v in values:
        if "=" in v:
            k, c = v.split("=", 1)
            out[k.strip()] = int(c)
        else:
            out.update({s: int(v) for s in SUITES})
    return out


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--genus", type=_ints, help="genus values, e.g. '1,2'")
    p.add_argument("--level", type=_ints, help="levels n, e.g. '1,2'")
    p.add_argument("--samples", nargs="*", help="N for every suite, or suite=N")
    p.add_argument("--seed", type=int, help=f"64-bit seed (default ${SEED_ENV} or 7)")
    p.add_argument("--tail-bound", type=float, help="truncation tail target")
    p.add_argument("--config", help="JSON file mirroring the flags; flags win")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), help="report format")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="thetaforge", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate one theta jet and print it as JSON")
    ev.add_argument("--tau", help="JSON matrix; entries are numbers, [re, im] or strings like '0.1+1j'")
    ev.add_argument("--genus", type=int, default=1, help="genus of a sampled tau when --tau is absent")
    ev.add_argument("--index", type=int, default=0, help="sample index of a sampled tau")
    ev.add_argument("--seed", type=int)
    ev.add_argument("--z", help="JSON vector (default 0)")
    ev.add_argument("--eps", help="upper characteristic, e.g. '1/2,0' (default 0)")
    ev.add_argument("--delta", help="lower characteristic (default 0)")
    ev.add_argument("--tail-bound", type=float, default=1e-13)

    ver = sub.add_parser("verify", help="run verification suites")
    _common(ver)
    ver.add_argument("--suites", help="comma separated suite names (default: all)")
    ver.add_argument("--tol", type=float, help="tolerance for two-sided identity residuals")
    ver.add_argument("--allow-degraded", action="store_true", default=None)
    ver.add_argument("--all", action="store_true", default=None, help="enable every suite at every genus")

    con = sub.add_parser("constants", help="table of fitted constants of the level-n Jacobi formula")
    _common(con)
    return ap


def load_config(args) -> tuple[RunConfig, str | None, str]:
    raw = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            raw = json.load(fh)
    raw = {CONFIG_ALIASES.get(k.replace("-", "_"), k.replace("-", "_")): v for k, v in raw.items()}
    out = raw.pop("out", None)
    fmt = raw.pop("format", "json")

    def pick(flag, key):
        v = getattr(args, flag, None)
        if v is not None:
            raw[key] = v

    pick("genus", "genus")
    pick("level", "levels")
    pick("seed", "seed")
    pick("tol", "tol")
    pick("tail_bound", "tail_bound")
    pick("allow_degraded", "allow_degraded")
    pick("all", "all_suites")
    if getattr(args, "suites", None) is not None:
        raw["suites"] = [s.strip() for s in args.suites.split(",") if s.strip()]
    samples = _samples(getattr(args, "samples", None))
    if samples is not None:
        raw["samples"] = {**raw.get("samples", {}), **samples}
    if isinstance(raw.get("genus"), int):
        raw["genus"] = [raw["genus"]]
    if isinstance(raw.get("levels"), int):
        raw["levels"] = [raw["levels"]]
    if isinstance(raw.get("suites"), str):
        raw["suites"] = [s.strip() for s in raw["suites"].split(",") if s.strip()]
    if "suites" not in raw:
        raw["suites"] = list(SUITES)
    raw.setdefault("seed", default_seed())
    return RunConfig(**raw), args.out or out, args.format or fmt


def _check_writable(path: str | None) -> None:
    if path is None:
        return
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise OSError(f"cannot write to {path}")
    if os.path.exists(path) and not os.access(path, os.W_OK):
        raise OSError(f"cannot write to {path}")


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def cmd_eval(args) -> int:
    seed = default_seed() if args.seed is None else args.seed
    if args.tau:
        tau = PeriodMatrix(_matrix(args.tau))
    else:
        tau = sample_tau(args.genus, seed, args.index)
    g = tau.genus
    z = None if not args.z else np.array([_complex(v) for v in json.loads(args.z)])
    eps = RationalVector.parse(args.eps) if args.eps else RationalVector.zeros(g)
    delta = RationalVector.parse(args.delta) if args.delta else RationalVector.zeros(g)
    jet = theta_jet(tau, z, eps, delta, TruncationPolicy(tail_target=args.tail_bound))
    out = {"tau": jsonable(tau.matrix), "z": jsonable(z if z is not None else np.zeros(g)),
           "eps": str(eps), "delta": str(delta), **jet.to_dict()}
    print(json.dumps(out, indent=2))
    return 0


def cmd_verify(args) -> int:
    cfg, out, fmt = load_config(args)
    _check_writable(out)
    report = run_suite(cfg)
    _emit(report.to_csv() if fmt == "csv" else report.to_json(), out)
    for s in report.suites:
        status = "PASS" if s.passed else "FAIL"
        print(f"{status} {s.name}: {len(s.reports)} reports, max residual {s.max_residual:.3e}"
              f" ({s.wall_time:.1f}s)", file=sys.stderr)
    print("PASS" if report.passed else "FAIL", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_constants(args) -> int:
    if getattr(args, "suites", None) is None:
        args.suites = "jacobi-generalized"
    cfg, out, fmt = load_config(args)
    _check_writable(out)
    rows = constants_table(cfg)
    if fmt == "csv":
        import csv
        import io

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["genus", "level", "a", "delta", "value_re", "value_im", "rel_std", "count"])
        for r in rows:
            v = r["value"] or [None, None]
            w.writerow([r["genus"], r["level"], ",".join(r["a"]), ",".join(r["delta"]), v[0], v[1],
                        r["rel_std"], r["count"]])
        _emit(buf.getvalue(), out)
    else:
        _emit(json.dumps({"config": jsonable(cfg.to_dict()), "constants": rows}, indent=2, sort_keys=True), out)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"eval": cmd_eval, "verify": cmd_verify, "constants": cmd_constants}
    try:
        return handlers[args.command](args)
    except (ThetaForgeError, ValueError, OSError) as err:
        print(f"thetaforge: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
