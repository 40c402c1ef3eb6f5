"""Command-line entry point: ``csminimal <command> --n 2`` or ``--n 2..5``.

Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import serialize
from .errors import InvariantError, NumericError, ShootingError
from .geometry import write_frames_csv
from .profile import EmbeddingParams, ProfileCurve, build_curve
from .spectrum import laplacian_spectrum, stability_index
from .validate import run_all
from .yau import yau_check

log = logging.getLogger("csminimal")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_INVARIANT = 0, 1, 2, 3
CACHE_ENV = "CSMINIMAL_CACHE_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_n_range(text):
    """'3' -> [3]; '2..5' -> [2, 3, 4, 5]."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {text!r}") from None
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    if lo < 2:
        raise argparse.ArgumentTypeError("n must be at least 2")
    return list(range(lo, hi + 1))


@dataclass
class RunConfig:
    ns: list
    ode_tol: float = 1e-12
    shoot_tol: float = 1e-10
    lambda_max: float | None = None
    fmt: str = "json"
    out: str | None = None
    cache_dir: Path | None = None
    workers: int = 1
    samples: int = 512

    def __post_init__(self):
        if not self.ns or any(n < 2 for n in self.ns):
            raise UsageError("n-range must be nonempty with every n >= 2")
        if not (0 < self.ode_tol < 1e-3):
            raise UsageError("--ode-tol must lie in (0, 1e-3)")
        if not (0 < self.shoot_tol < 1e-3):
            raise UsageError("--shoot-tol must lie in (0, 1e-3)")

    def params(self, n):
        return EmbeddingParams(n, shoot_tol=self.shoot_tol, ode_tol=self.ode_tol)


# profile cache -----------------------------------------------------------

def _cache_path(cfg, n):
    if cfg.cache_dir is None:
        return None
    return cfg.cache_dir / f"profile_n{n}_ode{cfg.ode_tol!r}_shoot{cfg.shoot_tol!r}.json"


def load_curve(cfg, n):
    """Cached curve when present, else shoot and build (and populate the cache)."""
    path = _cache_path(cfg, n)
    if path is not None and path.is_file():
        log.debug("cache hit %s", path)
        return ProfileCurve.from_json(path.read_text())
    curve = build_curve(cfg.params(n))
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(curve.to_json())
        os.replace(tmp, path)
    return curve


# per-n computations ------------------------------------------------------

def _profile_doc(cfg, n):
    return load_curve(cfg, n).to_json()


def _frames_doc(cfg, n):
    buf = io.StringIO()
    write_frames_csv(load_curve(cfg, n), buf, cfg.samples)
    return buf.getvalue()


def _index_doc(cfg, n):
    return stability_index(load_curve(cfg, n)).to_dict()


def _spectrum_doc(cfg, n):
    lam = cfg.lambda_max if cfg.lambda_max is not None else 2.0 * (2 * n - 1)
    return laplacian_spectrum(load_curve(cfg, n), lam).to_dict()


def _yau_doc(cfg, n):
    return yau_check(load_curve(cfg, n)).to_dict()


def _validate_doc(cfg, n):
    rows = run_all(load_curve(cfg, n))
    return {"n": n, "passed": all(r.passed for r in rows),
            "checks": [r.to_dict() for r in rows]}


def _fan_out(cfg, fn):
    if cfg.workers > 1 and len(cfg.ns) > 1:
        with ThreadPoolExecutor(max_workers=min(cfg.workers, len(cfg.ns))) as ex:
            return list(ex.map(lambda n: fn(cfg, n), cfg.ns))
    return [fn(cfg, n) for n in cfg.ns]


# rendering ---------------------------------------------------------------

def _csv_cell(v):
    if isinstance(v, float):
        return serialize.format_float(v) if v == v else ""
    if v is None:
        return ""
    return str(v).lower() if isinstance(v, bool) else str(v)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _render_rows(cmd, docs):
    """Flat CSV tables for the report commands."""
    if cmd == "index":
        rows = [(d["n"], t["i"], t["j"], t["negatives"], t["weight"], t["contribution"])
                for d in docs for t in d["tallies"]]
        head = _csv(("n", "i", "j", "negatives", "weight", "contribution"), rows)
        summary = _csv(("n", "index_computed", "index_lower_bound"),
                       [(d["n"], d["index_computed"], d["index_lower_bound"]) for d in docs])
        return head + "\n" + summary
    if cmd == "spectrum":
        rows = [(d["n"], e["lambda"], e["multiplicity"]) for d in docs for e in d["spectrum"]]
        return _csv(("n", "lambda", "multiplicity"), rows)
    if cmd == "yau":
        keys = list(docs[0])
        return _csv(keys, [[d[k] for k in keys] for d in docs])
    if cmd == "validate":
        rows = [(d["n"], c["suite"], c["name"], c["value"], c["tol"], c["passed"])
                for d in docs for c in d["checks"]]
        return _csv(("n", "suite", "name", "value", "tol", "passed"), rows)
    raise ValueError(cmd)


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# commands ----------------------------------------------------------------

def cmd_profile(cfg):
    outdir = Path(cfg.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    for n, text in zip(cfg.ns, _fan_out(cfg, _profile_doc)):
        path = outdir / f"profile_n{n}.json"
        path.write_text(text)
        print(path)
    return EXIT_OK


def cmd_frames(cfg):
    outdir = Path(cfg.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    for n, text in zip(cfg.ns, _fan_out(cfg, _frames_doc)):
        path = outdir / f"frames_n{n}.csv"
        path.write_text(text)
        print(path)
    return EXIT_OK


def _report(cmd, fn):
    def run(cfg):
        docs = _fan_out(cfg, fn)
        if cfg.fmt == "csv":
            text = _render_rows(cmd, docs)
        else:
            text = serialize.dumps(docs[0] if len(docs) == 1 else docs)
        _emit(text, cfg.out)
        if cmd == "validate" and not all(d["passed"] for d in docs):
            for d in docs:
                for c in d["checks"]:
                    if not c["passed"]:
                        print(f"FAIL n={d['n']} {c['suite']}:{c['name']} value={c['value']!r}",
                              file=sys.stderr)
            return EXIT_INVARIANT
        return EXIT_OK
    return run


COMMANDS = {
    "profile": (cmd_profile, "shoot and build the profile curve; writes profile_n<N>.json"),
    "frames": (cmd_frames, "sampled geometry along the curve; writes frames_n<N>.csv"),
    "spectrum": (_report("spectrum", _spectrum_doc), "Laplacian spectrum below --lambda-max"),
    "index": (_report("index", _index_doc), "stability index with per-operator tallies"),
    "yau": (_report("yau", _yau_doc), "first-eigenvalue criterion with consistency checks"),
    "validate": (_report("validate", _validate_doc), "run every invariant suite"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=parse_n_range, help="dimension parameter, N or A..B")
    common.add_argument("--n-range", type=parse_n_range, metavar="A..B")
    common.add_argument("--ode-tol", type=float, default=1e-12)
    common.add_argument("--shoot-tol", type=float, default=1e-10)
    common.add_argument("--lambda-max", type=float, default=None,
                        help="spectral window (spectrum; default 2(2n-1))")
    common.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
    common.add_argument("--cache-dir", default=None,
                        help=f"profile cache (default ${CACHE_ENV} or ~/.cache/csminimal)")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--out", default=None,
                        help="output directory (profile, frames) or file (reports)")
    common.add_argument("--workers", type=int, default=1, help="threads over n")
    common.add_argument("--samples", type=int, default=512, help="rows per frames CSV")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="csminimal", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, helptext) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=helptext, description=helptext)
    return p


def _cache_dir(args):
    if args.no_cache:
        return None
    if args.cache_dir:
        return Path(args.cache_dir)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "csminimal"


def config_from_args(args):
    if args.n and args.n_range:
        raise UsageError("give either --n or --n-range, not both")
    ns = args.n or args.n_range
    if not ns:
        raise UsageError("one of --n or --n-range is required")
    if args.workers < 1:
        raise UsageError("--workers must be positive")
    return RunConfig(ns, args.ode_tol, args.shoot_tol, args.lambda_max, args.fmt, args.out,
                     _cache_dir(args), args.workers, args.samples)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"csminimal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command][0](cfg)
    except ShootingError as exc:
        print(f"csminimal: shooting failed: {exc}", file=sys.stderr)
        print(exc.scan_table(), file=sys.stderr)
        return EXIT_NUMERIC
    except NumericError as exc:
        print(f"csminimal: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InvariantError as exc:
        print(f"csminimal: invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ArithmeticError as exc:
        print(f"csminimal: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
