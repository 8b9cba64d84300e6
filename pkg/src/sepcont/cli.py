"""Command-line entry point.

Subcommands::

    sepcont extend --config build.ini
    sepcont grid --config build.ini --resolution 65 --out grid.csv
    sepcont verify --config build.ini [--seed 0]
    sepcont counterexample --depth 3

Exit codes: 0 success, 1 ``verify`` found failing checks, 2 configuration
or usage error, 3 precondition violation (set not one-pointed), 4 numerical
failure.

Configuration is an INI file::

    [domain]
    interval = 0, 1

    [set]
    kind = diagonal            ; diagonal | graph | dyadic
    base = 0..1                ; graph: X1 as intervals
    breakpoints = 0:1, 1:0     ; graph: knots of e
    depth = 1                  ; dyadic
    require_onepointed = true

    [function]
    gallery = arctan_step      ; any gallery name; remaining keys are parameters
    c = 0.5
    ; or an inline piecewise-linear g (constant sequence):
    ; breakpoints = 0:0.2, 0.4:0.9, 1:0.1

    [build]
    case = FunctionallyClosedX1
    tol = 1e-6
    max_terms = 60
    max_index = 4096
    max_stages = 200000

    [verify]
    seed = 0
    samples = 1000
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import gallery as gal
from . import harness
from .domains import (GraphSet, Homeomorphism1D, format_intervals, parse_breakpoints,
                      parse_intervals, validate_onepointed)
from .engine import CaseTag, SepExtension, evaluate_detailed
from .errors import DomainError, NonConvergence, PreconditionViolation, SepContError
from .pou import PrecisionPolicy

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_NUMERIC = 4

CONSTANT_SEQUENCES = {"constant", "identity", "piecewise_linear"}


class ConfigError(SepContError):
    pass


@dataclass
class BuildConfig:
    interval: Tuple[float, float] = (0.0, 1.0)
    set_kind: str = "diagonal"
    base: Optional[str] = None
    breakpoints: Optional[str] = None
    depth: int = 1
    require_onepointed: bool = True
    function: str = "constant"
    params: Dict[str, object] = field(default_factory=dict)
    case: CaseTag = CaseTag.FunctionallyClosedX1
    tol: float = 1e-6
    max_terms: int = 60
    max_index: int = 4096
    max_stages: int = 200_000
    seed: int = 0
    samples: int = 1000

    @property
    def policy(self) -> PrecisionPolicy:
        return PrecisionPolicy(max_terms=self.max_terms, max_index=self.max_index)


def _get(cp, section, key, conv, default):
    if not cp.has_option(section, key):
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except (ValueError, DomainError) as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from None


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _pair(s: str) -> Tuple[float, float]:
    parts = [float(v) for v in s.replace(";", ",").split(",")]
    if len(parts) != 2:
        raise ValueError("expected two numbers 'a, b'")
    a, b = parts
    if not 0.0 <= a < b <= 1.0:
        raise ValueError("interval must satisfy 0 <= a < b <= 1")
    return a, b


def load_config(path: str) -> BuildConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path!r}: {exc}") from None

    cfg = BuildConfig()
    cfg.interval = _get(cp, "domain", "interval", _pair, cfg.interval)
    cfg.set_kind = _get(cp, "set", "kind", str.strip, cfg.set_kind)
    if cfg.set_kind not in ("diagonal", "graph", "dyadic"):
        raise ConfigError(f"[set] kind must be diagonal, graph or dyadic, got {cfg.set_kind!r}")
    cfg.base = _get(cp, "set", "base", str, None)
    cfg.breakpoints = _get(cp, "set", "breakpoints", str, None)
    cfg.depth = _get(cp, "set", "depth", int, cfg.depth)
    cfg.require_onepointed = _get(cp, "set", "require_onepointed", _bool, True)

    if cp.has_section("function"):
        opts = dict(cp.items("function"))
        name = opts.pop("gallery", None)
        if name is None:
            if "breakpoints" not in opts:
                raise ConfigError("[function] needs 'gallery' or inline 'breakpoints'")
            name = "piecewise_linear"
        cfg.function = name.strip()
        if cfg.function == "piecewise_linear":
            try:
                cfg.params = {"breakpoints": parse_breakpoints(opts.pop("breakpoints", ""))}
            except DomainError as exc:
                raise ConfigError(f"[function] breakpoints: {exc}") from None
        for k, v in opts.items():
            try:
                cfg.params[k] = float(v)
            except ValueError:
                raise ConfigError(f"[function] {k} = {v!r} is not a number") from None

    case = _get(cp, "build", "case", str.strip, cfg.case.name)
    try:
        cfg.case = CaseTag[case]
    except KeyError:
        raise ConfigError(f"unknown case {case!r}; known: {[c.name for c in CaseTag]}") from None
    cfg.tol = _get(cp, "build", "tol", float, cfg.tol)
    cfg.max_terms = _get(cp, "build", "max_terms", int, cfg.max_terms)
    cfg.max_index = _get(cp, "build", "max_index", int, cfg.max_index)
    cfg.max_stages = _get(cp, "build", "max_stages", int, cfg.max_stages)
    cfg.seed = _get(cp, "verify", "seed", int, cfg.seed)
    cfg.samples = _get(cp, "verify", "samples", int, cfg.samples)
    if not cfg.tol > 0 or cfg.max_terms < 1 or cfg.max_index < 1 or cfg.max_stages < 1:
        raise ConfigError("[build] tol and caps must be positive")
    if cfg.samples < 1:
        raise ConfigError("[verify] samples must be positive")
    return cfg


# ------------------------------------------------------------ building

def build_set(cfg: BuildConfig) -> GraphSet:
    a, b = cfg.interval
    try:
        if cfg.set_kind == "diagonal":
            return GraphSet.diagonal(a, b)
        if cfg.set_kind == "graph":
            base = parse_intervals(cfg.base) if cfg.base else parse_intervals(f"{a!r}..{b!r}")
            if cfg.breakpoints is None:
                raise ConfigError("[set] kind = graph needs 'breakpoints'")
            return GraphSet(base, Homeomorphism1D(tuple(parse_breakpoints(cfg.breakpoints))))
    except DomainError as exc:
        raise ConfigError(f"[set]: {exc}") from None
    # dyadic: never a graph, so the construction cannot start
    try:
        ce = gal.dyadic_counterexample(cfg.depth)
    except DomainError as exc:
        raise ConfigError(f"[set] depth: {exc}") from None
    verdict = validate_onepointed(ce.pieces)
    if verdict:
        raise ConfigError("dyadic set unexpectedly one-pointed")
    raise PreconditionViolation(verdict)


def build_entry(cfg: BuildConfig) -> gal.GalleryEntry:
    try:
        return gal.lookup(cfg.function, **cfg.params)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {cfg.function!r}: {exc}") from None
    except DomainError as exc:
        raise ConfigError(f"[function]: {exc}") from None


def build(cfg: BuildConfig) -> Tuple[SepExtension, gal.GalleryEntry]:
    E = build_set(cfg)
    entry = build_entry(cfg)
    ext = SepExtension(E, entry.sequence, cfg.case, cfg.policy, max_stages=cfg.max_stages,
                       default_tol=cfg.tol)
    return ext, entry


# ------------------------------------------------------------ commands

def cmd_extend(cfg: BuildConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    ext, entry = build(cfg)
    E = ext.E
    print(f"function={entry.name}", file=out)
    print(f"case={ext.case.name}", file=out)
    print(f"set={cfg.set_kind} X1=[{format_intervals(E.base)}] Y1=[{format_intervals(E.image)}]",
          file=out)
    print(f"limit_mode={'rate-oracle' if ext.seq.rigorous else 'cauchy (heuristic)'}", file=out)
    print(f"policy max_terms={cfg.max_terms} max_index={cfg.max_index} tol={cfg.tol:g}",
          file=out)
    for t, v, note in entry.known_values:
        if not E.base.contains(t):
            continue
        ev = evaluate_detailed(ext, E.point(t), cfg.tol)
        print(f"f{E.point(t)} = {ev.value:.17g} (known {v:g}: {note}; mode {ev.mode})", file=out)
    return EXIT_OK


def grid_rows(ext: SepExtension, interval: Tuple[float, float], resolution: int,
              tol: float) -> List[Tuple[float, float, float]]:
    a, b = interval
    ts = np.linspace(a, b, resolution).tolist()
    return [(x, y, evaluate_detailed(ext, (x, y), tol).value) for x in ts for y in ts]


def cmd_grid(cfg: BuildConfig, resolution: int, out_path: str) -> int:
    ext, _ = build(cfg)
    rows = grid_rows(ext, cfg.interval, resolution, cfg.tol)
    fh = sys.stdout if out_path == "-" else open(out_path, "w", newline="")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "value"])
        for x, y, v in rows:
            w.writerow([f"{x:.17g}", f"{y:.17g}", f"{v:.17g}"])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _closed_form_applies(ext: SepExtension, entry: gal.GalleryEntry, cfg: BuildConfig) -> bool:
    # with f_0 = 0 the partition sum equals (1 - phi_0) f_1, which coincides with
    # f_1 only while |h_1| <= 1/2, i.e. while g spans a range of width <= 1
    if cfg.set_kind != "diagonal" or cfg.function not in CONSTANT_SEQUENCES:
        return False
    vals = [ext.seq.limit(t) for t in np.linspace(*cfg.interval, 257).tolist()]
    return max(vals) - min(vals) <= 1.0


def verify_reports(ext: SepExtension, entry: gal.GalleryEntry, cfg: BuildConfig
                   ) -> List[harness.ProbeReport]:
    seed, n = cfg.seed, cfg.samples
    E = ext.E
    reports: List[harness.ProbeReport] = []
    for stage in (1, 8):
        pair = ext.pair(stage)
        for r in [harness.check_pair_identity(pair, n, seed=seed),
                  *harness.check_pair_restriction(pair, n, seed=seed)]:
            r.name += f"[n={stage}]"
            reports.append(r)
    reports += harness.check_partition(ext, n, seed=seed)
    include = [t for t, _, _ in entry.known_values if E.base.contains(t)]
    if ext.seq.limit is not None:
        reports.append(harness.check_restriction(ext, n_samples=n, tol=cfg.tol, seed=seed,
                                                 include=include))
    else:
        reports.append(harness.check_self_consistency(ext, n, cfg.tol, seed))
    if _closed_form_applies(ext, entry, cfg):
        a, b = cfg.interval
        g = ext.seq.limit
        reports.append(harness.check_closed_form(ext, lambda t: g(min(max(t, a), b)), n,
                                                 seed=seed))
    reports += continuity_reports(ext, entry)
    return reports


def continuity_reports(ext: SepExtension, entry: gal.GalleryEntry,
                       depths: Sequence[int] = (10, 11, 12, 13, 14),
                       half_window: float = 2.0 ** -6) -> List[harness.ProbeReport]:
    """Section decay and epsilon-delta at jumps (or known points), joint probe at jumps."""
    E = ext.E
    f = ext.as_function()
    anchors = [t for t in entry.jumps if E.base.contains(t)]
    jumps = set(anchors)
    if not anchors:
        anchors = [t for t, _, _ in entry.known_values if E.base.contains(t)][:1]
    out = []
    for t in anchors:
        x0, y0 = E.point(t)
        for axis, c, a in (("horizontal", y0, x0), ("vertical", x0, y0)):
            for side, win in (("left", (a - half_window, a)), ("right", (a, a + half_window))):
                if win[0] < 0.0 or win[1] > 1.0:
                    continue
                osc = harness.section_oscillation(f, axis, c, win, depths)
                ups = sum(1 for u, v in zip(osc[:-1], osc[1:]) if v > u)
                out.append(harness.ProbeReport(
                    f"section_oscillation[{axis},{side}]", len(depths), float(ups), 0.0,
                    (x0, y0), note="increases_over_depths;" + "/".join(f"{v:.3g}" for v in osc)))
            for eps in (0.1, 0.05):
                delta, worst = harness.epsilon_delta_probe(f, (x0, y0), eps, axis)
                out.append(harness.ProbeReport(
                    f"epsilon_delta[{axis},eps={eps:g}]", 1, worst, eps, (x0, y0),
                    note=f"delta={delta:.6g}"))
        if t in jumps:
            osc = harness.joint_discontinuity_probe(f, (x0, y0), (0.1, 0.01, 0.001))
            shortfall = max(0.0, 0.9 - min(osc))
            out.append(harness.ProbeReport(
                "joint_discontinuity", 3, shortfall, 0.0, (x0, y0),
                note="shortfall_below_0.9;osc=" + "/".join(f"{v:.6g}" for v in osc)))
    return out


def cmd_verify(cfg: BuildConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    ext, entry = build(cfg)
    reports = verify_reports(ext, entry, cfg)
    for r in reports:
        print(r.line(), file=out)
    ok = all(r.passed for r in reports)
    print(f"{'ALL PASS' if ok else 'SOME FAILED'} ({sum(r.passed for r in reports)}/"
          f"{len(reports)}) seed={cfg.seed}", file=out)
    return EXIT_OK if ok else 1


def cmd_counterexample(depth: int, out=None) -> int:
    out = sys.stdout if out is None else out
    ce = gal.dyadic_counterexample(depth)
    print(f"E2: diagonal of [0,1]^2 (g = 0)", file=out)
    print(f"E1: {len(ce.E1.points)} points up to depth {depth} (g = 1)", file=out)
    for x, y in ce.E1.points:
        print(f"  ({x!r}, {y!r})", file=out)
    verdict = validate_onepointed(ce.pieces)
    print(f"verdict: {verdict}", file=out)
    samples = ce.discontinuity_samples()
    xs = [d[0] for d, _ in samples]
    spacing = harness.projection_net_spacing(xs)
    print(f"discontinuity samples: {len(samples)} diagonal points "
          f"(each at distance 2^-(n+1) from an E1 point, jump 1)", file=out)
    print(f"x-projection net spacing: {spacing!r}", file=out)
    return EXIT_OK if verdict else EXIT_PRECONDITION


# ------------------------------------------------------------ entry point

def _positive_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sepcont",
                                description="Separately continuous extensions of Baire-one "
                                            "functions from graph sets.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("extend", "build and summarise an extension"),
                        ("grid", "sample the extension on a grid to CSV"),
                        ("verify", "run the verification suites")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=True, help="INI build description")
        sp.add_argument("--seed", type=int, default=None, help="override [verify] seed")
        if name == "grid":
            sp.add_argument("--resolution", type=_positive_int, default=33,
                            help="points per axis (default 33)")
            sp.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    sp = sub.add_parser("counterexample", help="show the dyadic two-pointed set")
    sp.add_argument("--depth", type=_positive_int, default=3)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "counterexample":
            return cmd_counterexample(args.depth)
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.command == "extend":
            return cmd_extend(cfg)
        if args.command == "grid":
            if args.resolution < 2:
                raise ConfigError("--resolution must be at least 2")
            return cmd_grid(cfg, args.resolution, args.out)
        return cmd_verify(cfg)
    except PreconditionViolation as exc:
        print(f"precondition violated: {exc.violation}", file=sys.stderr)
        return EXIT_PRECONDITION
    except NonConvergence as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
