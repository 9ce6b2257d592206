"""Command-line interface.

Subcommands::

    entropy    single-subsystem and sum/difference entropies (x, p or k representation)
    criterion  one entanglement criterion with verdict
    scan-beta  a criterion swept over a grid of GUP parameters (CSV by default)
    epi-check  seeded randomized checks of the entropy-power and BBM inequalities

Exit codes: 0 success, 2 GUP domain error, 3 invalid state descriptor,
4 criterion kind does not fit the state, 5 inequality violation, 64 usage error.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .checks import run_checks
from .criteria import BoundKind, check_kind, evaluate, evaluate_with_profile, profile
from .errors import AliasError, GupDomainError, KindError, ParamError, SchemaError
from .gup import EPS_TAIL, GupParam
from .report import csv_table, dumps, write_text
from .states import GridConfig, JointState, MixedEnsemble, State, StateDescriptor, build_state, parse_descriptor

log = logging.getLogger("cventangle")

EXIT_OK = 0
EXIT_GUP = 2
EXIT_DESCRIPTOR = 3
EXIT_KIND = 4
EXIT_VIOLATION = 5
EXIT_USAGE = 64

SCAN_COLUMNS = ("beta", "lhs", "bound", "margin", "eta1", "eta2", "verdict")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    grid_n: int = 4096
    grid_n2d: int = 512
    half_width: float | None = None
    eps_tail: float = EPS_TAIL
    tau: float = 1e-9
    seed: int = 0
    out: str | None = None
    figure: str | None = None
    fmt: str = "json"
    timing: bool = False

    def __post_init__(self):
        for name in ("grid_n", "grid_n2d"):
            n = getattr(self, name)
            if n < 2**8 or n > 2**16 or n & (n - 1):
                raise UsageError(f"--{name.replace('_', '-')} must be a power of two in [256, 65536], got {n}")
        for name in ("eps_tail", "tau"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise UsageError(f"--{name.replace('_', '-')} must be a positive number")
        if self.half_width is not None and not (math.isfinite(self.half_width) and self.half_width > 0):
            raise UsageError("--half-width must be positive")

    @property
    def grid(self) -> GridConfig:
        return GridConfig(n=self.grid_n, n2d=self.grid_n2d, half_width=self.half_width)

    def as_dict(self) -> dict:
        return {"grid_n": self.grid_n, "grid_n2d": self.grid_n2d, "half_width": self.half_width,
                "eps_tail": self.eps_tail, "tau": self.tau, "seed": self.seed}


def parse_beta_grid(text: str) -> list[float]:
    """``A:B:N`` (linear) or ``A:B:N:log`` (geometric)."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin", "linear")):
        raise UsageError(f"beta grid must look like A:B:N or A:B:N:log, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad beta grid {text!r}: {exc}") from exc
    if count < 1:
        raise UsageError("beta grid count must be >= 1")
    if not (math.isfinite(start) and math.isfinite(stop)) or start < 0 or stop < 0:
        raise UsageError("beta values must be finite and >= 0")
    if count == 1:
        return [start]
    if len(parts) == 4 and parts[3] == "log":
        if start <= 0:
            raise UsageError("a logarithmic beta grid needs a positive start")
        return [float(b) for b in np.geomspace(start, stop, count)]
    return [float(b) for b in np.linspace(start, stop, count)]


def _config(args) -> RunConfig:
    return RunConfig(
        grid_n=args.grid_n, grid_n2d=args.grid_n2d, half_width=args.half_width,
        eps_tail=args.eps_tail, tau=getattr(args, "tau", 1e-9), seed=getattr(args, "seed", 0),
        out=getattr(args, "out", None), figure=getattr(args, "figure", None),
        fmt=getattr(args, "format", None) or "json", timing=getattr(args, "timing", False),
    )


def load_state(path: str, cfg: RunConfig) -> tuple[StateDescriptor, State]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read state file {path}: {exc}") from exc
    desc = parse_descriptor(text)
    return desc, build_state(desc, cfg.grid)


def _axis_dict(ax) -> dict:
    return {"min": ax.min, "max": ax.max, "n": ax.n}


def _grid_echo(state: State) -> dict:
    if isinstance(state, MixedEnsemble):
        ax = state.components[0].psi1.axis
    elif isinstance(state, JointState):
        ax = state.amplitude.axes[0]
    else:
        ax = state.psi1.axis
    return {"x_axis": _axis_dict(ax), "dimension": 2 if isinstance(state, JointState) else 1}


def _header(command: str, desc: StateDescriptor | None, cfg: RunConfig) -> dict:
    doc = {"artifact": "cventangle", "version": __version__, "command": command}
    if desc is not None:
        doc["input"] = desc.to_dict()
    doc["config"] = cfg.as_dict()
    return doc


def _write_doc(doc: dict, cfg: RunConfig, t0: float) -> None:
    # wall-clock time breaks byte-identical output, so it is opt-in
    if cfg.timing:
        doc["timing"] = {"elapsed_s": time.perf_counter() - t0}
    write_text(dumps(doc), cfg.out)


def _check_beta(beta: float) -> GupParam:
    if not math.isfinite(beta) or beta < 0:
        raise UsageError("--beta must be finite and >= 0")
    return GupParam(beta)


# --------------------------------------------------------------------------
# commands


def cmd_entropy(args) -> int:
    t0 = time.perf_counter()
    cfg = _config(args)
    g = _check_beta(args.beta)
    if args.rep == "k" and g.beta == 0:
        raise UsageError("the k representation needs --beta > 0")
    desc, state = load_state(args.state, cfg)
    prof = profile(state, g if args.rep == "k" else GupParam(0.0), cfg.eps_tail)
    if args.rep == "x":
        ent = {"H_w1": prof.hw1, "H_w2": prof.hw2, "H_w_plus": prof.hw_plus, "H_w_minus": prof.hw_minus}
        keys = {"w+": "w+", "w-": "w-"}
    elif args.rep == "p":
        ent = {"H_v1": prof.hv1, "H_v2": prof.hv2, "H_v_plus": prof.hv_plus, "H_v_minus": prof.hv_minus}
        keys = {"v+": "v+", "v-": "v-"}
    else:
        ent = {"H_u1": prof.hv1 + prof.eta1, "H_u2": prof.hv2 + prof.eta2,
               "H_u_plus": prof.hu_plus, "H_u_minus": prof.hu_minus,
               "eta1": prof.eta1, "eta2": prof.eta2}
        keys = {"u+": "u+", "u-": "u-"}
    doc = _header("entropy", desc, cfg)
    doc.update(grid=_grid_echo(state), representation=args.rep, beta=g.beta, entropies=ent)
    _write_doc(doc, cfg, t0)
    if cfg.figure:
        from .plotting import plot_densities

        plot_densities({k: prof.densities[v] for k, v in keys.items()}, cfg.figure,
                       xlabel=f"{args.rep}$_\\pm$", title=f"sum/difference densities ({args.rep})")
    return EXIT_OK


def cmd_criterion(args) -> int:
    t0 = time.perf_counter()
    cfg = _config(args)
    g = _check_beta(args.beta)
    kind = BoundKind(args.kind)
    desc, state = load_state(args.state, cfg)
    res, prof = evaluate_with_profile(state, kind, g, cfg.eps_tail, cfg.tau)
    doc = _header("criterion", desc, cfg)
    doc.update(grid=_grid_echo(state), entropies=prof.as_dict(), results=[res.as_dict()])
    _write_doc(doc, cfg, t0)
    if cfg.figure:
        from .plotting import plot_densities

        mom = "u" if kind.is_gup else "v"
        first, second = res.pairing
        plot_densities({f"w{first}": prof.densities["w" + first],
                        f"{mom}{second}": prof.densities[mom + second]}, cfg.figure,
                       title=f"{kind.value}: {res.verdict.value}")
    return EXIT_OK


def _scan_row(state: State, kind: BoundKind, beta: float, cfg: RunConfig) -> dict:
    res = evaluate(state, kind, GupParam(beta), cfg.eps_tail, cfg.tau)
    return {"beta": beta, "lhs": res.lhs, "bound": res.bound, "margin": res.margin,
            "eta1": res.eta1, "eta2": res.eta2, "verdict": res.verdict.value}


def _emit_scan(rows: list[dict], desc, cfg: RunConfig, kind: BoundKind, t0: float) -> None:
    if cfg.fmt == "csv":
        write_text(csv_table(rows, SCAN_COLUMNS), cfg.out)
    else:
        doc = _header("scan-beta", desc, cfg)
        doc.update(kind=kind.value, rows=rows)
        _write_doc(doc, cfg, t0)


def cmd_scan_beta(args) -> int:
    t0 = time.perf_counter()
    cfg = _config(args)
    betas = parse_beta_grid(args.beta_grid)
    kind = BoundKind(args.kind)
    desc, state = load_state(args.state, cfg)
    check_kind(state, kind)
    rows: list[dict] = []
    status = EXIT_OK
    with ThreadPoolExecutor(max_workers=min(4, len(betas))) as pool:
        futures = [pool.submit(_scan_row, state, kind, b, cfg) for b in betas]
        for b, fut in zip(betas, futures):
            try:
                rows.append(fut.result())
            except GupDomainError as exc:
                log.error("beta=%g: %s", b, exc)
                status = EXIT_GUP
                for f in futures:
                    f.cancel()
                break
    _emit_scan(rows, desc, cfg, kind, t0)
    if cfg.figure and rows:
        from .plotting import plot_beta_scan

        plot_beta_scan(rows, cfg.figure, title=f"{kind.value}")
    return status


def cmd_epi_check(args) -> int:
    t0 = time.perf_counter()
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    cfg = RunConfig(grid_n=args.grid_n, seed=args.seed, out=args.out, timing=args.timing)
    summary = run_checks(args.trials, args.seed, cfg.grid_n)
    doc = _header("epi-check", None, cfg)
    doc["summary"] = summary.as_dict()
    _write_doc(doc, cfg, t0)
    return EXIT_OK if summary.ok else EXIT_VIOLATION


# --------------------------------------------------------------------------
# parser


def _add_grid_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid-n", type=int, default=4096, help="1D grid intervals (power of two)")
    p.add_argument("--grid-n2d", type=int, default=512, help="2D grid intervals per axis (power of two)")
    p.add_argument("--half-width", type=float, default=None, help="override the position half-width")
    p.add_argument("--eps-tail", type=float, default=EPS_TAIL,
                   help="largest momentum mass allowed beyond the GUP cutoff")
    p.add_argument("--timing", action="store_true", help="add elapsed wall-clock time to the report")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cventangle", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    kinds = [k.value for k in BoundKind]

    p = sub.add_parser("entropy", help="entropies of one state")
    p.add_argument("--state", required=True, help="JSON state descriptor")
    p.add_argument("--rep", choices=("x", "p", "k"), default="x")
    p.add_argument("--beta", type=float, default=0.0)
    _add_grid_options(p)
    p.add_argument("--out", help="report path (default stdout)")
    p.add_argument("--figure", help="also plot the sum/difference densities to this file")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("criterion", help="evaluate one criterion")
    p.add_argument("--state", required=True)
    p.add_argument("--kind", required=True, choices=kinds)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--tau", type=float, default=1e-9, help="margin needed to report Entangled")
    _add_grid_options(p)
    p.add_argument("--out")
    p.add_argument("--figure", help="also plot the densities of the deciding pairing")
    p.set_defaults(func=cmd_criterion)

    p = sub.add_parser("scan-beta", help="sweep a criterion over beta")
    p.add_argument("--state", required=True)
    p.add_argument("--kind", required=True, choices=kinds)
    p.add_argument("--beta-grid", required=True, help="A:B:N or A:B:N:log")
    p.add_argument("--tau", type=float, default=1e-9)
    _add_grid_options(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.add_argument("--figure", help="also plot bound, lhs and margin versus beta")
    p.set_defaults(func=cmd_scan_beta)

    p = sub.add_parser("epi-check", help="randomized EPI and BBM checks")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-n", type=int, default=4096)
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true", help="add elapsed wall-clock time to the report")
    p.set_defaults(func=cmd_epi_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"cventangle: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GupDomainError as exc:
        print(f"cventangle: GUP domain error: {exc}", file=sys.stderr)
        return EXIT_GUP
    except KindError as exc:
        print(f"cventangle: {exc}", file=sys.stderr)
        return EXIT_KIND
    except (SchemaError, ParamError, AliasError) as exc:
        print(f"cventangle: invalid state descriptor: {exc}", file=sys.stderr)
        return EXIT_DESCRIPTOR


if __name__ == "__main__":
    sys.exit(main())
