"""Command-line entry point with ``capacity``, ``ghc`` and ``simulate`` subcommands.

Exit status is 0 on success, 1 on usage errors and 2 on runtime failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bootstrap import ChainError
from .capacity import ConvergenceError, solve_capacity, uniform_shaping_gain
from .channel import ChannelError, bsc
from .ghc import CodeError, divergence_to_target, ghc_matcher, joint_pmf, matched_rate
from .ldpc import AlistError, RankError
from .sweep import DEFAULT_EPSILONS, SweepConfig, SweepConfigError, emit_csv, run_sweep

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


# Every flag defaults to None so that config-file values can fill the gaps.
def _channel_flags(p, k=False):
    p.add_argument("--w0", type=float, help="duration of symbol 0 (default 1)")
    p.add_argument("--w1", type=float, help="duration of symbol 1 (default 5)")
    p.add_argument("--epsilon", type=float, help="BSC crossover probability")
    if k:
        p.add_argument("--k", type=int, help="matcher block length (default 4)")
    p.add_argument("--config", help="flat 'key = value' file; flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bootshape", description="Capacity, matcher and bootstrap-shaping simulations.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    cap = sub.add_parser("capacity", help="capacity per unit cost of a BSC with symbol durations")
    _channel_flags(cap)

    g = sub.add_parser("ghc", help="print the GHC matcher for k-bit blocks")
    _channel_flags(g, k=True)

    sim = sub.add_parser("simulate", help="Monte Carlo sweep over epsilon, written as CSV")
    _channel_flags(sim, k=True)
    sim.add_argument("--epsilon-list", type=_floats, help="comma-separated crossover probabilities")
    sim.add_argument("--mode", choices=("uniform", "sparse_dense", "bootstrap"))
    sim.add_argument("--rate", type=_floats, help="code rate(s) of generated codes, comma-separated")
    sim.add_argument("--code-n", type=int, help="length of generated codes (default 1024)")
    sim.add_argument("--code-file", help="alist parity-check matrix instead of a generated code")
    sim.add_argument("--code-seed", type=int, help="seed of the code construction (default 0)")
    sim.add_argument("--blocks", type=int, help="bootstrap chain length B (default 1: building block)")
    sim.add_argument("--trials", type=int, help="Monte Carlo trials per point (default 1000)")
    sim.add_argument("--seed", type=int, help="master seed (default 1)")
    sim.add_argument("--max-iter", type=int, help="BP iterations (default 50)")
    sim.add_argument("--prior", choices=("capacity", "dyadic"), help="decoder prior for matched bits")
    sim.add_argument("--out", help="CSV output path (required)")
    return parser


_CONFIG_TYPES = {
    "w0": float,
    "w1": float,
    "epsilon": float,
    "epsilon_list": _floats,
    "k": int,
    "mode": str,
    "rate": _floats,
    "code_n": int,
    "code_file": str,
    "code_seed": int,
    "blocks": int,
    "trials": int,
    "seed": int,
    "max_iter": int,
    "prior": str,
    "out": str,
}


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    values = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        if key not in _CONFIG_TYPES:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_TYPES[key](value.strip())
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return values


def _merged(args) -> dict:
    values = read_config(args.config) if args.config else {}
    for key, value in vars(args).items():
        if value is not None and key in _CONFIG_TYPES:
            values[key] = value
    return values


def _channel(values):
    if values.get("epsilon") is None:
        raise UsageError("--epsilon is required")
    return bsc(values["epsilon"], values.get("w0", 1.0), values.get("w1", 5.0))


def cmd_capacity(values, out) -> int:
    ch = _channel(values)
    res = solve_capacity(ch)
    print(f"p_star = {res.p_star[0]:.12g} {res.p_star[1]:.12g}", file=out)
    print(f"capacity = {res.capacity:.12g}", file=out)
    print(f"kkt_residual = {res.kkt_residual:.3g}", file=out)
    print(f"iterations = {res.iterations}", file=out)
    print(f"uniform_shaping_gain = {uniform_shaping_gain(ch, res):.12g}", file=out)
    return EXIT_OK


def cmd_ghc(values, out) -> int:
    ch = _channel(values)
    k = values.get("k", 4)
    if not 1 <= k <= 16:
        raise UsageError("--k must be in [1, 16]")
    res = solve_capacity(ch)
    code = ghc_matcher(ch, k, res)
    width = max(code.max_length, len("word"))
    print(f"{'word':>{width}}    block  length", file=out)
    for line in code.table():
        word, block = line.split()
        length = 0 if word == "-" else len(word)
        print(f"{word:>{width}} -> {block:>{max(k, 5)}}  {length:>6}", file=out)
    mi_rate, _, bound = matched_rate(code, ch, res)
    divergence = divergence_to_target(code.block_pmf, joint_pmf(res.p_star, k))
    print(f"divergence_bits = {divergence:.6g}", file=out)
    print(f"mi_rate = {mi_rate:.6g}", file=out)
    print(f"shaping_gain = {mi_rate / res.capacity:.6g}", file=out)
    print(f"penalty_bound = {bound:.6g}", file=out)
    return EXIT_OK


def sweep_config(values) -> SweepConfig:
    if not values.get("out"):
        raise UsageError("simulate needs --out")
    if "epsilon_list" in values:
        epsilons = values["epsilon_list"]
    elif "epsilon" in values:
        epsilons = [values["epsilon"]]
    else:
        epsilons = list(DEFAULT_EPSILONS)
    mapping = {"rate": "rates", "epsilon_list": None, "epsilon": None}
    kwargs = {mapping.get(k, k): v for k, v in values.items() if mapping.get(k, k)}
    cfg = SweepConfig(epsilons=epsilons, **kwargs)
    try:
        cfg.validate()
    except SweepConfigError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def cmd_simulate(values, out) -> int:
    cfg = sweep_config(values)
    reports = run_sweep(cfg)
    path = emit_csv(reports, cfg.out)
    print(f"{'mode':<13}{'rate':>7}{'epsilon':>9}{'errors':>8}{'trials':>8}{'p_b':>10}"
          f"{'shaping':>9}{'coding':>9}{'R_eff':>9}", file=out)
    for r in reports:
        print(
            f"{r.mode:<13}{r.code_rate:>7.4g}{r.epsilon:>9.4g}{r.block_errors:>8}{r.trials:>8}"
            f"{r.p_b:>10.3g}{r.shaping_gain:>9.4f}{r.coding_gain:>9.4f}{r.effective_rate:>9.4f}",
            file=out,
        )
    print(f"wrote {len(reports)} rows to {path}", file=out)
    return EXIT_OK


COMMANDS = {"capacity": cmd_capacity, "ghc": cmd_ghc, "simulate": cmd_simulate}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        values = _merged(args)
        return COMMANDS[args.command](values, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SweepConfigError as exc:
        print(f"bootshape: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ChannelError as exc:
        print(f"bootshape: invalid channel: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ChainError, AlistError, RankError, CodeError, OSError, ValueError) as exc:
        print(f"bootshape: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
