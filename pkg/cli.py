"""Command-line entry point: ranks, meet/join/pushout, Dicks reports, Σ, locus tables, witnesses and search.

Data goes to stdout, diagnostics to stderr. Exit status is 0 on success,
1 on usage or input errors and 2 when a proven identity or inequality fails.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from core.colored import has_nonmonochromatic_cycle, parse_colored_text, sigma
from core.dicks import build_dicks
from core.errors import StallingsError, TheoremViolation
from core.graph import CoreGraph, build_core_graph, deserialize, serialize
from core.lattice import RankProfile, join, pullback, pushout
from core.locus import Verdict, classify, locus_table
from core.normalize import normalize_pair
from core.sampler import MODES, SampleConfig, search
from core.sig import build_sig
from core.witnesses import WitnessStore, construct_witness
from core.words import Alphabet, Word, format_word, parse_subgroup_text
from pipeline.graph import run_pipeline
from utils.config import get_settings
from utils.metrics_tracker import log_search_metrics

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2

COMMANDS = ("rank", "meet", "join", "pushout", "normalize", "dicks", "sigma", "sig", "classify", "locus", "witness", "search")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; that status is reserved for violations here
    def error(self, message: str) -> None:
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e


def _is_graph_text(text: str) -> bool:
    return any(line.strip().startswith("basepoint") for line in text.splitlines())


def _read_subgroup(path: str) -> Tuple[Alphabet, List[Word]]:
    return parse_subgroup_text(_read_text(path))


def _read_pair(args: argparse.Namespace) -> Tuple[CoreGraph, CoreGraph]:
    if args.H is None or args.K is None:
        raise UsageError(f"{args.command} needs both -H and -K")
    a_H, words_H = _read_subgroup(args.H)
    a_K, words_K = _read_subgroup(args.K)
    alphabet = a_H if a_H == a_K else a_H.union(a_K)
    return build_core_graph(words_H, alphabet), build_core_graph(words_K, alphabet)


def _profile_from(args: argparse.Namespace) -> RankProfile:
    missing = [flag for flag in ("h", "k", "v", "c") if getattr(args, flag) is None]
    if missing:
        raise UsageError(f"{args.command} needs " + " ".join(f"-{m}" for m in missing))
    return RankProfile(args.h, args.k, args.v, args.c)


def _store(args: argparse.Namespace) -> WitnessStore:
    return WitnessStore(get_settings(args.db).witness_db)


def _emit(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_rank(args: argparse.Namespace) -> int:
    source = args.H or args.input
    if source is None:
        raise UsageError("rank needs -H or an input file")
    text = _read_text(source)
    if _is_graph_text(text):
        g = deserialize(text)
    else:
        alphabet, words = parse_subgroup_text(text)
        g = build_core_graph(words, alphabet)
    _emit(f"rank {g.rank}\n")
    return EXIT_OK


def cmd_meet(args: argparse.Namespace) -> int:
    H, K = _read_pair(args)
    meet = pullback(H, K).meet
    _emit(serialize(meet) + f"rank {meet.rank}\n")
    return EXIT_OK


def cmd_join(args: argparse.Namespace) -> int:
    H, K = _read_pair(args)
    joined = join(H, K)
    _emit(serialize(joined) + f"rank {joined.rank}\n")
    return EXIT_OK


def cmd_pushout(args: argparse.Namespace) -> int:
    H, K = _read_pair(args)
    T = pushout(H, K)
    _emit(T.serialize() + f"rank {T.rank}\n")
    return EXIT_OK


def cmd_normalize(args: argparse.Namespace) -> int:
    H, K = _read_pair(args)
    Hn, Kn, g = normalize_pair(H, K)
    _emit(f"conjugator {format_word(g) or '1'}\n# H\n" + serialize(Hn) + "# K\n" + serialize(Kn))
    return EXIT_OK


def cmd_dicks(args: argparse.Namespace) -> int:
    if args.H is None or args.K is None:
        raise UsageError("dicks needs both -H and -K")
    a_H, words_H = _read_subgroup(args.H)
    a_K, words_K = _read_subgroup(args.K)
    alphabet = a_H if a_H == a_K else a_H.union(a_K)
    state = run_pipeline(
        [format_word(w) for w in words_H],
        [format_word(w) for w in words_K],
        alphabet_letters=alphabet.letters,
        embed_theta=args.theta,
    )
    _emit(state["report"])
    for warning in state["warnings"]:
        logger.warning(warning)
    if state["errors"]:
        for error in state["errors"]:
            logger.error(error)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_sigma(args: argparse.Namespace) -> int:
    if args.input is None:
        raise UsageError("sigma needs an edge-list file or '-'")
    g = parse_colored_text(_read_text(args.input))
    value = sigma(g)
    cycle = has_nonmonochromatic_cycle(g)
    _emit(f"sigma {value}\nnonmonochromatic-cycle {str(cycle).lower()}\n")
    if value > g.n or (value == g.n) == cycle:
        logger.error(f"Σ = {value} on {g.n} vertices contradicts the cycle verdict {cycle}")
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_sig(args: argparse.Namespace) -> int:
    H, K = _read_pair(args)
    Hn, Kn, _ = normalize_pair(H, K)
    b = build_dicks(Hn, Kn)
    _emit(build_sig(b, args.s, args.t).render())
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    result = classify(_profile_from(args))
    line = str(result)
    if args.db is not None and result.verdict is Verdict.REALIZABLE and _store(args).lookup(result.profile):
        line += " witnessed"
    _emit(line + "\n")
    if result.verdict is Verdict.UNKNOWN:
        logger.info(result.note)
    return EXIT_OK


def cmd_locus(args: argparse.Namespace) -> int:
    if args.h is None or args.k is None:
        raise UsageError("locus needs -h and -k")
    store = _store(args) if args.db is not None else None
    table = locus_table(args.h, args.k, store)
    _emit(table.to_csv() if args.format == "csv" else table.to_ascii())
    return EXIT_OK


def cmd_witness(args: argparse.Namespace) -> int:
    profile = _profile_from(args)
    settings = get_settings(args.db)
    budget = args.budget if args.budget is not None else settings.search_budget
    record = construct_witness(profile, WitnessStore(settings.witness_db), budget=budget, seed=args.seed)
    if args.rank2:
        record = record.rank2()
    _emit(record.render())
    return EXIT_OK


def cmd_search(args: argparse.Namespace) -> int:
    settings = get_settings()
    cfg = SampleConfig(
        seed=args.seed,
        pairs=args.pairs,
        max_vertices=args.max_vertices,
        alphabet_size=args.alphabet_size,
        mode=args.mode,
        dicks_fraction=args.dicks_fraction if args.dicks_fraction is not None else settings.dicks_fraction,
        jobs=args.jobs,
    )
    report = search(cfg)
    _emit(report.to_text(cfg, timing=not args.no_timing))
    print(f"throughput {report.throughput:.1f} pairs/s over {report.elapsed:.2f}s", file=sys.stderr)
    try:
        log_search_metrics(
            cfg.seed, report.pairs, cfg.max_vertices, cfg.mode, cfg.jobs, report.elapsed,
            len(report.violations), len(report.invariant_failures), args.metrics_log,
        )
    except OSError as e:
        logger.warning(f"Could not append to the run log: {e}")
    if report.violations:
        logger.warning(f"{len(report.violations)} sampled profiles fall outside the known locus")
    return EXIT_VIOLATION if report.invariant_failures else EXIT_OK


HANDLERS = {
    "rank": cmd_rank,
    "meet": cmd_meet,
    "join": cmd_join,
    "pushout": cmd_pushout,
    "normalize": cmd_normalize,
    "dicks": cmd_dicks,
    "sigma": cmd_sigma,
    "sig": cmd_sig,
    "classify": cmd_classify,
    "locus": cmd_locus,
    "witness": cmd_witness,
    "search": cmd_search,
}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stallings", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-q", "--quiet", action="store_true", help="only errors on stderr")
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        # -h is the rank of H, so help is --help only
        p = sub.add_parser(name, help=help_text, add_help=False)
        p.add_argument("--help", action="help", help="show this help message and exit")
        return p

    def pair_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("-H", metavar="FILE", help="subgroup file for H ('-' for stdin)")
        p.add_argument("-K", metavar="FILE", help="subgroup file for K")

    def profile_flags(p: argparse.ArgumentParser, with_vc: bool = True) -> None:
        p.add_argument("-h", type=int, help="rank of H")
        p.add_argument("-k", type=int, help="rank of K")
        if with_vc:
            p.add_argument("-v", type=int, help="rank of the join")
            p.add_argument("-c", type=int, help="rank of the intersection")
        p.add_argument("--db", metavar="PATH", help="witness store (default $STALLINGS_WITNESS_DB)")

    p = command("rank", "rank of a subgroup file or graph file")
    p.add_argument("-H", metavar="FILE")
    p.add_argument("input", nargs="?", metavar="FILE")
    for name, text in (
        ("meet", "core graph of H∩K"),
        ("join", "core graph of H∨K"),
        ("pushout", "topological pushout of Γ_H and Γ_K"),
        ("normalize", "conjugate the pair so that no core graph has a valence-1 vertex"),
    ):
        pair_flags(command(name, text))

    p = command("dicks", "Dicks graphs, duality and the Ω_abc checks")
    pair_flags(p)
    p.add_argument("--theta", action="store_true", help="embed two-letter input into the a/b/c scheme first")

    p = command("sigma", "Σ of a colored multigraph edge list")
    p.add_argument("input", nargs="?", metavar="FILE", help="edge list file or '-'")

    p = command("sig", "subgraph isomorphism graph of K_{s,t}")
    pair_flags(p)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--t", type=int, default=1)

    profile_flags(command("classify", "classify a rank profile (h, k, v, c)"))
    p = command("locus", "locus table of page (h, k)")
    profile_flags(p, with_vc=False)
    p.add_argument("--format", choices=("csv", "ascii"), default="csv")

    p = command("witness", "construct a verified witness for a REALIZABLE profile")
    profile_flags(p)
    p.add_argument("--rank2", action="store_true", help="replay the witness inside F(x, y)")
    p.add_argument("--budget", type=int, help="base-row search pair budget")
    p.add_argument("--seed", type=int, default=0)

    p = command("search", "seeded random search for profiles outside the known locus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--max-vertices", type=int, default=6)
    p.add_argument("--mode", choices=MODES, default="rose")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--alphabet-size", type=int, default=2)
    p.add_argument("--dicks-fraction", type=float)
    p.add_argument("--metrics-log", metavar="PATH", help="run log CSV (default $STALLINGS_METRICS_LOG)")
    p.add_argument("--no-timing", action="store_true", help="leave the throughput line out so stdout depends only on the flags")
    return parser


def configure_logging(args: argparse.Namespace) -> None:
    if args.quiet:
        level = logging.ERROR
    elif args.verbose:
        level = logging.DEBUG
    else:
        level = getattr(logging, get_settings().log_level, logging.WARNING)
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(f"choose a command: {', '.join(COMMANDS)}")
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE

    configure_logging(args)
    try:
        return HANDLERS[args.command](args)
    except UsageError as e:
        print(f"{args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except TheoremViolation as e:
        logger.error(f"Invariant violated, please report this input: {e}")
        if e.details:
            logger.error(f"Details: {e.details}")
        return EXIT_VIOLATION
    except StallingsError as e:
        print(f"{args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
