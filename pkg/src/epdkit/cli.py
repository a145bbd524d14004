"""Command-line interface: ``epdkit <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .epd import (
    brute_force_protect,
    epd,
    epd_by_outcome_enumeration,
    epd_with_protection,
    greedy_protect,
    hedge_scores,
)
from .generate import INTERVAL_PRESETS, GenParams, budget, gen_instance, random_tree
from .newick import read_newick, write_newick
from .report import write_report
from .sensitivity import DEFAULT_SEED, ExperimentConfig, run_batch
from .tables import SpeciesTable, format_species_table, read_species_table

_TREE_KINDS = {
    "nonultrametric": "random-nonultrametric",
    "ultrametric": "random-ultrametric",
    "fixed": "fixed-tree-scenarios",
}


class CLIError(Exception):
    pass


def _load(args):
    tree = read_newick(args.tree)
    table = read_species_table(args.table, tree)
    return tree, table


def _scenario_probs(table: SpeciesTable, preset: str) -> list[tuple[str, np.ndarray]]:
    if table.categories is None:
        return [("scenario 1", table.p1), ("scenario 2", table.p2)]
    lo, hi = np.asarray(INTERVAL_PRESETS[preset]).T
    mid = ((lo + hi) / 2)[table.categories - 1]
    return [(f"{preset} interval midpoints", mid)]


def _first_probs(table, preset):
    return _scenario_probs(table, preset)[0][1]


def cmd_epd(args) -> int:
    tree, table = _load(args)
    print(f"total PD\t{sum(tree.length):.4f}")
    for name, p in _scenario_probs(table, args.intervals_preset):
        print(f"ePD ({name})\t{epd(tree, p):.4f}")
    return 0


def _budget(args, n) -> int:
    if args.k is not None:
        return args.k
    if args.rho is not None:
        return budget(args.rho, n)
    raise CLIError("give the protection budget with --k or --rho")


def cmd_greedy(args) -> int:
    tree, table = _load(args)
    p = _first_probs(table, args.intervals_preset)
    k = _budget(args, tree.n_species)
    if not 0 <= k <= tree.n_species:
        raise CLIError(f"--k must lie in [0, {tree.n_species}]")
    res = greedy_protect(tree, p, k)
    print(f"base ePD\t{res.base_epd:.4f}")
    total = res.base_epd
    for rank, (s, g) in enumerate(zip(res.species, res.gains), 1):
        total += g
        print(f"{rank}\t{tree.labels[s]}\tgain {g:.4f}\tePD {total:.4f}")
    print(f"final ePD\t{res.epd:.4f}")
    return 0


def cmd_hedge(args) -> int:
    tree, table = _load(args)
    scores = hedge_scores(tree, _first_probs(table, args.intervals_preset))
    for i in sorted(range(tree.n_species), key=lambda i: (-scores[i], i)):
        print(f"{tree.labels[i]}\t{scores[i]:.4f}")
    return 0


def cmd_gen(args) -> int:
    if args.tree_kind == "fixed":
        raise CLIError("gen draws random trees; use --tree-kind nonultrametric or ultrametric")
    params = GenParams(
        intervals=INTERVAL_PRESETS[args.intervals_preset],
        probability_mode=args.prob_mode,
        ultrametric=args.tree_kind == "ultrametric",
        rho_choices=(0.1, 0.2, 0.3, 0.4, 0.5) if args.rho is None else (args.rho,),
    )
    out = Path(args.out)
    for i in range(args.instances):
        inst = gen_instance(args.seed, i, params)
        d = out / f"instance_{i:05d}"
        d.mkdir(parents=True, exist_ok=True)
        labels = inst.tree.labels
        (d / "tree.nwk").write_text(write_newick(inst.tree) + "\n", encoding="utf-8")
        (d / "categories.csv").write_text(
            format_species_table(SpeciesTable(labels, categories=inst.categories)),
            encoding="utf-8",
        )
        (d / "probabilities.csv").write_text(
            format_species_table(SpeciesTable(labels, p1=inst.probs1, p2=inst.probs2)),
            encoding="utf-8",
        )
        manifest = {
            **inst.provenance,
            "tree_kind": args.tree_kind,
            "prob_mode": args.prob_mode,
            "n_species": inst.tree.n_species,
            "k": inst.k,
            "scenario1": inst.scenario1,
            "scenario2": inst.scenario2,
        }
        (d / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {args.instances} instance(s) to {out}")
    return 0


def cmd_experiment(args) -> int:
    family = _TREE_KINDS[args.tree_kind]
    if family == "fixed-tree-scenarios" and args.perturb:
        family = "fixed-tree-perturbation"
    tree = categories = probs = None
    if family.startswith("fixed"):
        if args.tree is None or args.table is None:
            raise CLIError("--tree-kind fixed needs TREE and TABLE arguments")
        tree, table = _load(args)
        categories = table.categories
        if table.p1 is not None:
            probs = (table.p1, table.p2)
    elif args.tree is not None:
        raise CLIError("TREE/TABLE are only used with --tree-kind fixed")
    config = ExperimentConfig(
        family=family,
        instances=args.instances,
        prob_mode=args.prob_mode,
        intervals_preset=args.intervals_preset,
        perturb=args.perturb,
        rho=args.rho,
        seed=args.seed,
        workers=args.workers,
    )
    stats, results = run_batch(config, tree, categories, probs)
    paths = write_report(args.out, stats, results, config)
    print(
        f"{stats.count} instances: mean gap {100 * stats.gap_mean:.2f}%, "
        f"std {100 * stats.gap_std:.2f}%, max {100 * stats.gap_max:.2f}%, "
        f"max dissimilarity {stats.dissimilarity_max:.2f}"
    )
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = {"epd-enumeration": 0, "greedy-bruteforce": 0, "greedy-gains": 0}
    for _ in range(args.instances):
        n = int(rng.integers(2, 13))
        tree = random_tree(rng, n, max_children=int(rng.integers(2, 5)))
        p = rng.uniform(0, 1, size=n)
        k = int(rng.integers(0, min(4, n) + 1))
        a, b = epd(tree, p), epd_by_outcome_enumeration(tree, p)
        if abs(a - b) > 1e-9 * max(abs(b), 1e-300):
            failures["epd-enumeration"] += 1
        res = greedy_protect(tree, p, k)
        _, best = brute_force_protect(tree, p, k)
        got = epd_with_protection(tree, p, res.species)
        if abs(got - best) > 1e-9 * abs(best):
            failures["greedy-bruteforce"] += 1
        if any(x < y for x, y in zip(res.gains, res.gains[1:])):
            failures["greedy-gains"] += 1
    for name, bad in failures.items():
        status = "PASS" if bad == 0 else "FAIL"
        print(f"{status}\t{name}\t{args.instances - bad}/{args.instances}")
    return 0 if not any(failures.values()) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--instances", type=int, default=None)
    common.add_argument("--tree-kind", choices=sorted(_TREE_KINDS), default="nonultrametric")
    common.add_argument("--prob-mode", choices=("per-category", "per-species"), default="per-category")
    common.add_argument("--rho", type=float, default=None)
    common.add_argument("--k", type=int, default=None)
    common.add_argument("--perturb", type=float, default=0.0)
    common.add_argument("--intervals-preset", choices=sorted(INTERVAL_PRESETS), default="table1")
    common.add_argument("--out", default="out")
    common.add_argument("--workers", type=int, default=1)

    parser = argparse.ArgumentParser(prog="epdkit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"epdkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def tree_table(p, optional=False):
        nargs = "?" if optional else None
        p.add_argument("tree", nargs=nargs, help="Newick tree file")
        p.add_argument("table", nargs=nargs, help="species table (species,category or species,p1,p2)")

    p = sub.add_parser("epd", parents=[common], help="expected PD of a tree")
    tree_table(p)
    p.set_defaults(func=cmd_epd)
    p = sub.add_parser("greedy", parents=[common], help="optimal k-species protection set")
    tree_table(p)
    p.set_defaults(func=cmd_greedy)
    p = sub.add_parser("hedge", parents=[common], help="HEDGE score of every species")
    tree_table(p)
    p.set_defaults(func=cmd_hedge)
    p = sub.add_parser("gen", parents=[common], help="write random instances to --out")
    p.set_defaults(func=cmd_gen)
    p = sub.add_parser("experiment", parents=[common], help="two-scenario sensitivity batch")
    tree_table(p, optional=True)
    p.set_defaults(func=cmd_experiment)
    p = sub.add_parser("check", parents=[common], help="oracle checks on small random trees")
    p.set_defaults(func=cmd_check)
    return parser


_DEFAULT_INSTANCES = {"gen": 1, "experiment": 10_000, "check": 200}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.instances is None:
        args.instances = _DEFAULT_INSTANCES.get(args.command, 1)
    try:
        return args.func(args)
    except (CLIError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"epdkit {args.command}: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
