"""``bcenet`` command line.

Exit status: 0 success, 1 an audit or check found violations, 2 usage error,
3 data error, 4 resource guard tripped.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import redirect_stdout
from fractions import Fraction
from io import StringIO
from pathlib import Path

from . import axioms, io, worked_examples, sweep, values
from .games import (
    InconsistencyError,
    PFFGame,
    TUGame,
    WorthFunction,
    embedded_coalitions,
    fmt_rational,
    graph_restrict_pff,
    project_worth,
    subsets,
)
from .netcore import (
    LIMITS,
    Cycle,
    DomainError,
    Network,
    ResourceLimitError,
    check_players,
    components,
    cycles,
    fmt_set,
    remove_players,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_DATA, EXIT_RESOURCE = 0, 1, 2, 3, 4

COMPUTE_RULES = ("bce", "fce", "fce-direct", "myerson", "jw", "ef", "shapley", "pff-value")
AUDIT_RULES = ("bce", "fce", "fce-direct", "jw", "zero", "adversarial")


class UsageError(Exception):
    pass


def _out(args, doc, text: str) -> None:
    sys.stdout.write(io.dumps(doc) if args.format == "json" else text.rstrip("\n") + "\n")


def _need_network(args) -> Network:
    if args.network is None:
        raise UsageError(f"{args.verb}: --network is required here")
    return io.read_network(args.network)


def _same_players(game, g: Network) -> None:
    if game.n != g.n:
        raise io.DataError(f"game has {game.n} players but the network has {g.n}")


def _require(game, kinds: tuple[type, ...], expected: str, what: str):
    if not isinstance(game, kinds):
        raise UsageError(f"{what} needs a {expected} game, got kind {io.game_kind(game)!r}")
    return game


def _audit_rule(name: str, seed: int) -> axioms.RuleUnderTest:
    if name == "adversarial":
        return axioms.adversarial_rule(seed)
    return axioms.RULES[name]


def _split_list(values_: list[str] | None) -> list[str]:
    out = []
    for v in values_ or []:
        out.extend(t.strip() for t in v.split(",") if t.strip())
    return out


# -- verbs -----------------------------------------------------------------------

def cmd_compute(args) -> int:
    game = io.read_game(args.game)
    check_players(game.n)
    rule = args.rule
    if rule == "shapley":
        x = values.shapley(_require(game, (TUGame,), "tu", "shapley"))
    elif rule == "pff-value":
        x = values.pff_value(_require(game, (PFFGame,), "pff", "pff-value"))
    elif rule == "ef":
        x = values.ef_value(_require(game, (PFFGame, WorthFunction), "pff or worth-function", "ef"))
    else:
        g = _need_network(args)
        _same_players(game, g)
        if rule == "myerson":
            x = values.myerson(_require(game, (TUGame,), "tu", "myerson"), g)
        else:
            w = io.as_worth(game)
            fn = {"bce": values.bce, "fce": values.fce_formula, "fce-direct": values.fce_direct,
                  "jw": values.jw_value}[rule]
            x = fn(w, g)
    _out(args, {"rule": rule, "allocation": io.allocation_to_json(x)}, io.allocation_to_text(x))
    return EXIT_OK


def cmd_audit(args) -> int:
    names = _split_list(args.axioms)
    if not names:
        raise UsageError("audit: --axioms must name at least one axiom")
    for a in names:
        if a not in axioms.AXIOMS:
            raise UsageError(f"audit: unknown axiom {a!r}; choose from {', '.join(sorted(axioms.AXIOMS))}")
    rule_names = _split_list(args.rule) or ["bce"]
    for r in rule_names:
        if r not in AUDIT_RULES:
            raise UsageError(f"audit: unknown rule {r!r}; choose from {', '.join(AUDIT_RULES)}")
    game = io.read_game(args.game)
    check_players(game.n)
    w = io.as_worth(game)
    nets = [io.read_network(p) for p in args.network]
    for g in nets:
        _same_players(game, g)
    perms = "all" if args.sample is None else args.sample
    suite = axioms.run_suite([_audit_rule(r, args.seed) for r in rule_names],
                             [(Path(args.game).name, w)], nets, names,
                             expected=lambda rule, axiom: True,
                             permutations=perms, seed=args.seed)
    lines = []
    for rep in suite.reports:
        status = "pass" if rep.passed else f"FAIL ({len(rep.violations)} violations)"
        lines.append(f"{rep.rule} {rep.axiom} on {rep.network}: {status}, {rep.checked} checked")
        for v in rep.violations[: args.max_witnesses]:
            lines.append(f"  players {v.players}: {fmt_rational(v.lhs)} != {fmt_rational(v.rhs)}"
                         + (f" [{v.note}]" if v.note else ""))
    _out(args, {"ok": suite.ok, "reports": suite.to_json()}, "\n".join(lines))
    return EXIT_OK if suite.ok else EXIT_VIOLATION


def _dividend_doc(table: values.DividendTable) -> list[dict]:
    return [
        {"coalition": sorted(C), "partition": [sorted(b) for b in P.blocks],
         "dividend": fmt_rational(table[(C, P)])}
        for C, P in embedded_coalitions(table.n) if table[(C, P)] != 0
    ]


def cmd_dividends(args) -> int:
    game = _require(io.read_game(args.game), (PFFGame,), "pff", "dividends")
    table = values.pff_dividends(game)
    entries = _dividend_doc(table)
    status = EXIT_OK
    if args.verify:
        rebuilt = PFFGame(game.n)
        for (C, P), b in table.nonzero():
            rebuilt = rebuilt + PFFGame.unanimity(C, P).scale(b)
        if rebuilt != game:
            sys.stderr.write("dividends: reconstruction does not reproduce the game\n")
            status = EXIT_VIOLATION
    text = "\n".join(
        f"{fmt_set(e['coalition'])} | {' '.join(fmt_set(b) for b in e['partition'])}: {e['dividend']}"
        for e in entries
    ) or "(no nonzero dividends)"
    _out(args, {"players": game.n, "dividends": entries}, text)
    return status


def _pff_text(doc: dict) -> str:
    return "\n".join(
        f"{fmt_set(e['coalition'])} | {' '.join(fmt_set(b) for b in e['partition'])}: {e['worth']}"
        for e in doc["entries"]
    ) or "(zero game)"


def cmd_restrict(args) -> int:
    game = _require(io.read_game(args.game), (PFFGame,), "pff", "restrict")
    check_players(game.n, LIMITS.pff_players, "restrict")
    g = io.read_network(args.network)
    _same_players(game, g)
    doc = io.game_to_json(graph_restrict_pff(game, g))
    _out(args, doc, _pff_text(doc))
    return EXIT_OK


def cmd_project(args) -> int:
    game = io.read_game(args.game)
    w = io.as_worth(game)
    check_players(w.n)
    g = io.read_network(args.network)
    _same_players(game, g)
    if args.targets:
        targets = [io.read_network(p) for p in args.targets]
    elif args.all_subnetworks:
        if len(g) > LIMITS.links:
            raise ResourceLimitError(f"project: {len(g)} links exceed cap {LIMITS.links}")
        targets = list(g.subnetworks())
    else:
        targets = [remove_players(g, D) for D in subsets(range(1, g.n + 1))]
    seen, ordered = set(), []
    for h in targets:
        _same_players(game, h)
        if h not in seen:
            seen.add(h)
            ordered.append(h)
    wg = project_worth(w, g)
    entries = []
    for h in ordered:
        for C in components(h).blocks:
            entries.append({"component": sorted(C), "network": [list(e) for e in h.links],
                            "worth": fmt_rational(wg(C, h))})
    doc = {"kind": "worth-table", "players": w.n, "entries": entries}
    text = "\n".join(f"{fmt_set(e['component'])} @ {Network(w.n, map(tuple, e['network']))}: {e['worth']}"
                     for e in entries)
    _out(args, doc, text)
    return EXIT_OK


def cmd_oracle(args) -> int:
    game = io.read_game(args.game)
    w = io.as_worth(game)
    check_players(w.n)
    g = io.read_network(args.network)
    _same_players(game, g)
    rep = values.oracle_solve(w, g, args.axiom)
    systems = [
        {"network": [list(e) for e in s.network.links], "component": sorted(s.component),
         "equations": s.equations, "unknowns": s.unknowns, "rank": s.rank,
         "consistent": s.consistent}
        for s in rep.systems
    ]
    doc = {"axiom": rep.axiom, "consistent": rep.consistent, "full_rank": rep.full_rank,
           "allocation": None if rep.allocation is None else io.allocation_to_json(rep.allocation),
           "systems": systems}
    lines = []
    if rep.allocation is not None:
        lines.append(io.allocation_to_text(rep.allocation))
    lines.append(f"systems: {len(rep.systems)}, consistent: {rep.consistent}, full rank: {rep.full_rank}")
    bad = rep.failure
    if bad is not None:
        members = sorted(bad.component)
        offending = [
            {"coefficients": {str(members[k]): c for k, c in enumerate(row) if c},
             "rhs": fmt_rational(Fraction(rhs))}
            for row, rhs in bad.rows
        ]
        doc["offending_equations"] = offending
        lines.append(f"unsolvable system at {bad.network}, component {fmt_set(bad.component)}: "
                     f"rank {bad.rank} of {bad.unknowns}, consistent {bad.consistent}")
        for eq in offending:
            lhs = " + ".join(f"{c}*x{i}" for i, c in eq["coefficients"].items())
            lines.append(f"  {lhs} = {eq['rhs']}")
    _out(args, doc, "\n".join(lines))
    return EXIT_OK if bad is None else EXIT_VIOLATION


def _parse_cycle(text: str) -> Cycle:
    try:
        return Cycle(tuple(int(t) for t in text.split(",")))
    except ValueError as e:
        raise UsageError(f"identity: bad --cycle {text!r}: {e}") from None


def cmd_identity(args) -> int:
    game = io.read_game(args.game)
    w = io.as_worth(game)
    check_players(w.n)
    rule = _audit_rule(args.rule, args.seed)
    if args.exhaustive:
        return _identity_sweep(args, w, rule)
    g = _need_network(args)
    _same_players(game, g)
    if args.cycle:
        cyc = [_parse_cycle(c) for c in args.cycle]
    else:
        if len(g) > LIMITS.links:
            raise ResourceLimitError(f"identity: {len(g)} links exceed cap {LIMITS.links}")
        cyc = list(cycles(g))
    phi = rule.bind(w)
    results = []
    for Z in cyc:
        try:
            results.append(axioms.cycle_sum_check(phi, None, g, Z))
        except DomainError as e:
            raise io.DataError(f"identity: {e}") from None
    ok = all(r.equal for r in results)
    doc = {"rule": rule.name, "equal": ok, "cycles": [
        {"cycle": list(r.cycle.vertices), "lhs": fmt_rational(r.lhs), "rhs": fmt_rational(r.rhs),
         "equal": r.equal} for r in results]}
    text = "\n".join(
        f"{'-'.join(map(str, r.cycle.vertices))}: lhs {fmt_rational(r.lhs)}, rhs {fmt_rational(r.rhs)}, "
        f"{'equal' if r.equal else 'DIFFERENT'}" for r in results
    ) or "(network has no cycles)"
    _out(args, doc, text)
    return EXIT_OK if ok else EXIT_VIOLATION


def _identity_sweep(args, w, rule) -> int:
    n = w.n
    if n > 7:
        raise ResourceLimitError(f"identity --exhaustive: n={n} exceeds cap 7")
    if rule.name in ("fce", "fce-direct"):
        table = sweep.fce_table(w, n)
    else:
        table = sweep.tabulate(rule.bind(w), n)
    res = sweep.cycle_sum_sweep(table, n)
    doc = {"rule": rule.name, "players": n, "cycles_checked": res.cycles_checked,
           "nonzero_lhs": res.nonzero_lhs, "equal": res.all_equal, "backend": res.backend,
           "mismatches": [{"network": [list(e) for e in g.links], "cycle": list(c.vertices),
                           "lhs": fmt_rational(a), "rhs": fmt_rational(b)} for g, c, a, b in res.mismatches]}
    text = (f"{rule.name}: {res.cycles_checked} cycles over {1 << (n * (n - 1) // 2)} networks, "
            f"{res.nonzero_lhs} with nonzero residual sum, "
            f"{'all equal' if res.all_equal else f'{len(res.mismatches)}+ mismatches'} ({res.backend} kernels)")
    _out(args, doc, text)
    return EXIT_OK if res.all_equal else EXIT_VIOLATION


def cmd_examples(args) -> int:
    try:
        worked_examples.write_examples(args.out)
    except OSError as e:
        raise io.DataError(f"examples: cannot write to {args.out}: {e.strerror}") from None
    if not args.verify:
        _out(args, {"directory": str(args.out), "entries": len(worked_examples.manifest())},
             f"wrote {len(worked_examples.manifest())} manifest entries to {args.out}")
        return EXIT_OK
    results = verify_manifest(Path(args.out))
    ok = all(r["met"] for r in results)
    text = "\n".join(f"{'ok  ' if r['met'] else 'FAIL'} {r['id']} ({r['provenance']})" for r in results)
    _out(args, {"ok": ok, "results": results}, text)
    return EXIT_OK if ok else EXIT_VIOLATION


def _run_json(argv: list[str]) -> tuple[int, object]:
    buf = StringIO()
    with redirect_stdout(buf):
        code = main(argv + ["--format", "json"])
    return code, json.loads(buf.getvalue()) if buf.getvalue() else None


def verify_manifest(directory: Path) -> list[dict]:
    """Run every manifest entry through the CLI and compare with its expectation."""
    manifest = io.load_json(directory / "manifest.json")
    results = []
    for e in manifest:
        d = lambda name: str(directory / name)  # noqa: E731
        cmd, exp = e["command"], e["expected"]
        if cmd == "compute":
            code, doc = _run_json(["compute", "--rule", e["rule"], "--game", d(e["game"]),
                                   "--network", d(e["network"])])
            met = code == 0 and doc["allocation"] == exp
        elif cmd == "oracle":
            code, doc = _run_json(["oracle", "--axiom", e["axiom"], "--game", d(e["game"]),
                                   "--network", d(e["network"])])
            met = code == 0 and doc["allocation"] == exp
        elif cmd == "identity":
            code, doc = _run_json(["identity", "--rule", e["rule"], "--game", d(e["game"]),
                                   "--network", d(e["network"])])
            met = code == 0 and doc["equal"] and bool(doc["cycles"])
        elif cmd == "audit":
            argv = ["audit", "--game", d(e["game"]), "--network", d(e["network"]),
                    "--axioms", ",".join(e["axioms"])]
            for r in e["rules"]:
                argv += ["--rule", r]
            code, doc = _run_json(argv)
            pairs = sorted({tuple(sorted(v["players"])) for rep in doc["reports"] for v in rep["violations"]})
            met = code == exp["exit"] and [list(p) for p in pairs] == exp["witness_pairs"]
        elif cmd == "project":
            argv = ["project", "--game", d(e["game"]), "--network", d(e["network"]), "--targets"]
            code, doc = _run_json(argv + [d(t) for t in e["targets"]])
            met = code == 0 and exp in doc["entries"]
        elif cmd == "dividends":
            code, doc = _run_json(["dividends", "--verify", "--game", d(e["game"])])
            met = code == 0 and doc["dividends"] == exp
        elif cmd == "restrict":
            outs = [_run_json(["restrict", "--game", d(e["game"]), "--network", d(n)])
                    for n in e["networks"]]
            met = all(c == 0 for c, _ in outs)
            if exp == "identical":
                met = met and all(o == outs[0][1] for _, o in outs)
            elif exp == "input":
                met = met and outs[0][1] == io.game_to_json(io.read_game(d(e["game"])))
        else:
            met = False
        results.append({"id": e["id"], "provenance": e["provenance"], "met": bool(met)})
    return results


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json"), default="table")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled audits and the adversarial rule")
    common.add_argument("--cap-players", type=int, help="override the player-count resource cap")
    common.add_argument("--cap-links", type=int, help="override the link-count resource cap")

    p = argparse.ArgumentParser(prog="bcenet", description="Allocation rules on networks with externalities.")
    sub = p.add_subparsers(dest="verb", required=True, metavar="VERB")

    c = sub.add_parser("compute", parents=[common], help="payoffs of one rule")
    c.add_argument("--rule", required=True, choices=COMPUTE_RULES)
    c.add_argument("--game", required=True)
    c.add_argument("--network")

    a = sub.add_parser("audit", parents=[common], help="check axioms for rules")
    a.add_argument("--rule", action="append", help=f"repeatable or comma-separated: {', '.join(AUDIT_RULES)}")
    a.add_argument("--axioms", action="append", required=True, help="comma-separated: ce, bc, f, bcplus, sym")
    a.add_argument("--game", required=True)
    a.add_argument("--network", action="append", required=True, help="repeatable")
    a.add_argument("--sample", type=int, help="check this many random permutations instead of all")
    a.add_argument("--max-witnesses", type=int, default=5)

    d = sub.add_parser("dividends", parents=[common], help="unanimity coefficients of a PFF game")
    d.add_argument("--game", required=True)
    d.add_argument("--verify", action="store_true", help="re-sum the basis games and compare")

    r = sub.add_parser("restrict", parents=[common], help="graph-restricted PFF game")
    r.add_argument("--game", required=True)
    r.add_argument("--network", required=True)

    pr = sub.add_parser("project", parents=[common], help="graph-projected worth function")
    pr.add_argument("--game", required=True)
    pr.add_argument("--network", required=True)
    tgt = pr.add_mutually_exclusive_group()
    tgt.add_argument("--targets", nargs="+", help="network files to evaluate at")
    tgt.add_argument("--all-subnetworks", action="store_true", help="every subnetwork of --network")

    o = sub.add_parser("oracle", parents=[common], help="solve the full axiom system exactly")
    o.add_argument("--game", required=True)
    o.add_argument("--network", required=True)
    o.add_argument("--axiom", choices=("bc", "f"), default="bc")

    i = sub.add_parser("identity", parents=[common], help="cycle-sum identity checks")
    i.add_argument("--game", required=True)
    i.add_argument("--rule", default="bce", choices=AUDIT_RULES)
    where = i.add_mutually_exclusive_group()
    where.add_argument("--network")
    where.add_argument("--exhaustive", action="store_true", help="every cycle of every network on the game's players")
    i.add_argument("--cycle", action="append", help="comma-separated players, repeatable; default every cycle")

    e = sub.add_parser("examples", parents=[common], help="write the built-in instances and manifest")
    e.add_argument("--out", required=True)
    e.add_argument("--verify", action="store_true", help="run every manifest entry and compare")
    return p


VERBS = {
    "compute": cmd_compute,
    "audit": cmd_audit,
    "dividends": cmd_dividends,
    "restrict": cmd_restrict,
    "project": cmd_project,
    "oracle": cmd_oracle,
    "identity": cmd_identity,
    "examples": cmd_examples,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    if args.verb == "identity" and args.exhaustive and args.cycle:
        sys.stderr.write("bcenet: usage error: --cycle cannot be combined with --exhaustive\n")
        return EXIT_USAGE
    saved = (LIMITS.players, LIMITS.pff_players, LIMITS.links)
    if args.cap_players is not None:
        LIMITS.players = LIMITS.pff_players = args.cap_players
    if args.cap_links is not None:
        LIMITS.links = args.cap_links
    try:
        return VERBS[args.verb](args)
    except UsageError as e:
        sys.stderr.write(f"bcenet: usage error: {e}\n")
        return EXIT_USAGE
    except ResourceLimitError as e:
        sys.stderr.write(f"bcenet: resource guard: {e}\n")
        return EXIT_RESOURCE
    except (io.DataError, InconsistencyError, DomainError) as e:
        sys.stderr.write(f"bcenet: data error: {e}\n")
        return EXIT_DATA
    finally:
        LIMITS.players, LIMITS.pff_players, LIMITS.links = saved


if __name__ == "__main__":
    sys.exit(main())
