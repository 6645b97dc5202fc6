"""JSON readers and writers for networks, games and allocations.

Writers emit canonical order so identical objects serialize byte-identically.
Rationals are written as strings: ``"p/q"`` in lowest terms, or ``"p"`` when
the denominator is 1.  Readers also accept bare JSON integers.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .games import (
    Allocation,
    LinkedBeneficiary,
    PFFGame,
    PFFWorth,
    TableWorth,
    TUGame,
    TUWorth,
    WorthFunction,
    embedded_coalitions,
    fmt_rational,
    to_rational,
)
from .netcore import DomainError, Network, Partition, components, fmt_set, is_component


class DataError(ValueError):
    """Malformed input document; the message names the offending field."""


def _rational(x, where: str) -> Fraction:
    if isinstance(x, float):
        raise DataError(f"{where}: floats are not allowed, write {x!r} as \"p/q\"")
    try:
        return to_rational(x)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise DataError(f"{where}: {e}") from None


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise DataError(f"{where}: expected an integer, got {x!r}")
    return x


def _players(doc: dict, where: str = "players") -> int:
    if "players" not in doc:
        raise DataError(f"missing field {where!r}")
    n = _int(doc["players"], where)
    if n < 1:
        raise DataError(f"{where}: must be >= 1, got {n}")
    return n


def _subset(x, n: int, where: str) -> frozenset[int]:
    if not isinstance(x, list):
        raise DataError(f"{where}: expected a list of players")
    out = []
    for k, i in enumerate(x):
        i = _int(i, f"{where}[{k}]")
        if not 1 <= i <= n:
            raise DataError(f"{where}[{k}]: player {i} outside 1..{n}")
        out.append(i)
    if len(set(out)) != len(out):
        raise DataError(f"{where}: repeated player")
    return frozenset(out)


def _links(x, n: int, where: str) -> Network:
    if not isinstance(x, list):
        raise DataError(f"{where}: expected a list of [i, j] pairs")
    seen: dict[tuple[int, int], int] = {}
    for k, link in enumerate(x):
        loc = f"{where}[{k}]"
        if not (isinstance(link, list) and len(link) == 2):
            raise DataError(f"{loc}: expected [i, j]")
        i, j = _int(link[0], f"{loc}[0]"), _int(link[1], f"{loc}[1]")
        if i == j:
            raise DataError(f"{loc}: self-loop at player {i}")
        for side, p in ((0, i), (1, j)):
            if not 1 <= p <= n:
                raise DataError(f"{loc}[{side}]: player {p} outside 1..{n}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DataError(f"{loc}: duplicate of {where}[{seen[key]}] (link {{{key[0]},{key[1]}}})")
        seen[key] = k
    return Network(n, seen)


def network_from_json(doc: dict) -> Network:
    if not isinstance(doc, dict):
        raise DataError("network document must be a JSON object")
    n = _players(doc)
    return _links(doc.get("links", []), n, "links")


def network_to_json(g: Network) -> dict:
    return {"players": g.n, "links": [list(e) for e in g.links]}


def _partition(x, n: int, where: str) -> Partition:
    if not isinstance(x, list):
        raise DataError(f"{where}: expected a list of blocks")
    blocks = [_subset(b, n, f"{where}[{k}]") for k, b in enumerate(x)]
    try:
        return Partition.of(n, blocks)
    except DomainError as e:
        raise DataError(f"{where}: {e}") from None


def _entries(doc: dict) -> list[dict]:
    entries = doc.get("entries", [])
    if not isinstance(entries, list):
        raise DataError("entries: expected a list of objects")
    for k, e in enumerate(entries):
        if not isinstance(e, dict):
            raise DataError(f"entries[{k}]: expected an object")
    return entries


def game_from_json(doc: dict):
    """Parse a game document into a TUGame, PFFGame or WorthFunction."""
    if not isinstance(doc, dict):
        raise DataError("game document must be a JSON object")
    kind = doc.get("kind")
    n = _players(doc)
    if kind == "tu":
        worths = doc.get("worths", {})
        if not isinstance(worths, dict):
            raise DataError("worths: expected an object keyed by \"i,j,...\"")
        table = {}
        for key, x in worths.items():
            where = f"worths[{key!r}]"
            try:
                members = [int(t) for t in key.split(",")] if key.strip() else []
            except ValueError:
                raise DataError(f"{where}: key must be comma-joined player numbers") from None
            S = _subset(members, n, where)
            table[S] = _rational(x, where)
        try:
            return TUGame(n, table)
        except DomainError as e:
            raise DataError(str(e)) from None
    if kind == "pff":
        entries = {}
        for k, e in enumerate(_entries(doc)):
            where = f"entries[{k}]"
            C = _subset(e.get("coalition"), n, f"{where}.coalition")
            P = _partition(e.get("partition"), n, f"{where}.partition")
            if C not in P.blocks:
                raise DataError(f"{where}: coalition {fmt_set(C)} is not a block of the partition")
            if (C, P) in entries:
                raise DataError(f"{where}: repeats an earlier embedded coalition")
            entries[(C, P)] = _rational(e.get("worth"), f"{where}.worth")
        return PFFGame(n, entries)
    if kind == "worth-table":
        entries = {}
        for k, e in enumerate(_entries(doc)):
            where = f"entries[{k}]"
            C = _subset(e.get("component"), n, f"{where}.component")
            g = _links(e.get("network", []), n, f"{where}.network")
            if not is_component(C, g):
                raise DataError(
                    f"{where}: {fmt_set(C)} is not a component of the network "
                    f"(components: {' '.join(fmt_set(b) for b in components(g))})"
                )
            if (C, g) in entries:
                raise DataError(f"{where}: repeats an earlier (component, network) pair")
            entries[(C, g)] = _rational(e.get("worth"), f"{where}.worth")
        return TableWorth(n, entries)
    if kind == "linked-beneficiary":
        b = _int(doc.get("beneficiary"), "beneficiary")
        pair = doc.get("pair")
        if not (isinstance(pair, list) and len(pair) == 2):
            raise DataError("pair: expected [i, j]")
        requires = doc.get("requires", "component")
        try:
            return LinkedBeneficiary(n, b, (_int(pair[0], "pair[0]"), _int(pair[1], "pair[1]")), requires)
        except (DomainError, ValueError) as e:
            raise DataError(str(e)) from None
    raise DataError(f"kind: unknown game kind {kind!r} (tu, pff, worth-table, linked-beneficiary)")


def game_kind(game) -> str:
    if isinstance(game, TUGame):
        return "tu"
    if isinstance(game, PFFGame):
        return "pff"
    if isinstance(game, LinkedBeneficiary):
        return "linked-beneficiary"
    if isinstance(game, TableWorth):
        return "worth-table"
    return type(game).__name__


def as_worth(game) -> WorthFunction:
    if isinstance(game, TUGame):
        return TUWorth(game)
    if isinstance(game, PFFGame):
        return PFFWorth(game)
    if isinstance(game, WorthFunction):
        return game
    raise TypeError(f"cannot use {type(game).__name__} as a worth function")


def _canon_subset(S) -> list[int]:
    return sorted(S)


def game_to_json(game) -> dict:
    if isinstance(game, TUGame):
        keys = sorted(game.worths, key=lambda S: (len(S), sorted(S)))
        return {
            "kind": "tu",
            "players": game.n,
            "worths": {",".join(map(str, sorted(S))): fmt_rational(game.worths[S]) for S in keys},
        }
    if isinstance(game, PFFGame):
        return {
            "kind": "pff",
            "players": game.n,
            "entries": [
                {
                    "coalition": _canon_subset(C),
                    "partition": [_canon_subset(b) for b in P.blocks],
                    "worth": fmt_rational(game.worths[(C, P)]),
                }
                for C, P in embedded_coalitions(game.n)
                if (C, P) in game.worths
            ],
        }
    if isinstance(game, LinkedBeneficiary):
        doc = {
            "kind": "linked-beneficiary",
            "players": game.n,
            "beneficiary": game.beneficiary,
            "pair": list(game.pair),
        }
        if game.requires != "component":
            doc["requires"] = game.requires
        return doc
    if isinstance(game, TableWorth):
        keys = sorted(game.entries, key=lambda k: (k[1].mask, sorted(k[0])))
        return {
            "kind": "worth-table",
            "players": game.n,
            "entries": [
                {
                    "component": _canon_subset(C),
                    "network": [list(e) for e in g.links],
                    "worth": fmt_rational(game.entries[(C, g)]),
                }
                for C, g in keys
            ],
        }
    raise TypeError(f"no file format for {type(game).__name__}")


def allocation_to_json(x: Allocation) -> dict[str, str]:
    return {str(i): fmt_rational(p) for i, p in enumerate(x, start=1)}


def allocation_to_text(x: Allocation) -> str:
    return ", ".join(f"{i}: {fmt_rational(p)}" for i, p in enumerate(x, start=1))


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def load_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(f"{path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None


def read_network(path: str | Path) -> Network:
    try:
        return network_from_json(load_json(path))
    except DataError as e:
        raise DataError(f"{path}: {e}") from None


def read_game(path: str | Path):
    try:
        return game_from_json(load_json(path))
    except DataError as e:
        raise DataError(f"{path}: {e}") from None
