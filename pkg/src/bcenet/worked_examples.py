"""Built-in worked instances and the outputs they are known to produce.

Each manifest entry names a CLI invocation (relative file names), the expected
result, and a provenance string saying which figure or example it reproduces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .games import LinkedBeneficiary, PFFGame, TUGame
from .io import dumps, game_to_json, network_to_json
from .netcore import Network, Partition


@dataclass(frozen=True)
class Instance:
    key: str
    game: object
    networks: dict[str, Network] = field(default_factory=dict)


def _net(n, *links) -> Network:
    return Network(n, links)


def instances() -> list[Instance]:
    same_component = LinkedBeneficiary(3, 3, (1, 2))
    return [
        Instance("fig1", same_component, {
            "g": _net(3, (1, 2)),
            "g-prime": _net(3, (1, 2), (1, 3)),
            "empty": _net(3),
        }),
        Instance("triangle", LinkedBeneficiary(3, 3, (1, 2)), {
            "g": _net(3, (1, 2), (2, 3), (1, 3)),
        }),
        Instance("fig3", LinkedBeneficiary(4, 3, (1, 2)), {
            "g": _net(4, (1, 2), (1, 4), (3, 4)),
            "g-minus-3": _net(4, (1, 2), (1, 4)),
            "g-minus-1": _net(4, (3, 4)),
        }),
        Instance("fig4", LinkedBeneficiary(3, 3, (1, 2), requires="link"), {
            "g": _net(3, (1, 2)),
            "g-prime": _net(3, (1, 2), (1, 3)),
            "h": _net(3, (1, 3), (2, 3)),
        }),
        Instance("fig5", PFFGame.unanimity([3], Partition.of(3, [[1, 2], [3]])), {
            "g": _net(3, (1, 2)),
            "g-prime": _net(3, (1, 2), (1, 3)),
            "complete": Network.complete(3),
        }),
        Instance("tu-pair", TUGame(3, {(1, 2): 1, (1, 2, 3): 2}), {
            "path": _net(3, (1, 2), (2, 3)),
        }),
    ]


def _alloc(*xs) -> dict[str, str]:
    return {str(i): x for i, x in enumerate(xs, start=1)}


THIRDS = _alloc("1/3", "1/3", "1/3")
TO_THREE = _alloc("0", "0", "1")


def manifest() -> list[dict]:
    """Expected outputs; file names follow ``<key>.game.json`` / ``<key>.<net>.json``."""
    entries = []

    def compute(eid, prov, key, net, rule, expected):
        entries.append({
            "id": eid, "provenance": prov, "command": "compute",
            "game": f"{key}.game.json", "network": f"{key}.{net}.json",
            "rule": rule, "expected": expected,
        })

    prov1 = "Figure 1: dollar to player 3 when 1 and 2 are linked"
    compute("fig1-bce-g", prov1, "fig1", "g", "bce", TO_THREE)
    compute("fig1-bce-g-prime", prov1, "fig1", "g-prime", "bce", THIRDS)
    compute("fig1-fce-g-prime", prov1, "fig1", "g-prime", "fce", TO_THREE)
    compute("fig1-fce-direct-g-prime", prov1, "fig1", "g-prime", "fce-direct", TO_THREE)
    compute("fig1-bce-empty", prov1 + ", empty network", "fig1", "empty", "bce", _alloc("0", "0", "0"))
    entries.append({
        "id": "fig1-oracle-bc", "provenance": prov1, "command": "oracle",
        "game": "fig1.game.json", "network": "fig1.g-prime.json", "axiom": "bc",
        "expected": THIRDS,
    })
    entries.append({
        "id": "fig1-oracle-f", "provenance": prov1, "command": "oracle",
        "game": "fig1.game.json", "network": "fig1.g-prime.json", "axiom": "f",
        "expected": TO_THREE,
    })
    prov3 = "Example 3: BCE and FCE differ at g = {{1,2},{1,3}}"
    compute("ex3-bce", prov3, "fig1", "g-prime", "bce", THIRDS)
    compute("ex3-fce", prov3, "fig1", "g-prime", "fce", TO_THREE)
    entries.append({
        "id": "ex1-triangle-identity", "provenance": "Example 1: three-player cycle",
        "command": "identity", "game": "triangle.game.json", "network": "triangle.g.json",
        "rule": "bce", "expected": "equal",
    })
    prov_f3 = "Figure 3 / Example 2: pair-wise balanced contributions fails for {1,3}"
    compute("fig3-bce-g", prov_f3, "fig3", "g", "bce", _alloc("0", "0", "1", "0"))
    compute("fig3-bce-g-minus-3", prov_f3, "fig3", "g-minus-3", "bce", _alloc("0", "0", "1", "0"))
    compute("fig3-bce-g-minus-1", prov_f3, "fig3", "g-minus-1", "bce", _alloc("0", "0", "0", "0"))
    entries.append({
        "id": "fig3-audit-bcplus", "provenance": prov_f3, "command": "audit",
        "game": "fig3.game.json", "network": "fig3.g.json", "rules": ["bce"],
        "axioms": ["bcplus"], "expected": {"exit": 1, "witness_pairs": [[1, 3], [2, 3]]},
    })
    entries.append({
        "id": "fig3-audit-ce-bc-sym", "provenance": prov_f3, "command": "audit",
        "game": "fig3.game.json", "network": "fig3.g.json", "rules": ["bce"],
        "axioms": ["ce", "bc", "sym"], "expected": {"exit": 0, "witness_pairs": []},
    })
    prov4 = "Figure 4 / Example 4: projection by g = {{1,2}} evaluated at h = {{1,3},{2,3}}"
    entries.append({
        "id": "fig4-project", "provenance": prov4, "command": "project",
        "game": "fig4.game.json", "network": "fig4.g.json", "targets": ["fig4.h.json"],
        "expected": {"component": [1, 2, 3], "network": [[1, 3], [2, 3]], "worth": "1"},
    })
    prov4b = "Figure 4 / Example 5 footnote: the link-checking worth function of Example 4"
    compute("fig4-bce-g", prov4b, "fig4", "g", "bce", TO_THREE)
    compute("fig4-bce-g-prime", prov4b, "fig4", "g-prime", "bce", THIRDS)
    compute("fig4-fce-g", prov4b, "fig4", "g", "fce", TO_THREE)
    compute("fig4-fce-g-prime", prov4b, "fig4", "g-prime", "fce", TO_THREE)
    prov5 = "Figure 5 / Example 5: v^g = v^g' yet BCE differs"
    compute("fig5-bce-g", prov5, "fig5", "g", "bce", TO_THREE)
    compute("fig5-bce-g-prime", prov5, "fig5", "g-prime", "bce", THIRDS)
    compute("fig5-fce-g", prov5, "fig5", "g", "fce", TO_THREE)
    compute("fig5-fce-g-prime", prov5, "fig5", "g-prime", "fce", TO_THREE)
    compute("fig5-pff-value", prov5 + ", value of the unanimity game", "fig5", "g", "pff-value", TO_THREE)
    entries.append({
        "id": "fig5-dividends", "provenance": prov5, "command": "dividends",
        "game": "fig5.game.json",
        "expected": [{"coalition": [3], "partition": [[1, 2], [3]], "dividend": "1"}],
    })
    entries.append({
        "id": "fig5-restrict-equal", "provenance": prov5, "command": "restrict",
        "game": "fig5.game.json", "networks": ["fig5.g.json", "fig5.g-prime.json"],
        "expected": "identical",
    })
    entries.append({
        "id": "fig5-restrict-complete", "provenance": prov5 + ", restriction by the complete network",
        "command": "restrict", "game": "fig5.game.json", "networks": ["fig5.complete.json"],
        "expected": "input",
    })
    prov_tu = "TU worths: BCE coincides with the Myerson value"
    compute("tu-bce", prov_tu, "tu-pair", "path", "bce", _alloc("5/6", "5/6", "1/3"))
    compute("tu-myerson", prov_tu, "tu-pair", "path", "myerson", _alloc("5/6", "5/6", "1/3"))
    return entries


def write_examples(directory: str | Path) -> list[Path]:
    """Write every instance and ``manifest.json``; returns the paths written.

    Re-running overwrites with identical bytes.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for inst in instances():
        p = out / f"{inst.key}.game.json"
        p.write_text(dumps(game_to_json(inst.game)), encoding="utf-8")
        written.append(p)
        for name, g in inst.networks.items():
            p = out / f"{inst.key}.{name}.json"
            p.write_text(dumps(network_to_json(g)), encoding="utf-8")
            written.append(p)
    p = out / "manifest.json"
    p.write_text(dumps(manifest()), encoding="utf-8")
    written.append(p)
    return written
