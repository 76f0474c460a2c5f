"""File formats: model documents, graph edge lists, CSV tables.

Models are stored as JSON; floats survive the round trip bit-exactly because
both directions go through Python's repr-based float formatting. CSV output
is deterministic: fixed column order, repr-formatted floats, semicolon-joined
node sets, 0/1 booleans.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

from .graphs import Dag, Digraph
from .mixture import MixtureModel, NodeMechanism

__all__ = [
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
    "format_edge_list",
    "parse_edge_list",
    "csv_value",
    "write_csv",
]

MODEL_FORMAT = "cadim-model"
MODEL_VERSION = 1


def model_to_dict(model: MixtureModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "n": model.n,
        "k": model.k,
        "mixing": list(model.mixing),
        "generator_seed": model.generator_seed,
        "intervention_means": list(model.intervention_means),
        "intervention_vars": list(model.intervention_vars),
        "components": [
            {
                "edges": sorted([u, v] for u, v in dag.edges),
                "mechanisms": [
                    {
                        "parents": list(mech.parents),
                        "weights": list(mech.weights),
                        "noise_mean": mech.noise_mean,
                        "noise_var": mech.noise_var,
                    }
                    for mech in mechs
                ],
            }
            for dag, mechs in zip(model.dags, model.mechanisms)
        ],
    }


def model_from_dict(doc: dict) -> MixtureModel:
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a {MODEL_FORMAT} document")
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {doc.get('version')}")
    n = doc["n"]
    dags = []
    mechanisms = []
    for comp in doc["components"]:
        dags.append(Dag(n, ((u, v) for u, v in comp["edges"])))
        mechanisms.append(
            tuple(
                NodeMechanism(
                    parents=tuple(m["parents"]),
                    weights=tuple(m["weights"]),
                    noise_mean=m["noise_mean"],
                    noise_var=m["noise_var"],
                )
                for m in comp["mechanisms"]
            )
        )
    return MixtureModel(
        dags=tuple(dags),
        mechanisms=tuple(mechanisms),
        intervention_means=tuple(doc["intervention_means"]),
        intervention_vars=tuple(doc["intervention_vars"]),
        mixing=tuple(doc["mixing"]),
        generator_seed=doc.get("generator_seed"),
    )


def save_model(model: MixtureModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2, sort_keys=True))


def load_model(path: str | Path) -> MixtureModel:
    return model_from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# edge-list exchange format: header "n=<count>", then one "u v" line per edge


def format_edge_list(g: Digraph) -> str:
    lines = [f"n={g.n}"]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Digraph:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("edge-list text must start with an 'n=<count>' header")
    n = int(lines[0][2:])
    edges = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"malformed edge line: {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Digraph(n, edges)


# ---------------------------------------------------------------------------
# CSV


def csv_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (frozenset, set, tuple, list)):
        return ";".join(str(v) for v in sorted(value))
    if value is None:
        return ""
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([csv_value(v) for v in row])
