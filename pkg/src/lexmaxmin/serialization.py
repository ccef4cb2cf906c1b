"""JSON instance files.

::

    {"alternatives": ["s", "a", "b"],
     "utilities": [[0, 1, 0], [0, 0, "1/2"]],
     "disagreement": {"s": 1}}

``disagreement`` may also be a full weight list or a bare alternative name.
An optional ``"normalized": true`` is re-verified on load.
"""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import MalformedInstance
from .model import BargainingInstance, Lottery, normalize
from .rational import parse_rational, to_json_rational


def _line_of(text: str, key: str):
    needle = f'"{key}"'
    pos = text.find(needle)
    if pos < 0:
        return None
    return text.count("\n", 0, pos) + 1


def loads(text: str) -> BargainingInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInstance(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    try:
        return from_dict(data)
    except MalformedInstance as exc:
        if exc.line is None and exc.field is not None:
            key = exc.field.split("[")[0]
            raise MalformedInstance(exc.reason, field=exc.field, line=_line_of(text, key)) from None
        raise


def from_dict(data) -> BargainingInstance:
    if not isinstance(data, dict):
        raise MalformedInstance("top level must be a JSON object")
    for key in ("alternatives", "utilities", "disagreement"):
        if key not in data:
            raise MalformedInstance("missing required key", field=key)
    alts = data["alternatives"]
    if not isinstance(alts, list) or not all(isinstance(a, str) for a in alts):
        raise MalformedInstance("must be a list of strings", field="alternatives")
    utils = data["utilities"]
    if not isinstance(utils, list) or not all(isinstance(r, list) for r in utils):
        raise MalformedInstance("must be a list of rows", field="utilities")
    rows = []
    for i, r in enumerate(utils):
        rows.append(tuple(parse_rational(v, field=f"utilities[{i}][{a}]") for a, v in enumerate(r)))

    dis = data["disagreement"]
    if isinstance(dis, str):
        dis = {dis: 1}
    if isinstance(dis, dict):
        weights = [Fraction(0)] * len(alts)
        for name, w in dis.items():
            if name not in alts:
                raise MalformedInstance(f"unknown alternative {name!r}", field="disagreement")
            weights[alts.index(name)] = parse_rational(w, field=f"disagreement[{name}]")
    elif isinstance(dis, list):
        weights = [parse_rational(w, field=f"disagreement[{k}]") for k, w in enumerate(dis)]
    else:
        raise MalformedInstance("must be an object, a list or an alternative name", field="disagreement")
    if len(weights) != len(alts):
        raise MalformedInstance("weight count does not match the alternatives", field="disagreement")
    if any(w < 0 for w in weights):
        raise MalformedInstance("weights must be nonnegative", field="disagreement")
    if sum(weights) != 1:
        raise MalformedInstance(f"weights sum to {sum(weights)}, not exactly 1", field="disagreement")

    inst = BargainingInstance(tuple(alts), tuple(rows), Lottery(tuple(weights)))
    if data.get("normalized"):
        norm = normalize(inst)
        if norm.utilities != inst.utilities:
            raise MalformedInstance("instance is flagged normalized but is not", field="normalized")
        inst = norm
    return inst


def to_dict(instance: BargainingInstance) -> dict:
    dis = {
        name: to_json_rational(w)
        for name, w in zip(instance.alternatives, instance.disagreement.weights)
        if w
    }
    out = {
        "alternatives": list(instance.alternatives),
        "utilities": [[to_json_rational(v) for v in row] for row in instance.utilities],
        "disagreement": dis,
    }
    if instance.normalized:
        out["normalized"] = True
    return out


def dumps(instance: BargainingInstance) -> str:
    # One row per line keeps the files diffable.
    d = to_dict(instance)
    rows = ",\n    ".join(json.dumps(r) for r in d["utilities"])
    parts = [
        f'  "alternatives": {json.dumps(d["alternatives"])}',
        f'  "utilities": [\n    {rows}\n  ]',
        f'  "disagreement": {json.dumps(d["disagreement"])}',
    ]
    if "normalized" in d:
        parts.append('  "normalized": true')
    return "{\n" + ",\n".join(parts) + "\n}\n"


def load(path) -> BargainingInstance:
    return loads(Path(path).read_text())


def save(instance: BargainingInstance, path) -> None:
    Path(path).write_text(dumps(instance))


def shipped(name: str) -> str:
    """Text of a bundled instance file such as ``"example1.json"``."""
    if not name.endswith(".json"):
        name += ".json"
    return resources.files("lexmaxmin.instances").joinpath(name).read_text()


def shipped_names() -> list[str]:
    return sorted(p.name for p in resources.files("lexmaxmin.instances").iterdir() if p.name.endswith(".json"))


def load_shipped(name: str) -> BargainingInstance:
    return loads(shipped(name))


def resolve_path(spec: str) -> BargainingInstance:
    """Load from disk, falling back to a bundled instance of the same name."""
    p = Path(spec)
    if p.exists():
        return load(p)
    name = p.name if p.suffix else p.name + ".json"
    if name in shipped_names():
        return load_shipped(name)
    raise FileNotFoundError(f"no such instance file or bundled instance: {spec}")
