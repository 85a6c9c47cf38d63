"""File formats.

Network text format (canonical)::

    n
    i j c        # 0-based, i <= j, c > 0; diagonal c is twice the self-loops

Pairs not listed are zero. A dense comma-separated matrix is accepted on
input. Labels, parameters, experiment configs and selection reports are
JSON; floats are written with Python's shortest round-trip repr.
"""
from __future__ import annotations

import dataclasses
import io
import json
import os
from pathlib import Path

import numpy as np

from .core import Labels, ModelParams, Network, NetworkError


class FormatError(ValueError):
    """Malformed input file; the message names the offending line or field."""


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return Path(source).read_text()
    if hasattr(source, "read"):
        return source.read()
    raise TypeError(f"cannot read from {type(source).__name__}")


def _write_text(dest, text: str) -> None:
    if isinstance(dest, (str, os.PathLike)):
        Path(dest).write_text(text)
    else:
        dest.write(text)


def format_network(x: Network) -> str:
    lines = [str(x.n)]
    iu, ju = np.triu_indices(x.n)
    for i, j in zip(iu, ju):
        c = x.counts[i, j]
        if c:
            lines.append(f"{i} {j} {c}")
    return "\n".join(lines) + "\n"


def write_network(dest, x: Network) -> None:
    _write_text(dest, format_network(x))


def parse_network(text: str) -> Network:
    lines = [(no, ln.split("#", 1)[0].strip()) for no, ln in enumerate(text.splitlines(), 1)]
    lines = [(no, ln) for no, ln in lines if ln]
    if not lines:
        raise FormatError("empty network file")
    first_no, first = lines[0]
    if "," in first:
        return _parse_dense(lines)
    try:
        n = int(first)
    except ValueError:
        raise FormatError(f"line {first_no}: expected node count, got {first!r}") from None
    if n < 1:
        raise FormatError(f"line {first_no}: node count must be >= 1")
    x = np.zeros((n, n), dtype=np.int64)
    seen = set()
    for no, ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise FormatError(f"line {no}: expected 'i j count', got {ln!r}")
        try:
            i, j, c = (int(p) for p in parts)
        except ValueError:
            raise FormatError(f"line {no}: non-integer field in {ln!r}") from None
        if not (0 <= i < n and 0 <= j < n):
            raise FormatError(f"line {no}: node index out of range [0, {n})")
        if i > j:
            raise FormatError(f"line {no}: asymmetric entry ({i}, {j}); write pairs with i <= j")
        if c < 0:
            raise FormatError(f"line {no}: negative count {c}")
        if i == j and c % 2:
            raise FormatError(f"line {no}: diagonal count {c} must be even (twice the self-loops)")
        if (i, j) in seen:
            raise FormatError(f"line {no}: duplicate pair ({i}, {j})")
        seen.add((i, j))
        x[i, j] = x[j, i] = c
    return Network(x)


def _parse_dense(lines) -> Network:
    rows = []
    for no, ln in lines:
        try:
            rows.append([int(v) for v in ln.split(",")])
        except ValueError:
            raise FormatError(f"line {no}: non-integer entry in {ln!r}") from None
        if len(rows[-1]) != len(rows[0]):
            raise FormatError(f"line {no}: row has {len(rows[-1])} entries, expected {len(rows[0])}")
    x = np.array(rows, dtype=np.int64)
    if x.shape[0] != x.shape[1]:
        raise FormatError(f"dense matrix is {x.shape[0]}x{x.shape[1]}, not square")
    bad = np.argwhere(x != x.T)
    if bad.size:
        i, j = bad[0]
        raise FormatError(f"line {lines[i][0]}: asymmetric entry ({i}, {j}) = {x[i, j]} vs {x[j, i]}")
    try:
        return Network(x)
    except NetworkError as err:
        raise FormatError(str(err)) from None


def read_network(source) -> Network:
    return parse_network(_open_text(source))


# JSON -----------------------------------------------------------------------

def _to_jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_to_jsonable(obj), indent=2, allow_nan=True) + "\n"


def _require(d: dict, key: str, what: str):
    if key not in d:
        raise FormatError(f"{what}: missing field {key!r}")
    return d[key]


def labels_from_dict(d: dict) -> Labels:
    return Labels(np.asarray(_require(d, "z", "labels"), dtype=np.int64), _require(d, "k", "labels"))


def params_from_dict(d: dict) -> ModelParams:
    pi = _require(d, "pi", "params")
    lam = _require(d, "lambda_tilde", "params")
    w = d.get("weights")
    try:
        return ModelParams(pi=np.asarray(pi, float), lambda_tilde=np.asarray(lam, float),
                           rho=d.get("rho", 1.0), weights=None if w is None else np.asarray(w, float))
    except ValueError as err:
        raise FormatError(f"params: {err}") from None


def report_from_dict(d: dict):
    from .selection import ScoreRow, SelectionReport

    rows = [ScoreRow(**r) for r in _require(d, "rows", "report")]
    return SelectionReport(n=d["n"], backend=d["backend"], rows=rows, k_hat=d["k_hat"],
                           ties=list(d.get("ties", [])), warnings=list(d.get("warnings", [])))


def config_from_dict(d: dict):
    from .experiment import ExperimentConfig

    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(d) - known
    if unknown:
        raise FormatError(f"experiment config: unknown field(s) {sorted(unknown)}")
    return ExperimentConfig(**d)


def save_json(dest, obj) -> None:
    _write_text(dest, dumps(obj))


def load_json(source, kind: str):
    """Read a JSON file as ``kind`` in {'labels', 'params', 'report', 'config'}."""
    text = _open_text(source)
    try:
        d = json.loads(text)
    except json.JSONDecodeError as err:
        raise FormatError(f"line {err.lineno}: invalid JSON ({err.msg})") from None
    loaders = {
        "labels": labels_from_dict,
        "params": params_from_dict,
        "report": report_from_dict,
        "config": config_from_dict,
    }
    if kind not in loaders:
        raise ValueError(f"unknown kind {kind!r}")
    return loaders[kind](d)


def roundtrip(obj, path=None):
    """Write ``obj`` and read it back (through ``path`` if given, else in memory)."""
    from .experiment import ExperimentConfig
    from .selection import SelectionReport

    if isinstance(obj, Network):
        text = format_network(obj)
        reader = parse_network
    else:
        kind = {Labels: "labels", ModelParams: "params",
                SelectionReport: "report", ExperimentConfig: "config"}[type(obj)]
        text = dumps(obj)
        reader = lambda t: load_json(io.StringIO(t), kind)  # noqa: E731
    if path is not None:
        _write_text(path, text)
        text = _open_text(path)
    return reader(text)
