"""Instance files (JSON) and dataset files (tab-separated text).

Instance file layout::

    {
      "schema": {"sv": [{"name": "Gender", "domain": ["Male", "Female"]}],
                 "mv": [{"name": "Groups", "domain": ["g1", "g2"]}]},
      "sv_constraints": [{"attr": "Gender", "item": "Male", "lo": 4, "hi": 6}, ...],
      "mv_constraints": [{"attr": "Groups", "items": ["g1", "g2"], "lo": 1, "hi": 2}],
      "ms_constraints": [{"select": [{"attr": "Gender", "item": "Male"},
                                     {"attr": "Groups", "items": ["g1"], "op": "subset"}],
                          "lo": 0, "hi": 3}],
      "dup_constraints": [{"select": [...], "cap": 2}],
      "sigma_prime": 1,           # or null for no infrequency rows
      "size": 10,
      "options": {"time_limit_s": null, "border_cap": 10000,
                  "arithmetic": "rational", "oracle_cap": 65536}
    }
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .border import DEFAULT_BORDER_CAP
from .driver import DEFAULT_ORACLE_CAP
from .errors import ParseError, SchemaMismatch, ValidationError
from .model import (
    EQUAL,
    ConstraintInstance,
    Dataset,
    DuplicateConstraint,
    MVSelection,
    Schema,
    SelectionList,
    SUBSET,
    SupportConstraint,
    SVSelection,
)
from .simplex import FLOAT, RATIONAL

DATASET_HEADER = "#msifm-dataset v1"

_TOP_KEYS = {"schema", "sv_constraints", "mv_constraints", "ms_constraints",
             "dup_constraints", "sigma_prime", "size", "options"}
_REQUIRED_TOP = {"schema", "sv_constraints", "size"}
_OPTION_DEFAULTS = {
    "time_limit_s": None,
    "border_cap": DEFAULT_BORDER_CAP,
    "arithmetic": RATIONAL,
    "oracle_cap": DEFAULT_ORACLE_CAP,
}


@dataclass(frozen=True)
class InstanceFile:
    instance: ConstraintInstance
    options: dict = field(default_factory=lambda: dict(_OPTION_DEFAULTS))


def _fail(path: str, msg: str):
    raise ParseError(f"{path}: {msg}")


def _obj(node, path, allowed, required=()):
    if not isinstance(node, dict):
        _fail(path, f"expected an object, got {type(node).__name__}")
    unknown = sorted(set(node) - set(allowed))
    if unknown:
        _fail(f"{path}.{unknown[0]}", "unknown key")
    for key in required:
        if key not in node:
            _fail(f"{path}.{key}", "missing required key")
    return node


def _list(node, path):
    if not isinstance(node, list):
        _fail(path, f"expected a list, got {type(node).__name__}")
    return node


def _int(node, path, allow_none=False):
    if node is None and allow_none:
        return None
    if not isinstance(node, int) or isinstance(node, bool):
        _fail(path, f"expected an integer, got {node!r}")
    return node


def _str_list(node, path):
    out = _list(node, path)
    for k, v in enumerate(out):
        if not isinstance(v, str):
            _fail(f"{path}[{k}]", f"expected a string, got {v!r}")
    return out


def _schema(node, path) -> Schema:
    _obj(node, path, {"sv", "mv"})
    parts = {}
    for kind in ("sv", "mv"):
        attrs = []
        for k, a in enumerate(_list(node.get(kind, []), f"{path}.{kind}")):
            p = f"{path}.{kind}[{k}]"
            _obj(a, p, {"name", "domain"}, ("name", "domain"))
            attrs.append((a["name"], _str_list(a["domain"], f"{p}.domain")))
        parts[kind] = attrs
    try:
        return Schema(sv=parts["sv"], mv=parts["mv"])
    except (ValidationError, SchemaMismatch) as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _selection_entry(node, path):
    if isinstance(node, dict) and "item" in node:
        _obj(node, path, {"attr", "item"}, ("attr", "item"))
        return SVSelection(node["attr"], node["item"])
    _obj(node, path, {"attr", "items", "op"}, ("attr", "items"))
    op = node.get("op", SUBSET)
    if op not in (SUBSET, EQUAL):
        _fail(f"{path}.op", f"expected 'subset' or 'equal', got {op!r}")
    return MVSelection(node["attr"], frozenset(_str_list(node["items"], f"{path}.items")), op)


def _selection(schema, node, path) -> SelectionList:
    entries = [_selection_entry(e, f"{path}[{k}]") for k, e in enumerate(_list(node, path))]
    try:
        return SelectionList(schema, entries)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _checked(path, build):
    try:
        return build()
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def instance_from_dict(doc: Any) -> InstanceFile:
    """Validate a decoded JSON document and build the instance it describes."""
    _obj(doc, "$", _TOP_KEYS, sorted(_REQUIRED_TOP))
    schema = _schema(doc["schema"], "$.schema")

    sv = []
    for k, c in enumerate(_list(doc["sv_constraints"], "$.sv_constraints")):
        p = f"$.sv_constraints[{k}]"
        _obj(c, p, {"attr", "item", "lo", "hi"}, ("attr", "item", "lo", "hi"))
        sel = _checked(p, lambda: SelectionList(schema, [SVSelection(c["attr"], c["item"])]))
        sv.append(_checked(p, lambda: SupportConstraint(sel, _int(c["lo"], f"{p}.lo"), _int(c["hi"], f"{p}.hi"))))

    mv = []
    for k, c in enumerate(_list(doc.get("mv_constraints", []), "$.mv_constraints")):
        p = f"$.mv_constraints[{k}]"
        _obj(c, p, {"attr", "items", "lo", "hi"}, ("attr", "items", "lo", "hi"))
        items = frozenset(_str_list(c["items"], f"{p}.items"))
        sel = _checked(p, lambda: SelectionList(schema, [MVSelection(c["attr"], items, SUBSET)]))
        mv.append(_checked(p, lambda: SupportConstraint(sel, _int(c["lo"], f"{p}.lo"), _int(c["hi"], f"{p}.hi"))))

    ms = []
    for k, c in enumerate(_list(doc.get("ms_constraints", []), "$.ms_constraints")):
        p = f"$.ms_constraints[{k}]"
        _obj(c, p, {"select", "lo", "hi"}, ("select", "lo", "hi"))
        sel = _selection(schema, c["select"], f"{p}.select")
        ms.append(_checked(p, lambda: SupportConstraint(sel, _int(c["lo"], f"{p}.lo"), _int(c["hi"], f"{p}.hi"))))

    dups = []
    for k, c in enumerate(_list(doc.get("dup_constraints", []), "$.dup_constraints")):
        p = f"$.dup_constraints[{k}]"
        _obj(c, p, {"select", "cap"}, ("select", "cap"))
        sel = _selection(schema, c["select"], f"{p}.select")
        dups.append(_checked(p, lambda: DuplicateConstraint(sel, _int(c["cap"], f"{p}.cap"))))

    sigma = _int(doc.get("sigma_prime"), "$.sigma_prime", allow_none=True)
    size = _int(doc["size"], "$.size")
    inst = _checked("$", lambda: ConstraintInstance(schema, sv, mv, ms, dups, sigma, size))

    options = dict(_OPTION_DEFAULTS)
    raw = _obj(doc.get("options", {}), "$.options", set(_OPTION_DEFAULTS))
    for key, value in raw.items():
        p = f"$.options.{key}"
        if key == "arithmetic":
            if value not in (RATIONAL, FLOAT):
                _fail(p, f"expected 'rational' or 'float', got {value!r}")
        elif key == "time_limit_s":
            if value is not None and (isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0):
                _fail(p, f"expected a non-negative number or null, got {value!r}")
        else:
            value = _int(value, p, allow_none=(key == "border_cap"))
        options[key] = value
    return InstanceFile(inst, options)


def read_instance_file(path: str | os.PathLike) -> InstanceFile:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return instance_from_dict(doc)


def parse_instance(path: str | os.PathLike) -> ConstraintInstance:
    return read_instance_file(path).instance


def _selection_doc(sel: SelectionList) -> list:
    out = []
    schema = sel.schema
    for e in sel.entries:
        if isinstance(e, SVSelection):
            out.append({"attr": e.attr, "item": e.item})
        else:
            pos = schema.mv_pos(e.attr)
            items = list(schema.items_of(pos, schema.mask_of(pos, e.items)))
            out.append({"attr": e.attr, "items": items, "op": e.op})
    return out


def instance_to_dict(inst: ConstraintInstance, options: dict | None = None) -> dict:
    s = inst.schema
    doc = {
        "schema": {
            "sv": [{"name": a.name, "domain": list(a.domain)} for a in s.sv_attrs],
            "mv": [{"name": a.name, "domain": list(a.domain)} for a in s.mv_attrs],
        },
        "sv_constraints": [],
        "mv_constraints": [],
        "ms_constraints": [],
        "dup_constraints": [],
        "sigma_prime": inst.sigma_prime,
        "size": inst.size,
    }
    for c in inst.sv_constraints:
        (e,) = c.selection.entries
        doc["sv_constraints"].append({"attr": e.attr, "item": e.item, "lo": c.lo, "hi": c.hi})
    for c in inst.mv_constraints:
        (e,) = _selection_doc(c.selection)
        doc["mv_constraints"].append({"attr": e["attr"], "items": e["items"], "lo": c.lo, "hi": c.hi})
    for c in inst.ms_constraints:
        doc["ms_constraints"].append({"select": _selection_doc(c.selection), "lo": c.lo, "hi": c.hi})
    for d in inst.dup_constraints:
        doc["dup_constraints"].append({"select": _selection_doc(d.selection), "cap": d.cap})
    if options is not None:
        doc["options"] = dict(options)
    return doc


def emit_instance(inst: ConstraintInstance, options: dict | None = None) -> str:
    return json.dumps(instance_to_dict(inst, options), indent=2) + "\n"


def write_instance_file(path, inst: ConstraintInstance, options: dict | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_instance(inst, options))


# dataset files

def format_count(v) -> str:
    """Exact decimal text for integers, ``p/q`` for other rationals."""
    if isinstance(v, float):
        return repr(float(v))
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def emit_dataset(D: Dataset) -> str:
    lines = [DATASET_HEADER]
    for t, count in D.items():
        lines.append(f"{format_count(count)}\t{','.join(t.items())}")
    return "\n".join(lines) + "\n"


def write_dataset_file(path, D: Dataset):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(emit_dataset(D))


def loads_dataset(text: str, schema: Schema, source: str = "<dataset>") -> Dataset:
    """Parse dataset text.  Counts must be positive integers; transactions distinct."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != DATASET_HEADER:
        raise ParseError(f"{source}:1: expected header {DATASET_HEADER!r}")
    entries = {}
    for lineno, line in enumerate(lines[1:], start=2):
        where = f"{source}:{lineno}"
        count_text, tab, items_text = line.partition("\t")
        if not tab:
            raise ParseError(f"{where}: expected 'count<TAB>items'")
        if not count_text.isdigit() or count_text != str(int(count_text)) or int(count_text) <= 0:
            raise ParseError(f"{where}: count must be a positive integer, got {count_text!r}")
        items = items_text.split(",") if items_text else []
        try:
            t = _transaction_from_items(schema, items)
        except (SchemaMismatch, ValidationError) as exc:
            raise ParseError(f"{where}: {exc}") from None
        if t in entries:
            raise ParseError(f"{where}: duplicate transaction {t!r}")
        if list(t.items()) != items:
            raise ParseError(f"{where}: items not in canonical order")
        entries[t] = int(count_text)
    return Dataset(entries)


def _transaction_from_items(schema: Schema, items: list[str]):
    if len(items) < schema.p:
        raise SchemaMismatch(f"expected {schema.p} SV values, got {len(items)} items")
    sv = items[:schema.p]
    mv = [[] for _ in range(schema.q)]
    for item in items[schema.p:]:
        kind, pos, _ = schema.locate_item(item)
        if kind != "mv":
            raise SchemaMismatch(f"{item!r} is not an MV item")
        mv[pos].append(item)
    return schema.transaction(sv, mv)


def read_dataset_file(path, schema: Schema) -> Dataset:
    with open(path, encoding="utf-8", newline="") as fh:
        return loads_dataset(fh.read(), schema, str(path))
