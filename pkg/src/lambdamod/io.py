"""JSON module files and tower files.

A module file is a JSON object with ``p``, ``kind`` and a kind-specific
payload::

    {"p": 5, "kind": "elementary", "free_rank": 0,
     "factors": [{"kind": "p-power", "exp": 2},
                 {"kind": "generic", "coeffs": [-5, 1], "exp": 1},
                 {"kind": "cyclo", "level": 1, "exp": 2}]}

    {"p": 5, "kind": "presented", "rows": 1, "cols": 1,
     "entries": [[[-5, 1]]], "syzygies": [[[0]]]}

    {"p": 5, "kind": "finite", "orders": [2, 1], "t_action": [[5, 1], [0, 0]]}

Coefficient lists run from low to high degree.  Unknown fields are
rejected; serialisation is canonical so that parse and serialise are
inverse on canonical forms.
"""
from __future__ import annotations

import json
from typing import Optional

from .elementary import Cyclo, ElementaryModule, Generic, PPower
from .errors import InvalidInput
from .presented import FiniteWTModule, PresentedModule
from .ring import DistPoly, PrecisionProfile, profile_for, trim
from .tower import Tower, TowerLevel

KINDS = ("elementary", "presented", "finite")


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _int(v, loc):
    if isinstance(v, bool) or not isinstance(v, int):
        raise InvalidInput(f"expected an integer, got {v!r}", loc)
    return v


def _list(v, loc):
    if not isinstance(v, list):
        raise InvalidInput(f"expected a list, got {type(v).__name__}", loc)
    return v


def _coeffs(v, loc):
    c = [_int(x, f"{loc}[{i}]") for i, x in enumerate(_list(v, loc))]
    return tuple(c)


def _keys(d, allowed, required, loc):
    if not isinstance(d, dict):
        raise InvalidInput("expected an object", loc)
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise InvalidInput(f"unknown field {extra[0]!r}", loc)
    for k in required:
        if k not in d:
            raise InvalidInput(f"missing field {k!r}", loc)


def _sym(x, m):
    x %= m
    return x - m if x > m // 2 else x


def make_profile(p, M=16, D=None, levels=4) -> PrecisionProfile:
    if D is None:
        return profile_for(p, levels, M)
    return PrecisionProfile(p, M, D, levels)


# --------------------------------------------------------------- parsing

def parse_module(doc, M: int = 16, D: Optional[int] = None, levels: int = 4, p=None):
    """Parse a module document (dict or JSON text) into a module object."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise InvalidInput(f"not valid JSON: {e.msg}", f"line {e.lineno}") from None
    if not isinstance(doc, dict):
        raise InvalidInput("module file must be a JSON object", "$")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise InvalidInput(f"kind must be one of {', '.join(KINDS)}, got {kind!r}", "$.kind")
    fp = _int(doc.get("p"), "$.p")
    if p is not None and p != fp:
        raise InvalidInput(f"--p {p} disagrees with file p={fp}", "$.p")
    if kind == "finite":
        _keys(doc, ("p", "kind", "orders", "t_action"), ("p", "kind", "orders", "t_action"), "$")
        orders = _coeffs(doc["orders"], "$.orders")
        rows = [_coeffs(r, f"$.t_action[{i}]") for i, r in enumerate(_list(doc["t_action"], "$.t_action"))]
        return FiniteWTModule(fp, orders, tuple(rows))
    prof = make_profile(fp, M, D, levels)
    if kind == "elementary":
        _keys(doc, ("p", "kind", "free_rank", "factors"), ("p", "kind", "factors"), "$")
        free = _int(doc.get("free_rank", 0), "$.free_rank")
        fs = [_factor(f, fp, f"$.factors[{i}]")
              for i, f in enumerate(_list(doc["factors"], "$.factors"))]
        return ElementaryModule(prof, free, tuple(fs))
    _keys(doc, ("p", "kind", "rows", "cols", "entries", "syzygies"),
          ("p", "kind", "rows", "cols", "entries"), "$")
    r, c = _int(doc["rows"], "$.rows"), _int(doc["cols"], "$.cols")
    ent = _list(doc["entries"], "$.entries")
    if len(ent) != r:
        raise InvalidInput(f"expected {r} rows, got {len(ent)}", "$.entries")
    rows = []
    for i, row in enumerate(ent):
        row = _list(row, f"$.entries[{i}]")
        if len(row) != c:
            raise InvalidInput(f"expected {c} columns, got {len(row)}", f"$.entries[{i}]")
        rows.append([_coeffs(x, f"$.entries[{i}][{j}]") for j, x in enumerate(row)])
    syz = None
    if "syzygies" in doc:
        syz = []
        for i, row in enumerate(_list(doc["syzygies"], "$.syzygies")):
            syz.append([_coeffs(x, f"$.syzygies[{i}][{j}]")
                        for j, x in enumerate(_list(row, f"$.syzygies[{i}]"))])
    return PresentedModule.from_polys(prof, rows, syz)


def _factor(f, p, loc):
    if not isinstance(f, dict):
        raise InvalidInput("factor must be an object", loc)
    kind = f.get("kind")
    if kind == "p-power":
        _keys(f, ("kind", "exp"), ("kind", "exp"), loc)
        return PPower(_int(f["exp"], loc + ".exp"))
    if kind == "generic":
        _keys(f, ("kind", "coeffs", "exp"), ("kind", "coeffs"), loc)
        c = _coeffs(f["coeffs"], loc + ".coeffs")
        try:
            g = DistPoly(trim(c), p)
        except InvalidInput as e:
            raise InvalidInput(str(e), loc + ".coeffs") from None
        return Generic(g, _int(f.get("exp", 1), loc + ".exp"))
    if kind == "cyclo":
        _keys(f, ("kind", "level", "exp"), ("kind", "level"), loc)
        return Cyclo(_int(f["level"], loc + ".level"), _int(f.get("exp", 1), loc + ".exp"))
    raise InvalidInput(f"unknown factor kind {kind!r}", loc + ".kind")


# --------------------------------------------------------------- serialising

def serialize_module(X) -> dict:
    if isinstance(X, ElementaryModule):
        m = X.prof.modulus
        fs = []
        for x in X.factors:
            if isinstance(x, PPower):
                fs.append({"kind": "p-power", "exp": x.f})
            elif isinstance(x, Generic):
                fs.append({"kind": "generic", "coeffs": [_sym(c, m) for c in x.g.coeffs],
                           "exp": x.e})
            else:
                fs.append({"kind": "cyclo", "level": x.a, "exp": x.e})
        return {"p": X.p, "kind": "elementary", "free_rank": X.free_rank, "factors": fs}
    if isinstance(X, PresentedModule):
        doc = {"p": X.p, "kind": "presented", "rows": X.rows, "cols": X.cols,
               "entries": [[list(x) for x in r] for r in X.poly_matrix()]}
        if X.syzygies is not None:
            doc["syzygies"] = [[list(x) for x in r] for r in X.syzygy_matrix()]
        return doc
    if isinstance(X, FiniteWTModule):
        return {"p": X.p, "kind": "finite", "orders": list(X.orders),
                "t_action": [list(r) for r in X.t_action]}
    raise InvalidInput(f"cannot serialise {type(X).__name__}")


def module_text(X) -> str:
    return dumps(serialize_module(X))


# --------------------------------------------------------------- towers

def serialize_tower(t: Tower) -> dict:
    doc = {"kind": "tower", "p": t.p, "bound": t.bound, "seed": t.seed,
           "levels": [{"n": lv.n, "divisible_corank": lv.divisible_corank,
                       "defect_in": lv.defect_in, "defect_out": lv.defect_out,
                       "finite_part": {"orders": list(lv.finite_part.orders),
                                       "t_action": [list(r) for r in lv.finite_part.t_action]}}
                      for lv in t.levels]}
    doc["limit"] = serialize_module(t.limit) if t.limit is not None else None
    return doc


def parse_tower(doc, M: int = 16) -> Tower:
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise InvalidInput(f"not valid JSON: {e.msg}", f"line {e.lineno}") from None
    if isinstance(doc, dict) and "result" in doc and isinstance(doc["result"], dict) \
            and "tower" in doc["result"]:
        doc = doc["result"]["tower"]
    _keys(doc, ("kind", "p", "bound", "seed", "levels", "limit"), ("kind", "p", "levels"), "$")
    if doc["kind"] != "tower":
        raise InvalidInput("expected kind 'tower'", "$.kind")
    p = _int(doc["p"], "$.p")
    bound = _int(doc.get("bound", 0), "$.bound")
    seed = doc.get("seed")
    if seed is not None:
        seed = _int(seed, "$.seed")
    levels = []
    for i, lv in enumerate(_list(doc["levels"], "$.levels")):
        loc = f"$.levels[{i}]"
        _keys(lv, ("n", "divisible_corank", "defect_in", "defect_out", "finite_part"),
              ("n", "divisible_corank", "finite_part"), loc)
        fp = lv["finite_part"]
        _keys(fp, ("orders", "t_action"), ("orders", "t_action"), loc + ".finite_part")
        M_ = FiniteWTModule(p, _coeffs(fp["orders"], loc + ".finite_part.orders"),
                            tuple(_coeffs(r, f"{loc}.finite_part.t_action[{j}]")
                                  for j, r in enumerate(_list(fp["t_action"], loc))))
        levels.append(TowerLevel(_int(lv["n"], loc + ".n"),
                                 _int(lv["divisible_corank"], loc + ".divisible_corank"),
                                 M_, _int(lv.get("defect_in", 0), loc + ".defect_in"),
                                 _int(lv.get("defect_out", 0), loc + ".defect_out")))
    limit = None
    if doc.get("limit") is not None:
        limit = parse_module(doc["limit"], M=M, levels=max(4, len(levels)))
        if not isinstance(limit, ElementaryModule):
            raise InvalidInput("tower limit must be elementary", "$.limit")
    return Tower(p, tuple(levels), bound, limit, seed)
