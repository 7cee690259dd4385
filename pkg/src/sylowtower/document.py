"""Loading tower documents from JSON, with JSON-pointer locations on every error."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from .burnside import action_from_generators, validate_action
from .cohomology import Cochain, cohomology_group
from .errors import SylowTowerError, UserInputError
from .groups import (FiniteGroup, alternating, cyclic, dicyclic, dihedral, direct_product, from_permutations,
                     quaternion, symmetric, trivial_group)
from .modules import GModule
from .postnikov import PostnikovTower, Stage, TowerMap, validate_map

FORMAT_VERSION = 1


def schema() -> dict:
    with resources.files("sylowtower").joinpath("schema/tower.schema.json").open() as fh:
        return json.load(fh)


def _ptr(*parts) -> str:
    return "/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in parts) if parts else "/"


class _At:
    """Re-raise library errors at a JSON pointer, keeping the inner location in the message."""

    def __init__(self, where: str):
        self.where = where

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is None or not isinstance(exc, SylowTowerError):
            return False
        if exc.location.startswith("/") and exc.location != "/":
            raise exc
        inner = "" if exc.location == "/" else f" [{exc.location}]"
        err = type(exc)(exc.message + inner, location=self.where, hint=exc.hint)
        raise err from exc


# builtin groups -----------------------------------------------------------------

_BUILTIN = re.compile(r"^(cyclic|sym|alt|dihedral|dicyclic|quaternion):(\d+)$")


def _split_top(s: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


def builtin_group(spec: str, where: str = "/") -> FiniteGroup:
    """Named groups: trivial, cyclic:n, sym:n, alt:n, dihedral:n (order n), dicyclic:n, quaternion:n, product:[...]."""
    s = spec.strip()
    if s == "trivial":
        return trivial_group()
    if s.startswith("product:[") and s.endswith("]"):
        parts = _split_top(s[len("product:["):-1])
        if not parts:
            raise UserInputError("product of no groups", location=where, hint="list at least one factor")
        return direct_product(*[builtin_group(p, where) for p in parts])
    m = _BUILTIN.match(s)
    if not m:
        raise UserInputError(f"unknown group {spec!r}", location=where,
                             hint="use a name from the document's groups or a builtin such as cyclic:4, "
                                  "sym:3, dihedral:8, product:[cyclic:2,cyclic:3]")
    kind, n = m.group(1), int(m.group(2))
    with _At(where):
        if kind == "cyclic":
            if n < 1:
                raise UserInputError("cyclic group order must be positive")
            return cyclic(n)
        if kind in ("sym", "alt"):
            if not 1 <= n <= 5:
                raise UserInputError(f"{kind}:{n} is outside the supported range 1..5",
                                     hint="larger permutation groups exceed the brute-force bounds")
            return symmetric(n) if kind == "sym" else alternating(n)
        if kind == "dihedral":
            return dihedral(n)
        if kind == "dicyclic":
            return dicyclic(n)
        return quaternion(n)


# documents ----------------------------------------------------------------------

@dataclass
class GSet:
    group: FiniteGroup
    action: np.ndarray


@dataclass
class Document:
    source: str = "<memory>"
    groups: dict[str, FiniteGroup] = field(default_factory=dict)
    modules: dict[str, GModule] = field(default_factory=dict)
    towers: dict[str, PostnikovTower] = field(default_factory=dict)
    maps: dict[str, TowerMap] = field(default_factory=dict)
    gsets: dict[str, GSet] = field(default_factory=dict)
    fibrations: dict[str, TowerMap] = field(default_factory=dict)
    requests: list[dict] = field(default_factory=list)

    def tower(self, name: str | None = None) -> PostnikovTower:
        if name is None:
            if not self.towers:
                raise UserInputError("the document defines no tower", location=f"{self.source}#/towers",
                                     hint="add a tower under \"towers\" or use the single-tower layout")
            return next(iter(self.towers.values()))
        if name not in self.towers:
            raise UserInputError(f"no tower named {name!r}", location=f"{self.source}#/towers",
                                 hint=f"known towers: {', '.join(self.towers) or 'none'}")
        return self.towers[name]

    def map(self, name: str) -> TowerMap:
        if name not in self.maps:
            raise UserInputError(f"no map named {name!r}", location=f"{self.source}#/maps",
                                 hint=f"known maps: {', '.join(self.maps) or 'none'}")
        return self.maps[name]

    def group(self, ref: str) -> FiniteGroup:
        if ref in self.groups:
            return self.groups[ref]
        return builtin_group(ref, where=f"{self.source}#/groups")

    def module(self, ref: str, G: FiniteGroup) -> GModule:
        where = f"{self.source}#/modules"
        if ref in self.modules:
            M = self.modules[ref]
            if M.group != G:
                raise UserInputError(f"module {ref!r} is defined over {M.group.name}, not {G.name}", location=where,
                                     hint="pick a module over the requested group")
            return M
        m = re.match(r"^trivial:(\d+(?:,\d+)*)$", ref)
        if m:
            with _At(where):
                return GModule.trivial(G, [int(x) for x in m.group(1).split(",")])
        raise UserInputError(f"no module named {ref!r}", location=where,
                             hint="use a module from the document or trivial:k1,k2,...")


class _Loader:
    def __init__(self, raw: dict, source: str):
        self.raw = raw
        self.doc = Document(source)
        self.src = source
        self.single: str | None = None

    def at(self, *parts) -> str:
        if self.single is not None and parts[:2] == ("towers", self.single):
            parts = parts[2:]
        return f"{self.src}#{_ptr(*parts)}"

    def group(self, spec, *path) -> FiniteGroup:
        if isinstance(spec, str):
            if spec in self.doc.groups:
                return self.doc.groups[spec]
            if spec in self.raw.get("groups", {}) and spec not in self.doc.groups:
                return self.group(self.raw["groups"][spec], "groups", spec)
            return builtin_group(spec, self.at(*path))
        with _At(self.at(*path)):
            if "table" in spec:
                return FiniteGroup(spec["table"], labels=spec.get("labels"), name=spec.get("name"))
            return from_permutations(spec["permutations"], name=spec.get("name"))

    def module(self, spec, G: FiniteGroup | None, *path) -> GModule:
        if isinstance(spec, str):
            if spec not in self.doc.modules:
                raise UserInputError(f"no module named {spec!r}", location=self.at(*path),
                                     hint="define it under \"modules\" first")
            M = self.doc.modules[spec]
            if G is not None and M.group != G:
                raise UserInputError(f"module {spec!r} is over {M.group.name}, not {G.name}", location=self.at(*path),
                                     hint="stage modules must be over the tower's group")
            return M
        if "group" in spec:
            H = self.group(spec["group"], *path, "group")
            if G is not None and H != G:
                raise UserInputError("module group differs from the tower's group", location=self.at(*path, "group"))
            G = H
        if G is None:
            raise UserInputError("module has no group", location=self.at(*path), hint="add a \"group\" field")
        factors = spec["factors"]
        action = spec.get("action", "trivial")
        with _At(self.at(*path, "action")):
            if any(int(d) < 2 for d in factors):
                raise UserInputError("module factors must be at least 2", hint="drop factors equal to 1")
            if action == "trivial":
                return GModule.trivial(G, factors)
            r = len(factors)
            if isinstance(action, list):
                if len(action) != len(G.generators):
                    raise UserInputError(f"expected one matrix per generator of {G.name} "
                                         f"({len(G.generators)}: elements {list(G.generators)}), got {len(action)}")
                images = dict(zip(G.generators, action))
            else:
                images = {int(k): v for k, v in action.items()}
            for g, mat in images.items():
                if not 0 <= g < G.order:
                    raise UserInputError(f"element {g} is not in {G.name}")
                if np.asarray(mat).shape != (r, r):
                    raise UserInputError(f"action matrix of element {g} must be {r}x{r}")
            return GModule.from_generators(G, factors, images)

    def cochain(self, spec, M: GModule, degree: int, *path) -> Cochain:
        G = M.group
        where = self.at(*path)
        with _At(where):
            if spec == "zero":
                return Cochain.zero(M, degree)
            if isinstance(spec, list):
                vals = np.asarray(spec, dtype=np.int64)
                shape = (G.order,) * degree + (M.rank,)
                if vals.shape == shape[:-1] and M.rank == 1:
                    vals = vals[..., None]
                if vals.shape != shape:
                    raise UserInputError(f"cochain table has shape {vals.shape}, expected {shape}",
                                         hint="index the table by the group elements of each argument")
                return Cochain(M, degree, vals)
            if "sparse" in spec:
                vals = Cochain.zero(M, degree).values.copy()
                for i, ent in enumerate(spec["sparse"]):
                    args, value = ent["args"], ent["value"]
                    if len(args) != degree or len(value) != M.rank or any(a >= G.order for a in args):
                        raise UserInputError(f"sparse entry {i} needs {degree} elements of {G.name} and "
                                             f"{M.rank} values", location=f"{where}/sparse/{i}")
                    vals[tuple(args)] = value
                return Cochain(M, degree, vals)
            H = cohomology_group(G, M, degree)
            coords = spec["class"]
            if len(coords) != len(H.invariant_factors):
                raise UserInputError(f"H^{degree} has invariant factors {list(H.invariant_factors)}; "
                                     f"give {len(H.invariant_factors)} coordinates")
            return H.element(coords)

    def tower(self, spec, name: str, *path) -> PostnikovTower:
        if isinstance(spec, str):
            if spec not in self.doc.towers:
                raise UserInputError(f"no tower named {spec!r}", location=self.at(*path),
                                     hint="define it under \"towers\" before referring to it")
            return self.doc.towers[spec]
        G = self.group(spec["group"], *path, "group")
        stages = []
        for i, st in enumerate(spec.get("stages", [])):
            lv = st["level"]
            M = self.module(st["module"], G, *path, "stages", i, "module")
            k = self.cochain(st.get("k", "zero"), M, lv + 1, *path, "stages", i, "k")
            stages.append(Stage(lv, M, k))
        tname = spec.get("name", name)
        try:
            return PostnikovTower(G, stages, name=tname)
        except SylowTowerError as exc:
            rest = exc.location[len(tname) + 1:].split("/") if exc.location.startswith(tname + "/") else []
            raise type(exc)(exc.message, location=self.at(*path, *rest), hint=exc.hint) from exc

    def map(self, spec, name: str, *path) -> TowerMap:
        if isinstance(spec, str):
            if spec not in self.doc.maps:
                raise UserInputError(f"no map named {spec!r}", location=self.at(*path))
            return self.doc.maps[spec]
        S = self.tower(spec["source"], f"{name}.source", *path, "source")
        T = self.tower(spec["target"], f"{name}.target", *path, "target")
        phi1 = spec["phi1"]
        if len(phi1) != S.base.order or any(x >= T.base.order for x in phi1):
            raise UserInputError(f"phi1 must list an element of {T.base.name} for each of the {S.base.order} "
                                 f"elements of {S.base.name}", location=self.at(*path, "phi1"))
        sm = spec.get("stage_maps", {})
        items = [(int(k), v) for k, v in sm.items()] if isinstance(sm, dict) else [(e["level"], e["matrix"]) for e in sm]
        maps = {}
        for lv, mat in items:
            a = np.asarray(mat, dtype=np.int64)
            want = (T.module_at(lv).rank, S.module_at(lv).rank)
            if a.size == 0:
                a = np.zeros(want, dtype=np.int64)
            maps[lv] = a
        with _At(self.at(*path, "stage_maps")):
            m = TowerMap(S, T, phi1, maps, {}, name=name)
        for key, w in spec.get("witnesses", {}).items():
            lv = int(key)
            if lv not in m.levels:
                raise UserInputError(f"witness given for level {lv}, which neither tower has",
                                     location=self.at(*path, "witnesses", key))
            m.witnesses[lv] = self.cochain(w, m.pulled_target(lv), lv, *path, "witnesses", key)
        v = validate_map(m)
        if not v:
            first = next(d for d in v.diagnostics if not d.ok)
            if first.level == 1:
                loc = self.at(*path, "phi1")
                extra = f" at {first.failure}" if first.failure is not None else ""
            elif "witness" in first.message and str(first.level) in spec.get("witnesses", {}):
                loc, extra = self.at(*path, "witnesses", str(first.level)), ""
            else:
                loc, extra = self.at(*path, "stage_maps"), ""
            raise UserInputError(f"invalid map at level {first.level}: {first.message}{extra}", location=loc,
                                 hint="check equivariance of the stage maps and compatibility of k-invariants")
        return m

    def gset(self, spec, *path) -> GSet:
        G = self.group(spec["group"], *path, "group")
        with _At(self.at(*path)):
            if "action" in spec:
                return GSet(G, validate_action(G, spec["action"]))
            gens = {int(k): v for k, v in spec["generators"].items()}
            n = spec["size"]
            for g, perm in gens.items():
                if len(perm) != n:
                    raise UserInputError(f"permutation for element {g} must have {n} entries")
            return GSet(G, action_from_generators(G, gens, n))

    def load(self) -> Document:
        raw = self.raw
        if "group" in raw:
            self.single = raw.get("name", "tower")
            raw = {"version": FORMAT_VERSION,
                   "towers": {self.single: {k: raw[k] for k in ("group", "stages", "name") if k in raw}}}
            self.raw = raw
        for name, g in raw.get("groups", {}).items():
            self.doc.groups[name] = self.group(g, "groups", name)
            if isinstance(g, dict) and "name" not in g:
                self.doc.groups[name].name = name
        for name, m in raw.get("modules", {}).items():
            if "group" not in m:
                raise UserInputError("top-level modules need a \"group\"", location=self.at("modules", name))
            self.doc.modules[name] = self.module(m, None, "modules", name)
        for name, t in raw.get("towers", {}).items():
            self.doc.towers[name] = self.tower(t, name, "towers", name)
        for name, m in raw.get("maps", {}).items():
            self.doc.maps[name] = self.map(m, name, "maps", name)
        for name, s in raw.get("gsets", {}).items():
            self.doc.gsets[name] = self.gset(s, "gsets", name)
        for name, f in raw.get("fibrations", {}).items():
            self.doc.fibrations[name] = self.map(f["map"], name, "fibrations", name, "map")
        self.doc.requests = list(raw.get("requests", []))
        return self.doc


def parse_document(raw, source: str = "<memory>") -> Document:
    if not isinstance(raw, dict):
        raise UserInputError("a document must be a JSON object", location=f"{source}#/")
    v = jsonschema.Draft202012Validator(schema())
    errs = sorted(v.iter_errors(raw), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errs:
        e = errs[0]
        raise UserInputError(f"schema violation: {e.message[:300]}", location=f"{source}#{_ptr(*e.absolute_path)}",
                             hint="see the document schema shipped in sylowtower/schema/tower.schema.json")
    return _Loader(raw, source).load()


def load(path: str) -> Document:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UserInputError(f"cannot read {path}: {exc.strerror}", location=path,
                             hint="check the file path") from None
    if not text.strip():
        return Document(path)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UserInputError(f"invalid JSON: {exc.msg}", location=f"{path}:{exc.lineno}:{exc.colno}",
                             hint="fix the JSON syntax") from None
    return parse_document(raw, path)
