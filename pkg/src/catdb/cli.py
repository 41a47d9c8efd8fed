"""Workspace documents and the command-line surface.

A workspace is a single JSON document declaring named entities -- type
domains, infomorphisms, signatures, tables, shapes, databases, database
morphisms, set-valued diagrams, shape passages, and indexed fibrations --
with every cross-reference by name.  Loading resolves all references and
runs each entity through its module validator; a command then performs one
construction from the library and prints a deterministic report.

Reports are JSON on stdout by default; ``--format csv`` exports a table
result as CSV whose headers are the glued-column representative names.
Diagnostics go to stderr.  Exit status is 0 when every check passes, 1 when
a check fails, and 2 on input errors.

Database morphisms are the one entity kind whose laws are deliberately not
enforced at load time: their components are stored as written so that
``check`` can re-verify the tuple and naturality conditions and report the
failing shape objects instead of refusing the document outright.
"""

import argparse
import csv
import io
import json
import sys

from .diagrams import (
    DatabaseMorphism,
    check_database_morphism,
    data_projection,
    database_from_tables,
    dom_projection,
    key_projection,
    sign_projection,
)
from .fincat import (
    Bridge,
    CategoryError,
    FinCategory,
    Passage,
    compose_passages,
    free_on_acyclic_graph,
    identity_passage,
    opposite_passage,
)
from .tables import (
    SET,
    AdjunctionWitness,
    Infomorphism,
    SetFn,
    SigMorphism,
    Signature,
    SignedDomain,
    Table,
    TableMorphism,
    TypeDomain,
    sorted_values,
    tuple_make,
)
from .univ import (
    IndexedAdjunction,
    colimit_in_set,
    colimit_tbl,
    grothendieck,
    lan,
    limit_in_set,
    limit_tbl,
    ran,
)


# ------------------------------------------------------------------ errors


class WorkspaceError(Exception):
    """Base class for workspace loading and command errors."""


class ParseError(WorkspaceError):
    """The document is not well-formed (bad JSON or bad structure)."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = "line %d, column %d: %s" % (line, column, message)
        super().__init__(message)


class ResolutionError(WorkspaceError):
    """A cross-reference names an entity that is not declared."""


class ValidationError(WorkspaceError):
    """An entity is declared but violates its module's laws."""


# ----------------------------------------------------------- entity kinds


KINDS = ("typedomains", "infomorphisms", "signatures", "tables", "shapes",
         "setdiagrams", "passages", "databases", "morphisms", "indexed")

_SINGULAR = {
    "typedomains": "type domain",
    "infomorphisms": "infomorphism",
    "signatures": "signature",
    "tables": "table",
    "shapes": "shape",
    "setdiagrams": "set diagram",
    "passages": "passage",
    "databases": "database",
    "morphisms": "database morphism",
    "indexed": "indexed fibration",
}


def _expect(cond, message, exc=ParseError):
    if not cond:
        raise exc(message)


def _field(entry, key, where):
    _expect(isinstance(entry, dict), "%s: expected an object" % where)
    _expect(key in entry, "%s: missing %r" % (where, key))
    return entry[key]


def _string_list(xs, where):
    _expect(isinstance(xs, list) and all(isinstance(x, str) for x in xs),
            "%s: expected an array of strings" % where)
    return list(xs)


def _pair_list(xs, where):
    _expect(isinstance(xs, list), "%s: expected an array of pairs" % where)
    out = []
    for p in xs:
        _expect(isinstance(p, list) and len(p) == 2
                and all(isinstance(x, str) for x in p),
                "%s: expected [from, to] string pairs" % where)
        out.append((p[0], p[1]))
    return out


def _pair_dict(xs, where):
    out = {}
    for a, b in _pair_list(xs, where):
        _expect(a not in out, "%s: duplicate entry for %r" % (where, a))
        out[a] = b
    return out


class WorkspaceFile:
    """Named entities of one document, fully resolved and validated."""

    def __init__(self):
        self.entities = {kind: {} for kind in KINDS}
        self.payloads = {kind: {} for kind in KINDS}

    def declare(self, kind, name, obj, payload):
        for other in KINDS:
            _expect(name not in self.entities[other],
                    "entity name %r is already taken by a %s"
                    % (name, _SINGULAR[other]), ValidationError)
        self.entities[kind][name] = obj
        self.payloads[kind][name] = payload

    def resolve(self, kind, name, context):
        table = self.entities[kind]
        if name not in table:
            raise ResolutionError(
                "%s: unknown %s %r" % (context, _SINGULAR[kind], name))
        return table[name]

    def find(self, name):
        for kind in KINDS:
            if name in self.entities[kind]:
                return kind, self.entities[kind][name]
        raise ResolutionError("no entity named %r" % name)

    def __eq__(self, other):
        return (isinstance(other, WorkspaceFile)
                and serialize_workspace(self) == serialize_workspace(other))

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        counts = ", ".join("%d %s" % (len(self.entities[k]), k)
                           for k in KINDS if self.entities[k])
        return "WorkspaceFile(%s)" % (counts or "empty")


def _ref(entry, key, kind, ws, where):
    name = _field(entry, key, where)
    _expect(isinstance(name, str), "%s: %r must be a string" % (where, key))
    return name, ws.resolve(kind, name, where)


# --------------------------------------------------------------- rendering


def label(x):
    """Flat, deterministic display name for structured identifiers.

    Result columns and keys produced by the universal constructions are
    nested tuples of strings (glued-class representatives, compatible key
    families); joining the parts with dots gives the canonical
    representative name.
    """
    if isinstance(x, str):
        return x
    if isinstance(x, tuple):
        return ".".join(label(p) for p in x)
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(label(p) for p in x)) + "}"
    return str(x)


def _set_payload(xs):
    return [label(x) for x in sorted_values(xs)]


def _mapping_payload(mapping, keys):
    return [[label(k), label(mapping[k])] for k in sorted_values(keys)]


def _fn_payload(fn):
    return _mapping_payload(fn.mapping, fn.src)


def _signature_payload(sig):
    return [[label(i), label(sig.sorts[i])] for i in sorted_values(sig.arity)]


def _table_payload(t):
    rows = []
    for k in sorted_values(t.keys):
        cells = [[label(i), label(v)] for i, v in t.tuples[k]]
        rows.append([label(k), cells])
    return {"columns": _signature_payload(t.sig),
            "keys": _set_payload(t.keys),
            "rows": rows}


def _table_morphism_payload(tm):
    return {"h": _mapping_payload(tm.sig_mor.index_map, tm.sig_mor.src.arity),
            "k": _mapping_payload(tm.key_map, tm.src.keys)}


def _shape_payload(cat):
    return {"objects": list(cat.objects),
            "morphisms": [[f, cat.morphisms[f][0], cat.morphisms[f][1]]
                          for f in sorted(cat.morphisms)],
            "identities": [[o, cat.identities[o]] for o in cat.objects],
            "table": [[[f, g], cat.table[(f, g)]]
                      for f, g in sorted(cat.table)]}


def _passage_payload(p):
    src = p.source
    return {"objects": [[x, p.on_obj(x)] for x in src.objects],
            "morphisms": [[f, p.on_mor(f)]
                          for f in src.nonidentity_morphisms()]}


def canonical_json(payload):
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def table_csv(t):
    """One row per key; headers are the column identifiers of the result."""
    cols = sorted_values(t.sig.arity)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key"] + [label(i) for i in cols])
    for k in sorted_values(t.keys):
        cells = dict(t.tuples[k])
        writer.writerow([label(k)] + [label(cells[i]) for i in cols])
    return buf.getvalue()


# ----------------------------------------------------------------- parsing


def parse_workspace(path):
    """Load and validate a workspace document from ``path``."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError("cannot read %s: %s" % (path, e.strerror or e))
    return parse_workspace_text(text)


def parse_workspace_text(text):
    """Parse, resolve, and validate a workspace document given as a string."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno)
    _expect(isinstance(doc, dict), "top level must be a JSON object")
    for key in doc:
        _expect(key in KINDS, "unknown entity kind %r" % key)
    ws = WorkspaceFile()
    for kind in KINDS:
        entries = doc.get(kind, [])
        _expect(isinstance(entries, list),
                "%r must be an array of entities" % kind)
        for entry in entries:
            _expect(isinstance(entry, dict),
                    "%s: each entity must be an object" % kind)
            name = _field(entry, "name", _SINGULAR[kind])
            _expect(isinstance(name, str),
                    "%s: name must be a string" % _SINGULAR[kind])
            where = "%s %r" % (_SINGULAR[kind], name)
            obj, payload = _PARSERS[kind](entry, ws, where)
            ws.declare(kind, name, obj, payload)
    return ws


def serialize_workspace(ws):
    """Canonical document for a workspace; reparsing yields an equal one."""
    doc = {}
    for kind in KINDS:
        if ws.payloads[kind]:
            doc[kind] = [ws.payloads[kind][n]
                         for n in sorted(ws.payloads[kind])]
    return canonical_json(doc)


def _parse_typedomain(entry, ws, where):
    sorts = _string_list(_field(entry, "sorts", where), where + " sorts")
    values = _string_list(_field(entry, "values", where), where + " values")
    incidence = _pair_list(_field(entry, "incidence", where),
                           where + " incidence")
    try:
        dom = TypeDomain(sorts, values, incidence)
    except CategoryError as e:
        raise ValidationError("%s: %s" % (where, e))
    payload = {"name": entry["name"],
               "sorts": sorted(dom.sorts),
               "values": sorted(dom.values),
               "incidence": [[y, x] for y, x in sorted(dom.incidence)]}
    return dom, payload


def _parse_infomorphism(entry, ws, where):
    src_name, src = _ref(entry, "source", "typedomains", ws, where)
    tgt_name, tgt = _ref(entry, "target", "typedomains", ws, where)
    sort_map = _pair_dict(_field(entry, "sorts", where), where + " sorts")
    value_map = _pair_dict(_field(entry, "values", where), where + " values")
    try:
        info = Infomorphism(src, tgt, sort_map, value_map)
    except CategoryError as e:
        raise ValidationError("%s: %s" % (where, e))
    payload = {"name": entry["name"], "source": src_name, "target": tgt_name,
               "sorts": [[a, b] for a, b in sorted(info.sort_map.items())],
               "values": [[a, b] for a, b in sorted(info.value_map.items())]}
    return info, payload


def _parse_signature(entry, ws, where):
    dom_name, dom = _ref(entry, "domain", "typedomains", ws, where)
    columns = _pair_list(_field(entry, "columns", where), where + " columns")
    arity = [i for i, _ in columns]
    _expect(len(set(arity)) == len(arity),
            "%s: duplicate column identifiers" % where, ValidationError)
    try:
        sd = SignedDomain(Signature(arity, dict(columns), dom.sorts), dom)
    except CategoryError as e:
        raise ValidationError("%s: %s" % (where, e))
    payload = {"name": entry["name"], "domain": dom_name,
               "columns": [[i, sd.sig.sorts[i]] for i in sorted(sd.sig.arity)]}
    return sd, payload


def _parse_table(entry, ws, where):
    sig_name, sd = _ref(entry, "signature", "signatures", ws, where)
    keys = _string_list(_field(entry, "keys", where), where + " keys")
    rows = _field(entry, "rows", where)
    _expect(isinstance(rows, list), "%s: rows must be an array" % where)
    tuples = {}
    for row in rows:
        _expect(isinstance(row, list) and len(row) == 2
                and isinstance(row[0], str),
                "%s: each row is [key, cells]" % where)
        k, cells = row
        _expect(k not in tuples, "%s: duplicate row for key %r" % (where, k))
        _expect(k in keys, "%s: row for undeclared key %r" % (where, k),
                ValidationError)
        tuples[k] = tuple_make(_pair_dict(cells, "%s row %r" % (where, k)))
    try:
        t = Table(sd, keys, tuples)
    except CategoryError as e:
        raise ValidationError("%s: %s" % (where, e))
    payload = {"name": entry["name"], "signature": sig_name,
               "keys": sorted(t.keys),
               "rows": [[k, [[i, v] for i, v in t.tuples[k]]]
                        for k in sorted(t.keys)]}
    return t, payload


def _parse_shape(entry, ws, where):
    if "free_acyclic" in entry:
        fa = _field(entry, "free_acyclic", where)
        nodes = _string_list(_field(fa, "nodes", where), where + " nodes")
        raw = _field(fa, "edges", where)
        _expect(isinstance(raw, list), "%s: edges must be an array" % where)
        edges = []
        for e in raw:
            _expect(isinstance(e, list) and len(e) == 3
                    and all(isinstance(x, str) for x in e),
                    "%s: each edge is [name, from, to]" % where)
            edges.append(tuple(e))
        try:
            cat = free_on_acyclic_graph(nodes, edges)
        except CategoryError as e:
            raise ValidationError("%s: %s" % (where, e))
    else:
        objects = _string_list(_field(entry, "objects", where),
                               where + " objects")
        raw = _field(entry, "morphisms", where)
        _expect(isinstance(raw, list), "%s: morphisms must be an array" % where)
        morphisms = {}
        for m in raw:
            _expect(isinstance(m, list) and len(m) == 3
                    and all(isinstance(x, str) for x in m),
                    "%s: each morphism is [name, from, to]" % where)
            _expect(m[0] not in morphisms,
                    "%s: duplicate morphism %r" % (where, m[0]))
            morphisms[m[0]] = (m[1], m[2])
        identities = _pair_dict(_field(entry, "identities", where),
                                where + " identities")
        raw = _field(entry, "table", where)
        _expect(isinstance(raw, list), "%s: table must be an array" % where)
        table = {}
        for item in raw:
            _expect(isinstance(item, list) and len(item) == 2
                    and isinstance(item[0], list) and len(item[0]) == 2
                    and all(isinstance(x, str) for x in item[0])
                    and isinstance(item[1], str),
                    "%s: each table entry is [[f, g], h]" % where)
            table[(item[0][0], item[0][1])] = item[1]
        try:
            cat = FinCategory(objects, morphisms, identities, table)
        except CategoryError as e:
            raise ValidationError("%s: %s" % (where, e))
    payload = dict(_shape_payload(cat))
    payload["name"] = entry["name"]
    return cat, payload


def _parse_setdiagram(entry, ws, where):
    shape_name, shape = _ref(entry, "shape", "shapes", ws, where)
    raw = _field(entry, "objects", where)
    _expect(isinstance(raw, list), "%s: objects must be an array" % where)
    obj_map = {}
    for item in raw:
        _expect(isinstance(item, list) and len(item) == 2
                and isinstance(item[0], str),
                "%s: each object entry is [object, values]" % where)
        x, vals = item
        _expect(x not in obj_map, "%s: duplicate object %r" % (where, x))
        obj_map[x] = frozenset(_string_list(vals,
                                            "%s object %r" % (where, x)))
    _expect(set(obj_map) == set(shape.objects),
            "%s: objects must cover the shape exactly" % where,
            ValidationError)
    mor_map = {}
    for f, pairs in _field(entry, "morphisms", where) or []:
        _expect(isinstance(f, str), "%s: morphism names are strings" % where)
        _expect(f in shape.nonidentity_morphisms(),
                "%s: unknown or identity shape arrow %r" % (where, f),
                ValidationError)
        s, t = shape.morphisms[f]
        try:
            mor_map[f] = SetFn(obj_map[s], obj_map[t],
                               _pair_dict(pairs, "%s arrow %r" % (where, f)))
        except CategoryError as e:
            raise ValidationError("%s arrow %r: %s" % (where, f, e))
    missing = [f for f in shape.nonidentity_morphisms() if f not in mor_map]
    _expect(not missing, "%s: missing arrow image for %r" % (where, missing),
            ValidationError)
    for o, idf in shape.identities.items():
        mor_map[idf] = SET.identity(obj_map[o])
    try:
        diagram = Passage(shape, SET, obj_map, mor_map)
    except CategoryError as e:
        raise ValidationError("%s: %s" % (where, e))
    payload = {"name": entry["name"], "shape": shape_name,
               "objects": [[x, sorted(obj_map[x])] for x in shape.objects],
               "morphisms": [[f, _fn_payload(mor_map[f])]
                             for f in shape.nonidentity_morphisms()]}
    return diagram, payload


def _shape_map_passage(spec, src, tgt, where):
    """A passage between finite shapes from {objects, morphisms} pairs,
    with identity arrows filled in automatically."""
    obj_map = _pair_dict(_field(spec, "objects", where), where + " objects")
    _expect(set(obj_map) == set(src.objects),
            "%s: objects must cover the source shape exactly" % where,
            ValidationError)
    mor_map = _pair_dict(spec.get("morphisms", []), where + " morphisms")
    for f in mor_map:
        _expect(f in src.nonidentity_morphisms(),
                "%s: unknown or identity source arrow %r" % (where, f),
                ValidationError)
    missing = [f for f in src.nonidentity_morphisms() if f not in mor_map]
    _expect(not missing, "%s: missing arrow image for %r" % (where, missing),
            ValidationError)
    for o, idf in src.identities.items():
        _expect(obj_map[o] in set(tgt.objects),
                "%s: image object %r is not in the target shape"
                % (where, obj_map[o]), ValidationError)
        mor_map[idf] = tgt.identities[obj_map[o]]
    try:
        return Passage(src, tgt, obj_map, mor_map)
    except CategoryError as e:
        raise ValidationError("%s: %s" % (where, e))


def _parse_passage(entry, ws, where):
    src_name, src = _ref(entry, "source", "shapes", ws, where)
    tgt_name, tgt = _ref(entry, "target", "shapes", ws, where)
    p = _shape_map_passage(entry, src, tgt, where)
    payload = dict(_passage_payload(p))
    payload.update({"name": entry["name"],
                    "source": src_name, "target": tgt_name})
    return p, payload


def _parse_table_morphism(hk, src, tgt, where, check):
    """An embedded table morphism ``src -> tgt``: ``h`` lists
    [target-column, source-column] pairs (columns travel backward), ``k``
    lists [source-key, target-key] pairs (keys travel forward)."""
    _expect(isinstance(hk, dict), "%s: expected an object with h and k" % where)
    h = _pair_dict(_field(hk, "h", where), where + " h")
    k = _pair_dict(_field(hk, "k", where), where + " k")
    try:
        sig_mor = SigMorphism(tgt.sig, src.sig, h)
    except CategoryError as e:
        raise ValidationError("%s: %s" % (where, e))
    _expect(set(k) == set(src.keys),
            "%s: k must cover the source table's keys exactly" % where,
            ValidationError)
    try:
        return TableMorphism(src, tgt, sig_mor, k, check=check)
    except CategoryError as e:
        raise ValidationError("%s: %s" % (where, e))


def _parse_database(entry, ws, where):
    shape_name, shape = _ref(entry, "shape", "shapes", ws, where)
    table_names = _pair_dict(_field(entry, "tables", where), where + " tables")
    _expect(set(table_names) == set(shape.objects),
            "%s: tables must cover the shape objects exactly" % where,
            ValidationError)
    tables = {r: ws.resolve("tables", table_names[r], where)
              for r in table_names}
    domains = {tables[r].domain for r in tables}
    _expect(len(domains) == 1,
            "%s: tables span %d type domains; a database lives over one"
            % (where, len(domains)), ValidationError)
    arrows = {}
    for item in entry.get("arrows", []):
        _expect(isinstance(item, list) and len(item) == 2
                and isinstance(item[0], str),
                "%s: each arrow entry is [arrow, {h, k}]" % where)
        f, hk = item
        _expect(f in shape.nonidentity_morphisms(),
                "%s: unknown or identity shape arrow %r" % (where, f),
                ValidationError)
        _expect(f not in arrows, "%s: duplicate arrow %r" % (where, f))
        r, r2 = shape.morphisms[f]
        arrows[f] = _parse_table_morphism(
            hk, tables[r2], tables[r], "%s arrow %r" % (where, f), check=True)
    missing = [f for f in shape.nonidentity_morphisms() if f not in arrows]
    _expect(not missing, "%s: missing arrow image for %r" % (where, missing),
            ValidationError)
    try:
        db = database_from_tables(shape, tables, arrows, next(iter(domains)))
    except CategoryError as e:
        raise ValidationError("%s: %s" % (where, e))
    payload = {"name": entry["name"], "shape": shape_name,
               "tables": [[r, table_names[r]] for r in shape.objects],
               "arrows": [[f, _table_morphism_payload(db.arrow(f))]
                          for f in shape.nonidentity_morphisms()]}
    return db, payload


def _parse_morphism(entry, ws, where):
    src_name, src_db = _ref(entry, "source", "databases", ws, where)
    tgt_name, tgt_db = _ref(entry, "target", "databases", ws, where)
    shape_passage = _shape_map_passage(
        _field(entry, "shape", where), tgt_db.shape, src_db.shape,
        where + " shape")
    raw = _field(entry, "components", where)
    _expect(isinstance(raw, list), "%s: components must be an array" % where)
    comps = {}
    for item in raw:
        _expect(isinstance(item, list) and len(item) == 2
                and isinstance(item[0], str),
                "%s: each component entry is [object, {h, k}]" % where)
        r2, hk = item
        _expect(r2 in set(tgt_db.shape.objects),
                "%s: unknown target shape object %r" % (where, r2),
                ValidationError)
        _expect(r2 not in comps, "%s: duplicate component %r" % (where, r2))
        comps[r2] = _parse_table_morphism(
            hk, src_db.at(shape_passage.on_obj(r2)), tgt_db.at(r2),
            "%s component %r" % (where, r2), check=False)
    missing = [r for r in tgt_db.shape.objects if r not in comps]
    _expect(not missing, "%s: missing component at %r" % (where, missing),
            ValidationError)
    expected = compose_passages(opposite_passage(shape_passage),
                                src_db.diagram)
    bridge = Bridge(expected, tgt_db.diagram, comps, check=False)
    m = DatabaseMorphism(src_db, tgt_db, shape_passage, bridge)
    payload = {"name": entry["name"], "source": src_name, "target": tgt_name,
               "shape": _passage_payload(shape_passage),
               "components": [[r, _table_morphism_payload(comps[r])]
                              for r in tgt_db.shape.objects]}
    return m, payload


def _parse_indexed(entry, ws, where):
    index_name, index = _ref(entry, "index", "shapes", ws, where)
    fiber_names = _pair_dict(_field(entry, "fibers", where), where + " fibers")
    _expect(set(fiber_names) == set(index.objects),
            "%s: fibers must cover the index objects exactly" % where,
            ValidationError)
    fibers = {i: ws.resolve("shapes", fiber_names[i], where)
              for i in fiber_names}
    witnesses = {}
    for item in entry.get("transports", []):
        _expect(isinstance(item, list) and len(item) == 2
                and isinstance(item[0], str) and isinstance(item[1], dict),
                "%s: each transport entry is [arrow, spec]" % where)
        f, spec = item
        _expect(f in index.nonidentity_morphisms(),
                "%s: unknown or identity index arrow %r" % (where, f),
                ValidationError)
        _expect(f not in witnesses, "%s: duplicate transport %r" % (where, f))
        i, j = index.morphisms[f]
        here = "%s transport %r" % (where, f)
        left = _shape_map_passage(_field(spec, "left", here),
                                  fibers[i], fibers[j], here + " left")
        if spec.get("right") is None:
            _expect(spec.get("unit") is None and spec.get("counit") is None,
                    "%s: unit and counit require a right transport" % here,
                    ValidationError)
            witnesses[f] = left
            continue
        right = _shape_map_passage(spec["right"], fibers[j], fibers[i],
                                   here + " right")
        unit_comps = _pair_dict(_field(spec, "unit", here), here + " unit")
        counit_comps = _pair_dict(_field(spec, "counit", here),
                                  here + " counit")
        try:
            unit = Bridge(identity_passage(fibers[i]),
                          compose_passages(left, right), unit_comps)
            counit = Bridge(compose_passages(right, left),
                            identity_passage(fibers[j]), counit_comps)
        except CategoryError as e:
            raise ValidationError("%s: %s" % (here, e))
        witnesses[f] = AdjunctionWitness(left, right, unit, counit)
    missing = [f for f in index.nonidentity_morphisms() if f not in witnesses]
    _expect(not missing, "%s: missing transport for %r" % (where, missing),
            ValidationError)
    try:
        ix = IndexedAdjunction(index, fibers, witnesses)
    except CategoryError as e:
        raise ValidationError("%s: %s" % (where, e))
    payload = {"name": entry["name"], "index": index_name,
               "fibers": [[i, fiber_names[i]] for i in index.objects],
               "transports": [[f, _transport_payload(witnesses[f])]
                              for f in index.nonidentity_morphisms()]}
    return ix, payload


def _transport_payload(w):
    if isinstance(w, Passage):
        return {"left": _passage_payload(w), "right": None,
                "unit": None, "counit": None}
    return {"left": _passage_payload(w.left),
            "right": _passage_payload(w.right),
            "unit": [[a, w.unit.at(a)] for a in w.left.source.objects],
            "counit": [[b, w.counit.at(b)] for b in w.right.source.objects]}


_PARSERS = {
    "typedomains": _parse_typedomain,
    "infomorphisms": _parse_infomorphism,
    "signatures": _parse_signature,
    "tables": _parse_table,
    "shapes": _parse_shape,
    "setdiagrams": _parse_setdiagram,
    "passages": _parse_passage,
    "databases": _parse_database,
    "morphisms": _parse_morphism,
    "indexed": _parse_indexed,
}


# ---------------------------------------------------------------- commands


def _check_entry(name, ok, witness=None, counterexample=None):
    entry = {"name": name, "verdict": "pass" if ok else "fail"}
    if ok and witness is not None:
        entry["witness"] = witness
    if not ok and counterexample is not None:
        entry["counterexample"] = counterexample
    return entry


def _report(command, arguments, checks, result):
    verdict = "pass" if all(c["verdict"] == "pass" for c in checks) else "fail"
    return {"command": command, "arguments": arguments,
            "checks": checks, "result": result, "verdict": verdict}


def cmd_join(ws, name):
    db = ws.resolve("databases", name, "join")
    res = limit_tbl(db)
    legs = [[label(r), _table_morphism_payload(res.cone.legs[r])]
            for r in sorted_values(res.cone.legs)]
    checks = [_check_entry("limit cone over the table diagram", True,
                           witness={"legs": legs})]
    report = _report("join", {"database": name}, checks,
                     {"table": _table_payload(res.vertex)})
    return report, 0, res.vertex


def cmd_sum(ws, name):
    db = ws.resolve("databases", name, "sum")
    res = colimit_tbl(db)
    legs = [[label(r), _table_morphism_payload(res.cone.legs[r])]
            for r in sorted_values(res.cone.legs)]
    checks = [_check_entry("colimit cocone over the table diagram", True,
                           witness={"legs": legs})]
    report = _report("sum", {"database": name}, checks,
                     {"table": _table_payload(res.vertex)})
    return report, 0, res.vertex


def cmd_project(ws, name, which):
    db = ws.resolve("databases", name, "project")
    sd = dom_projection(db)
    if which == "schema":
        sch = sign_projection(sd)
        result = {
            "which": which,
            "objects": [[r, {"columns": _signature_payload(sch.at(r))}]
                        for r in sch.shape.objects],
            "arrows": [[f, _mapping_payload(
                            sch.diagram.on_mor(f).index_map,
                            sch.diagram.on_mor(f).src.arity)]
                       for f in sch.shape.nonidentity_morphisms()],
        }
    elif which == "key":
        kp = key_projection(db)
        op = kp.source
        result = {
            "which": which,
            "objects": [[r, _set_payload(kp.on_obj(r))] for r in op.objects],
            "arrows": [[f, _fn_payload(kp.on_mor(f))]
                       for f in op.nonidentity_morphisms()],
        }
    else:
        dd = data_projection(sd)
        objects = []
        for r in dd.source.objects:
            dom = dd.on_obj(r)
            objects.append([r, {"sorts": sorted(dom.sorts),
                                "values": sorted(dom.values),
                                "incidence": [[y, x] for y, x
                                              in sorted(dom.incidence)]}])
        result = {"which": which, "objects": objects}
    checks = [_check_entry("%s projection well-formed" % which, True)]
    report = _report("project", {"database": name, "which": which},
                     checks, result)
    return report, 0, None


def cmd_limit(ws, name):
    sd = ws.resolve("setdiagrams", name, "limit")
    res = limit_in_set(sd)
    legs = [[label(r), _fn_payload(res.cone.legs[r])]
            for r in sorted_values(res.cone.legs)]
    checks = [_check_entry("limit cone in the category of finite sets", True,
                           witness={"legs": legs})]
    report = _report("limit", {"diagram": name}, checks,
                     {"vertex": _set_payload(res.vertex)})
    return report, 0, None


def cmd_colimit(ws, name):
    sd = ws.resolve("setdiagrams", name, "colimit")
    res = colimit_in_set(sd)
    legs = [[label(r), _fn_payload(res.cone.legs[r])]
            for r in sorted_values(res.cone.legs)]
    checks = [_check_entry("colimit cocone in the category of finite sets",
                           True, witness={"legs": legs})]
    report = _report("colimit", {"diagram": name}, checks,
                     {"vertex": _set_payload(res.vertex)})
    return report, 0, None


def cmd_kan(ws, direction, k_name, s_name):
    k = ws.resolve("passages", k_name, "kan")
    s = ws.resolve("setdiagrams", s_name, "kan")
    if s.source != k.source:
        raise ValidationError(
            "kan: diagram %r is not over the source shape of passage %r"
            % (s_name, k_name))
    ext = lan(k, s) if direction == "lan" else ran(k, s)
    connector = [[x, _fn_payload(ext.connector.at(x))]
                 for x in k.source.objects]
    checks = [_check_entry("%s extension with universal connector" % direction,
                           True, witness={"connector": connector})]
    result = {
        "direction": direction,
        "extension": {
            "objects": [[y, _set_payload(ext.passage.on_obj(y))]
                        for y in k.target.objects],
            "arrows": [[g, _fn_payload(ext.passage.on_mor(g))]
                       for g in k.target.nonidentity_morphisms()],
        },
    }
    report = _report("kan", {"direction": direction, "functor": k_name,
                             "diagram": s_name}, checks, result)
    return report, 0, None


def cmd_check(ws, name):
    m = ws.resolve("morphisms", name, "check")
    rep = check_database_morphism(m)
    if rep.ok:
        checks = [_check_entry(
            "database morphism laws", True,
            witness="all components and naturality squares hold")]
        code = 0
    else:
        checks = [_check_entry("database morphism laws", False,
                               counterexample=f) for f in rep.failures]
        code = 1
    return _report("check", {"morphism": name}, checks, None), code, None


def cmd_groth(ws, name):
    ix = ws.resolve("indexed", name, "groth")
    gt = grothendieck(ix)
    projection = {
        "objects": [[o, gt.projection.on_obj(o)] for o in gt.total.objects],
        "morphisms": [[f, gt.projection.on_mor(f)]
                      for f in sorted(gt.total.morphisms)],
    }
    checks = [_check_entry("flattened total category laws", True)]
    result = {"convention": gt.convention,
              "category": _shape_payload(gt.total),
              "projection": projection}
    return _report("groth", {"indexed": name}, checks, result), 0, None


def cmd_validate(ws, name):
    kind, obj = ws.find(name)
    if kind == "morphisms":
        rep = check_database_morphism(obj)
        if rep.ok:
            checks = [_check_entry("database morphism laws", True,
                                   witness="re-verified from scratch")]
            code = 0
        else:
            checks = [_check_entry("database morphism laws", False,
                                   counterexample=f) for f in rep.failures]
            code = 1
    else:
        checks = [_check_entry("%s validator" % _SINGULAR[kind], True,
                               witness="validated on load")]
        code = 0
    report = _report("validate", {"entity": name}, checks, {"kind": kind})
    return report, code, None


# --------------------------------------------------------------- interface


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="catdb",
        description="Run categorical-database constructions from a "
                    "workspace document.")
    parser.add_argument("--workspace", required=True,
                        help="path to the workspace JSON document")
    parser.add_argument("--out",
                        help="write the report to this file instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default="json",
                        help="output format; csv is available for table "
                             "results only")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("join", help="limit of a database's table diagram")
    p.add_argument("database")
    p = sub.add_parser("sum", help="colimit of a database's table diagram")
    p.add_argument("database")
    p = sub.add_parser("project", help="one layer of a database")
    p.add_argument("database")
    p.add_argument("which", choices=("schema", "key", "data"))
    p = sub.add_parser("limit", help="limit of a set-valued diagram")
    p.add_argument("diagram")
    p = sub.add_parser("colimit", help="colimit of a set-valued diagram")
    p.add_argument("diagram")
    p = sub.add_parser("kan", help="left or right Kan extension")
    p.add_argument("direction", choices=("lan", "ran"))
    p.add_argument("functor")
    p.add_argument("diagram")
    p = sub.add_parser("check", help="re-verify a database morphism")
    p.add_argument("morphism")
    p = sub.add_parser("groth", help="flatten an indexed fibration")
    p.add_argument("indexed")
    p = sub.add_parser("validate", help="re-run one entity's validator")
    p.add_argument("entity")
    return parser


def _dispatch(ws, args):
    if args.command == "join":
        return cmd_join(ws, args.database)
    if args.command == "sum":
        return cmd_sum(ws, args.database)
    if args.command == "project":
        return cmd_project(ws, args.database, args.which)
    if args.command == "limit":
        return cmd_limit(ws, args.diagram)
    if args.command == "colimit":
        return cmd_colimit(ws, args.diagram)
    if args.command == "kan":
        return cmd_kan(ws, args.direction, args.functor, args.diagram)
    if args.command == "check":
        return cmd_check(ws, args.morphism)
    if args.command == "groth":
        return cmd_groth(ws, args.indexed)
    return cmd_validate(ws, args.entity)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        ws = parse_workspace(args.workspace)
        report, code, table = _dispatch(ws, args)
    except WorkspaceError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except CategoryError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    if args.format == "csv":
        if table is None:
            print("error: csv output is only available for table results",
                  file=sys.stderr)
            return 2
        text = table_csv(table)
    else:
        text = canonical_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
