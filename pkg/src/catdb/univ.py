"""Universal constructions over the table stack.

Joins of databases are limits and sums are colimits of their table diagrams;
this module computes both, along with database-level (co)products, Kan
extensions of set-valued diagrams, indexed adjunctions flattened into a total
category, and a brute-force universality oracle that every structured
construction can be checked against.  Each construction returns its cone
together with a mediator procedure, so universal properties are executable
claims rather than comments.
"""

import itertools
import math

from .fincat import (
    Bridge,
    CategoryError,
    CategoryInterface,
    Cone,
    EndpointMismatch,
    FinCategory,
    OppositeInterface,
    Passage,
    all_bridges,
    all_passages,
    bridges_equal,
    comma_category,
    compose_passages,
    constant_passage,
    coproduct_injections,
    empty_category,
    identity_bridge,
    identity_passage,
    opposite,
    opposite_passage,
    pair_id,
    pullback_category,
    terminal_category,
    vertical_compose,
    whisker_left,
)
from .tables import (
    AdjunctionWitness,
    ListMor,
    MissingAdjunctionWitness,
    SET,
    SetFn,
    SigMorphism,
    Signature,
    SignedDomain,
    Table,
    TableMorphism,
    TblA,
    identity_infomorphism,
    sorted_values,
    tuple_get,
    tuple_make,
    value_key,
)
from .diagrams import (
    Database,
    DatabaseMorphism,
    compose_database_morphisms,
    database_from_tables,
    dom_projection,
    identity_database_morphism,
    key_projection,
    sign_projection,
)


# ------------------------------------------------------------------- errors


class NoMediator(CategoryError):
    """A candidate (co)cone does not factor through the universal one."""


class NonUniqueMediator(CategoryError):
    """More than one factorization was found; signals an internal error."""


class SortGluingConflict(CategoryError):
    """A signature colimit tried to glue columns of different sorts."""


class TupleGluingInconsistent(CategoryError):
    """A key class carries conflicting values; the input database is invalid."""


class StrictnessViolation(CategoryError):
    """An indexed adjunction's transports are not strictly functorial."""


class FiberNotCocomplete(CategoryError):
    """A fiber lacks a (co)limit required by the structured recipe."""


class NoUniversalCone(CategoryError):
    """Exhaustive search found no universal (co)cone."""


class UnsupportedVaryingTypeDomains(CategoryError):
    """The requested construction needs all tables over one type domain."""


# ------------------------------------------------------------------ results


class LimitResult:
    """A universal (co)cone plus its mediating-morphism procedure.

    ``cone`` is a validated :class:`~catdb.fincat.Cone`; ``mediator`` takes a
    candidate cone with the same diagram and returns the unique morphism
    factoring it (raising :class:`NoMediator` / :class:`NonUniqueMediator`).
    """

    def __init__(self, cone, mediator):
        self.cone = cone
        self.mediator = mediator

    @property
    def vertex(self):
        return self.cone.vertex

    def __repr__(self):
        kind = "colimit" if self.cone.colimit else "limit"
        return "LimitResult(%s, vertex=%r)" % (kind, self.cone.vertex)


def _family(pairs):
    """Canonical association tuple for a finite assignment."""
    return tuple(sorted(pairs, key=lambda kv: value_key(kv[0])))


def _union_find(elements, pairs):
    """Quotient by the relation generated by ``pairs``; maps each element to
    the least member of its class."""
    parent = {x: x for x in elements}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    classes = {}
    for x in elements:
        classes.setdefault(find(x), []).append(x)
    rep = {}
    for members in classes.values():
        least = min(members, key=value_key)
        for m in members:
            rep[m] = least
    return rep


def _arrows_of(shape):
    return [(f,) + tuple(shape.morphisms[f])
            for f in shape.nonidentity_morphisms()]


# ------------------------------------------------------- limits in Set


def limit_in_set(diagram):
    """Limit of a finite diagram of finite sets.

    Elements of the limit are the arrow-compatible families, stored as
    association tuples keyed by shape object.
    """
    shape = diagram.source
    objs = sorted_values(shape.objects)
    arrows = _arrows_of(shape)
    fams = []
    for combo in itertools.product(*(sorted_values(diagram.on_obj(r))
                                     for r in objs)):
        fam = dict(zip(objs, combo))
        if all(diagram.on_mor(f)(fam[s]) == fam[t] for f, s, t in arrows):
            fams.append(_family(fam.items()))
    vertex = frozenset(fams)
    legs = {r: SetFn(vertex, diagram.on_obj(r),
                     {fam: tuple_get(fam, r) for fam in fams})
            for r in objs}
    cone = Cone(diagram, vertex, legs)

    def mediator(candidate):
        mapping = {}
        for v in candidate.vertex:
            fam = _family((r, candidate.legs[r](v)) for r in objs)
            if fam not in vertex:
                raise NoMediator(
                    "legs send %r to an incompatible family" % (v,))
            mapping[v] = fam
        return SetFn(candidate.vertex, vertex, mapping)

    return LimitResult(cone, mediator)


def colimit_in_set(diagram):
    """Colimit of a finite diagram of finite sets.

    Elements are glued by union-find over the tagged disjoint union; each
    class is named by its least tagged member.
    """
    shape = diagram.source
    objs = sorted_values(shape.objects)
    tagged = [(r, x) for r in objs for x in sorted_values(diagram.on_obj(r))]
    links = []
    for f in shape.nonidentity_morphisms():
        s, t = shape.morphisms[f]
        fn = diagram.on_mor(f)
        for x in diagram.on_obj(s):
            links.append(((s, x), (t, fn(x))))
    rep = _union_find(tagged, links)
    vertex = frozenset(rep.values())
    legs = {r: SetFn(diagram.on_obj(r), vertex,
                     {x: rep[(r, x)] for x in diagram.on_obj(r)})
            for r in objs}
    cone = Cone(diagram, vertex, legs, colimit=True)
    members = {}
    for tag, c in rep.items():
        members.setdefault(c, []).append(tag)

    def mediator(candidate):
        mapping = {}
        for c, mem in members.items():
            images = {candidate.legs[r](x) for (r, x) in mem}
            if len(images) != 1:
                raise NoMediator(
                    "cocone legs disagree on the class of %r" % (c,))
            mapping[c] = images.pop()
        return SetFn(vertex, candidate.vertex, mapping)

    return LimitResult(cone, mediator)


# -------------------------------------------------- limits of signatures


def colimit_in_listX(diagram):
    """Colimit of a diagram of signatures over one sort set.

    Columns are glued along the reindexings; every class must be sort-pure
    (:class:`SortGluingConflict` otherwise) and is named by its least tagged
    member.
    """
    shape = diagram.source
    lx = diagram.target
    objs = sorted_values(shape.objects)
    tagged = [(r, i) for r in objs
              for i in sorted_values(diagram.on_obj(r).arity)]
    links = []
    for f in shape.nonidentity_morphisms():
        s, t = shape.morphisms[f]
        h = diagram.on_mor(f)
        for i in h.src.arity:
            links.append(((s, i), (t, h.index_map[i])))
    rep = _union_find(tagged, links)
    members = {}
    for tag, c in rep.items():
        members.setdefault(c, []).append(tag)
    sorts = {}
    for c, mem in members.items():
        got = {diagram.on_obj(r).sorts[i] for (r, i) in mem}
        if len(got) != 1:
            raise SortGluingConflict(
                "glued column %r mixes sorts %r" % (c, sorted_values(got)))
        sorts[c] = got.pop()
    vertex = Signature(sorts, sorts, lx.sort_set)
    legs = {r: SigMorphism(diagram.on_obj(r), vertex,
                           {i: rep[(r, i)]
                            for i in diagram.on_obj(r).arity})
            for r in objs}
    cone = Cone(diagram, vertex, legs, colimit=True)

    def mediator(candidate):
        index_map = {}
        for c, mem in members.items():
            images = {candidate.legs[r].index_map[i] for (r, i) in mem}
            if len(images) != 1:
                raise NoMediator(
                    "cocone legs disagree on glued column %r" % (c,))
            index_map[c] = images.pop()
        try:
            return SigMorphism(vertex, candidate.vertex, index_map)
        except CategoryError as exc:
            raise NoMediator(str(exc)) from exc

    return LimitResult(cone, mediator)


def limit_in_listX(diagram):
    """Limit of a diagram of signatures over one sort set.

    Signatures over X decompose sortwise, so the limit is computed fiberwise:
    a column of the limit is a sort together with a compatible family of
    columns of that sort.  The empty diagram yields the terminal signature
    (one column per sort).
    """
    shape = diagram.source
    lx = diagram.target
    objs = sorted_values(shape.objects)
    arrows = _arrows_of(shape)
    sorts = {}
    for x in sorted_values(lx.sort_set):
        per = []
        for r in objs:
            sig = diagram.on_obj(r)
            per.append(sorted_values(i for i in sig.arity
                                     if sig.sorts[i] == x))
        for combo in itertools.product(*per):
            fam = dict(zip(objs, combo))
            if all(diagram.on_mor(f).index_map[fam[s]] == fam[t]
                   for f, s, t in arrows):
                sorts[(x, _family(fam.items()))] = x
    vertex = Signature(sorts, sorts, lx.sort_set)
    legs = {r: SigMorphism(vertex, diagram.on_obj(r),
                           {col: tuple_get(col[1], r)
                            for col in vertex.arity})
            for r in objs}
    cone = Cone(diagram, vertex, legs)

    def mediator(candidate):
        index_map = {}
        for j in candidate.vertex.arity:
            col = (candidate.vertex.sorts[j],
                   _family((r, candidate.legs[r].index_map[j])
                           for r in objs))
            if col not in vertex.arity:
                raise NoMediator(
                    "column %r maps to an incompatible family" % (j,))
            index_map[j] = col
        return SigMorphism(candidate.vertex, vertex, index_map)

    return LimitResult(cone, mediator)


def colimit_in_list(diagram):
    """Colimit of a diagram of signatures over varying sort sets: glue the
    sort sets and the columns simultaneously."""
    shape = diagram.source
    objs = sorted_values(shape.objects)
    tagged_sorts = [(r, x) for r in objs
                    for x in sorted_values(diagram.on_obj(r).sort_set)]
    tagged_cols = [(r, i) for r in objs
                   for i in sorted_values(diagram.on_obj(r).arity)]
    sort_links, col_links = [], []
    for f in shape.nonidentity_morphisms():
        s, t = shape.morphisms[f]
        h = diagram.on_mor(f)
        for x in h.src.sort_set:
            sort_links.append(((s, x), (t, h.sort_fn[x])))
        for i in h.src.arity:
            col_links.append(((s, i), (t, h.index_map[i])))
    sort_rep = _union_find(tagged_sorts, sort_links)
    col_rep = _union_find(tagged_cols, col_links)
    members = {}
    for tag, c in col_rep.items():
        members.setdefault(c, []).append(tag)
    sorts = {}
    for (r, i), c in col_rep.items():
        s = sort_rep[(r, diagram.on_obj(r).sorts[i])]
        if c in sorts and sorts[c] != s:
            raise SortGluingConflict("glued column %r mixes sort classes" % (c,))
        sorts[c] = s
    vertex = Signature(sorts, sorts, frozenset(sort_rep.values()))
    legs = {r: ListMor(diagram.on_obj(r), vertex,
                       {i: col_rep[(r, i)]
                        for i in diagram.on_obj(r).arity},
                       {x: sort_rep[(r, x)]
                        for x in diagram.on_obj(r).sort_set})
            for r in objs}
    cone = Cone(diagram, vertex, legs, colimit=True)
    sort_members = {}
    for tag, c in sort_rep.items():
        sort_members.setdefault(c, []).append(tag)

    def mediator(candidate):
        index_map, sort_fn = {}, {}
        for c, mem in members.items():
            images = {candidate.legs[r].index_map[i] for (r, i) in mem}
            if len(images) != 1:
                raise NoMediator("cocone legs disagree on column %r" % (c,))
            index_map[c] = images.pop()
        for c, mem in sort_members.items():
            images = {candidate.legs[r].sort_fn[x] for (r, x) in mem}
            if len(images) != 1:
                raise NoMediator("cocone legs disagree on sort %r" % (c,))
            sort_fn[c] = images.pop()
        try:
            return ListMor(vertex, candidate.vertex, index_map, sort_fn)
        except CategoryError as exc:
            raise NoMediator(str(exc)) from exc

    return LimitResult(cone, mediator)


# ------------------------------------------------- canonical table forms


def canonical_table(t):
    """Deterministic relabeling of a table's columns and keys.

    Isomorphic tables over the same type domain canonicalize to equal tables.
    Columns are grouped by (sort, multiset of column values); residual ties
    are broken by trying every permutation inside each tie group and keeping
    the lexicographically least row encoding, so the result does not depend
    on the original labels.  Returns ``(table, key_rename, column_rename)``.
    """
    cols = sorted_values(t.sig.arity)
    keys = sorted_values(t.keys)

    def profile(i):
        return (value_key(t.sig.sorts[i]),
                tuple(sorted(value_key(tuple_get(t.tuples[k], i))
                             for k in keys)))

    groups = {}
    for i in cols:
        groups.setdefault(profile(i), []).append(i)
    ordered = [groups[p] for p in sorted(groups)]
    ways = 1
    for g in ordered:
        ways *= math.factorial(len(g))
    if ways > 40320:
        raise CategoryError(
            "column tie groups too large to canonicalize (%d orderings)" % ways)
    best = None
    for perms in itertools.product(*(itertools.permutations(g)
                                     for g in ordered)):
        col_seq = [i for block in perms for i in block]
        rows = sorted((tuple(value_key(tuple_get(t.tuples[k], i))
                             for i in col_seq), value_key(k), k)
                      for k in keys)
        enc = tuple(r[0] for r in rows)
        if best is None or enc < best[0]:
            best = (enc, col_seq, [r[2] for r in rows])
    _, col_seq, key_seq = best if best is not None else ((), [], [])
    col_rename = {i: "c%d" % n for n, i in enumerate(col_seq)}
    key_rename = {k: "k%d" % n for n, k in enumerate(key_seq)}
    sig = Signature(col_rename.values(),
                    {col_rename[i]: t.sig.sorts[i] for i in cols},
                    t.sig.sort_set)
    tuples = {key_rename[k]: tuple_make({col_rename[i]:
                                         tuple_get(t.tuples[k], i)
                                         for i in cols})
              for k in keys}
    table = Table(SignedDomain(sig, t.domain), key_rename.values(), tuples)
    return table, key_rename, col_rename


def table_iso(t1, t2):
    """An explicit isomorphism ``t1 -> t2`` over one type domain, or None.

    Both tables are canonicalized; equality of the canonical forms yields the
    witness by composing the renamings.
    """
    c1, keys1, cols1 = canonical_table(t1)
    c2, keys2, cols2 = canonical_table(t2)
    if c1 != c2:
        return None
    back_keys = {v: k for k, v in keys2.items()}
    back_cols = {v: i for i, v in cols1.items()}
    sig_mor = SigMorphism(t2.sig, t1.sig,
                          {j: back_cols[cols2[j]] for j in t2.sig.arity})
    key_map = {k: back_keys[keys1[k]] for k in t1.keys}
    return TableMorphism(t1, t2, sig_mor, key_map)


# --------------------------------------------------------- joins and sums


def _require_fixed(db, op):
    """Return a fixed-domain presentation of ``db`` or refuse.

    A general database qualifies only when every table lives over one shared
    type domain and every arrow's infomorphism is the identity; anything else
    raises :class:`UnsupportedVaryingTypeDomains`.
    """
    if db.domain is not None:
        return db
    objs = list(db.shape.objects)
    if not objs:
        raise UnsupportedVaryingTypeDomains(
            "%s needs a type domain; the empty general database does not "
            "determine one" % op)
    domains = {db.at(r).domain for r in objs}
    if len(domains) != 1:
        raise UnsupportedVaryingTypeDomains(
            "%s is only defined over a single type domain; found %d"
            % (op, len(domains)))
    domain = domains.pop()
    ident = identity_infomorphism(domain)
    arrows = {}
    for f in db.shape.nonidentity_morphisms():
        gm = db.arrow(f)
        if gm.dom_mor.info != ident:
            raise UnsupportedVaryingTypeDomains(
                "%s cannot cross the infomorphism on arrow %r" % (op, f))
        arrows[f] = TableMorphism(gm.src, gm.tgt,
                                  SigMorphism(gm.tgt.sig, gm.src.sig,
                                              gm.dom_mor.index_map),
                                  gm.key_map)
    tables = {r: db.at(r) for r in objs}
    return database_from_tables(db.shape, tables, arrows, domain)


def limit_tbl(db):
    """The join of a database: the limit of its table diagram.

    Keys are the arrow-compatible families of keys that glue to a single
    tuple on the colimit signature; the empty shape therefore yields the
    terminal table (no columns, one key).  The returned legs project a glued
    key family to its components, and the mediator pairs a candidate cone's
    keys while mediating its signature cocone.
    """
    db = _require_fixed(db, "limit_tbl")
    sign = sign_projection(dom_projection(db))
    scol = colimit_in_listX(sign.diagram)
    klim = limit_in_set(key_projection(db))
    objs = sorted_values(db.shape.objects)
    members = {}
    for r in objs:
        inj = scol.cone.legs[r]
        for i in db.at(r).sig.arity:
            members.setdefault(inj.index_map[i], []).append((r, i))
    keep, tuples = [], {}
    for fam in sorted_values(klim.cone.vertex):
        values, ok = {}, True
        for c, mem in members.items():
            got = {tuple_get(db.at(r).tuples[tuple_get(fam, r)], i)
                   for (r, i) in mem}
            if len(got) != 1:
                ok = False
                break
            values[c] = got.pop()
        if ok:
            keep.append(fam)
            tuples[fam] = tuple_make(values)
    join = Table(SignedDomain(scol.cone.vertex, db.domain), keep, tuples)
    legs = {r: TableMorphism(join, db.at(r), scol.cone.legs[r],
                             {fam: tuple_get(fam, r) for fam in keep})
            for r in objs}
    cone = Cone(db.diagram, join, legs)
    key_set = frozenset(keep)

    def mediator(candidate):
        try:
            sig_cocone = Cone(sign.diagram, candidate.vertex.sig,
                              {r: candidate.legs[r].sig_mor for r in objs},
                              colimit=True)
        except CategoryError as exc:
            raise NoMediator(
                "candidate legs do not form a signature cocone: %s"
                % exc) from exc
        u = scol.mediator(sig_cocone)
        key_map = {}
        for v in candidate.vertex.keys:
            fam = _family((r, candidate.legs[r].key_map[v]) for r in objs)
            if fam not in key_set:
                raise NoMediator(
                    "keys of %r do not reach a glued family" % (v,))
            key_map[v] = fam
        try:
            return TableMorphism(candidate.vertex, join, u, key_map)
        except CategoryError as exc:
            raise NoMediator(str(exc)) from exc

    return LimitResult(cone, mediator)


def colimit_tbl(db):
    """The sum of a database: the colimit of its table diagram.

    The signature is the limit of the signature diagram, the keys are the
    colimit of the key diagram, and each key class carries the common
    restriction of its members' tuples — disagreement means the input
    database was invalid and raises :class:`TupleGluingInconsistent`.
    The empty shape yields the terminal signature with no keys.
    """
    db = _require_fixed(db, "colimit_tbl")
    sign = sign_projection(dom_projection(db))
    slim = limit_in_listX(sign.diagram)
    kcol = colimit_in_set(key_projection(db))
    objs = sorted_values(db.shape.objects)
    members = {}
    for r in objs:
        leg = kcol.cone.legs[r]
        for k in db.at(r).keys:
            members.setdefault(leg(k), []).append((r, k))
    tuples = {}
    for c, mem in members.items():
        values = {}
        for col in slim.cone.vertex.arity:
            got = {tuple_get(db.at(r).tuples[k],
                             slim.cone.legs[r].index_map[col])
                   for (r, k) in mem}
            if len(got) != 1:
                raise TupleGluingInconsistent(
                    "key class %r carries conflicting values in column %r"
                    % (c, col))
            values[col] = got.pop()
        tuples[c] = tuple_make(values)
    total = Table(SignedDomain(slim.cone.vertex, db.domain),
                  members.keys(), tuples)
    legs = {r: TableMorphism(db.at(r), total, slim.cone.legs[r],
                             {k: kcol.cone.legs[r](k)
                              for k in db.at(r).keys})
            for r in objs}
    cone = Cone(db.diagram, total, legs, colimit=True)

    def mediator(candidate):
        try:
            sig_cone = Cone(sign.diagram, candidate.vertex.sig,
                            {r: candidate.legs[r].sig_mor for r in objs})
        except CategoryError as exc:
            raise NoMediator(
                "candidate legs do not form a signature cone: %s"
                % exc) from exc
        u = slim.mediator(sig_cone)
        key_map = {}
        for c, mem in members.items():
            images = {candidate.legs[r].key_map[k] for (r, k) in mem}
            if len(images) != 1:
                raise NoMediator(
                    "cocone legs disagree on key class %r" % (c,))
            key_map[c] = images.pop()
        try:
            return TableMorphism(total, candidate.vertex, u, key_map)
        except CategoryError as exc:
            raise NoMediator(str(exc)) from exc

    return LimitResult(cone, mediator)


def lim_passage_on_morphism(m, src_result=None, tgt_result=None):
    """Functorial action of the join on a database morphism.

    For ``m: X -> Y`` the composites of X's join legs with m's components
    form a cone over Y's diagram; the returned table morphism
    ``join(X) -> join(Y)`` is its unique mediation.  Precomputed joins may be
    passed to avoid recomputation.
    """
    jx = src_result if src_result is not None else limit_tbl(m.src)
    jy = tgt_result if tgt_result is not None else limit_tbl(m.tgt)
    ta = m.tgt.diagram.target
    legs = {r: ta.compose(jx.cone.legs[m.shape.on_obj(r)], m.bridge.at(r))
            for r in m.tgt.shape.objects}
    candidate = Cone(m.tgt.diagram, jx.cone.vertex, legs)
    return jy.mediator(candidate)


# -------------------------------------------- databases as a category


def passages_pointwise_equal(p, q):
    """Equality of two passages out of one finite category, by images."""
    if p.source != q.source:
        return False
    return (all(p.on_obj(x) == q.on_obj(x) for x in p.source.objects)
            and all(p.on_mor(f) == q.on_mor(f) for f in p.source.morphisms))


def db_morphisms_equal(m1, m2):
    return (m1.src == m2.src and m1.tgt == m2.tgt
            and passages_pointwise_equal(m1.shape, m2.shape)
            and bridges_equal(m1.bridge, m2.bridge))


class DbCat(CategoryInterface):
    """Databases over one type domain, with brute-force hom enumeration.

    ``hom(a, b)`` walks every shape passage and every componentwise choice of
    table morphisms, keeping the natural ones; this is how mediator
    uniqueness becomes an exhaustively tested claim.
    """

    def __init__(self, domain):
        self.domain = domain
        self.tables = TblA(domain)

    def obj_eq(self, a, b):
        return a == b

    def mor_eq(self, f, g):
        return db_morphisms_equal(f, g)

    def identity(self, a):
        return identity_database_morphism(a)

    def compose(self, f, g):
        return compose_database_morphisms(f, g)

    def source(self, f):
        return f.src

    def target(self, f):
        return f.tgt

    def hom(self, a, b):
        out = []
        for p in all_passages(b.shape, a.shape):
            per_obj = []
            feasible = True
            for r in sorted_values(b.shape.objects):
                opts = self.tables.hom(a.at(p.on_obj(r)), b.at(r))
                if not opts:
                    feasible = False
                    break
                per_obj.append((r, opts))
            if not feasible:
                continue
            for combo in itertools.product(*(opts for _, opts in per_obj)):
                comps = {r: c for (r, _), c in zip(per_obj, combo)}
                try:
                    out.append(DatabaseMorphism(a, b, p, comps))
                except CategoryError:
                    pass
        return out

    def __eq__(self, other):
        return isinstance(other, DbCat) and self.domain == other.domain


class CxtCat(CategoryInterface):
    """Finite categories and the passages between them."""

    def obj_eq(self, a, b):
        return a == b

    def mor_eq(self, f, g):
        return passages_pointwise_equal(f, g) and f.target == g.target

    def identity(self, a):
        return identity_passage(a)

    def compose(self, f, g):
        return compose_passages(f, g)

    def source(self, f):
        return f.source

    def target(self, f):
        return f.target

    def hom(self, a, b):
        return all_passages(a, b)

    def __eq__(self, other):
        return isinstance(other, CxtCat)


def shape_projection(domain):
    """The passage reading off a database's shape.

    The shape part of a database morphism runs against the morphism, so this
    lands in the opposite of the category of finite contexts.
    """
    return Passage(DbCat(domain), OppositeInterface(CxtCat()),
                   lambda db: db.shape, lambda m: m.shape)


def db_initial(domain):
    """The empty-shape database.

    It plays the initial role in the opposite orientation: in the direction
    implemented here every database has exactly one morphism *into* it.
    """
    shape = empty_category()
    diagram = Passage(opposite(shape), TblA(domain), {}, {})
    return Database(shape, diagram, domain)


def db_initial_morphism(db):
    """The unique morphism from ``db`` into the empty-shape database."""
    if db.domain is None:
        raise UnsupportedVaryingTypeDomains(
            "db_initial_morphism needs a fixed type domain")
    target = db_initial(db.domain)
    shape = Passage(target.shape, db.shape, {}, {})
    return DatabaseMorphism(db, target, shape, {})


class DbCoproduct:
    """A database sum: disjoint-union shape with the original tables.

    ``to_first`` and ``to_second`` are the canonical morphisms out of the sum
    (the injections read in the opposite orientation); ``mediate`` produces
    the unique morphism through the sum for any pair of morphisms with a
    common source.
    """

    def __init__(self, db, to_first, to_second):
        self.db = db
        self.to_first = to_first
        self.to_second = to_second

    def mediate(self, n1, n2):
        """The unique ``u: Y -> sum`` with ``compose(u, to_i) == n_i``."""
        source = n1.src
        if n2.src != source:
            raise EndpointMismatch(
                "the two morphisms start from different databases")
        if n1.tgt != self.to_first.tgt or n2.tgt != self.to_second.tgt:
            raise EndpointMismatch(
                "the morphisms do not target the two summands")
        obj_map, mor_map, comps = {}, {}, {}
        for n, canon in ((n1, self.to_first), (n2, self.to_second)):
            inj = canon.shape
            for r in n.tgt.shape.objects:
                obj_map[inj.on_obj(r)] = n.shape.on_obj(r)
                comps[inj.on_obj(r)] = n.bridge.at(r)
            for f in n.tgt.shape.morphisms:
                mor_map[inj.on_mor(f)] = n.shape.on_mor(f)
        shape = Passage(self.db.shape, source.shape, obj_map, mor_map)
        return DatabaseMorphism(source, self.db, shape, comps)


def db_coproduct(db1, db2):
    """The sum of two databases over one type domain."""
    if db1.domain is None or db1.domain != db2.domain:
        raise UnsupportedVaryingTypeDomains(
            "database sums need one shared type domain")
    ta = TblA(db1.domain)
    cop, in1, in2 = coproduct_injections(db1.shape, db2.shape)
    obj_map, mor_map = {}, {}
    for dbi, inj in ((db1, in1), (db2, in2)):
        for r in dbi.shape.objects:
            obj_map[inj.on_obj(r)] = dbi.at(r)
        for f in dbi.shape.morphisms:
            mor_map[inj.on_mor(f)] = dbi.diagram.on_mor(f)
    diagram = Passage(opposite(cop), ta, obj_map, mor_map)
    db = Database(cop, diagram, db1.domain)
    to_first = DatabaseMorphism(
        db, db1, in1, {r: ta.identity(db1.at(r)) for r in db1.shape.objects})
    to_second = DatabaseMorphism(
        db, db2, in2, {r: ta.identity(db2.at(r)) for r in db2.shape.objects})
    return DbCoproduct(db, to_first, to_second)


class DbProduct:
    """A database product over the pullback of the two table diagrams.

    The shape pairs exactly the objects and arrows whose tables agree on the
    nose, and the canonical morphisms ``from_first``/``from_second`` carry
    identity components.  ``mediate`` factors a pair of morphisms with a
    common target when — and only when — their shape images stay inside the
    pullback and their components coincide; incompatible pairs raise
    :class:`NoMediator`.
    """

    def __init__(self, db, from_first, from_second):
        self.db = db
        self.from_first = from_first
        self.from_second = from_second

    def mediate(self, n1, n2):
        """The unique ``u: product -> Y`` with ``compose(from_i, u) == n_i``."""
        target = n1.tgt
        if n2.tgt != target:
            raise EndpointMismatch(
                "the two morphisms end in different databases")
        if n1.src != self.from_first.src or n2.src != self.from_second.src:
            raise EndpointMismatch(
                "the morphisms do not start from the two factors")
        pshape = self.db.shape
        obj_map, mor_map, comps = {}, {}, {}
        for r in target.shape.objects:
            o = pair_id(n1.shape.on_obj(r), n2.shape.on_obj(r))
            if o not in pshape.objects:
                raise NoMediator(
                    "the paired shape images leave the pullback at %r" % (r,))
            obj_map[r] = o
            a, b = n1.bridge.at(r), n2.bridge.at(r)
            if a != b:
                raise NoMediator("component bridges disagree at %r" % (r,))
            comps[r] = a
        for f in target.shape.morphisms:
            mf = pair_id(n1.shape.on_mor(f), n2.shape.on_mor(f))
            if mf not in pshape.morphisms:
                raise NoMediator(
                    "paired arrow images disagree over the tables at %r"
                    % (f,))
            mor_map[f] = mf
        try:
            shape = Passage(target.shape, pshape, obj_map, mor_map)
            return DatabaseMorphism(self.db, target, shape, comps)
        except CategoryError as exc:
            raise NoMediator(str(exc)) from exc


def db_product(db1, db2):
    """The product of two databases, over the pullback of their diagrams."""
    if db1.domain is None or db1.domain != db2.domain:
        raise UnsupportedVaryingTypeDomains(
            "database products need one shared type domain")
    ta = TblA(db1.domain)
    pcat, p1, p2 = pullback_category(db1.diagram, db2.diagram)
    shape = opposite(pcat)
    diagram = compose_passages(p1, db1.diagram)
    db = Database(shape, diagram, db1.domain)
    from_first = DatabaseMorphism(
        db1, db, opposite_passage(p1),
        {o: ta.identity(db.at(o)) for o in shape.objects})
    from_second = DatabaseMorphism(
        db2, db, opposite_passage(p2),
        {o: ta.identity(db.at(o)) for o in shape.objects})
    return DbProduct(db, from_first, from_second)


# ----------------------------------------------------- finite snapshots


class Snapshot:
    """A finite full subcategory materialized as a :class:`FinCategory`.

    ``category`` carries opaque label ids; ``decode_obj``/``decode_mor`` map
    them back to the ambient objects and morphisms, and ``obj_id`` finds the
    label of an ambient object.
    """

    def __init__(self, ambient, category, objects_by_id, morphisms_by_id):
        self.ambient = ambient
        self.category = category
        self._objects = objects_by_id
        self._morphisms = morphisms_by_id

    def decode_obj(self, i):
        return self._objects[i]

    def decode_mor(self, m):
        return self._morphisms[m]

    def obj_id(self, o):
        for i, obj in self._objects.items():
            if self.ambient.obj_eq(obj, o):
                return i
        raise CategoryError("object %r is not in the snapshot" % (o,))

    def mor_id(self, f):
        for m, mor in self._morphisms.items():
            if self.ambient.mor_eq(mor, f):
                return m
        raise CategoryError("morphism %r is not in the snapshot" % (f,))


def finite_snapshot(cat, objects):
    """Materialize the full subcategory of ``cat`` on ``objects``.

    The ambient category must enumerate hom-sets and label objects and
    morphisms unambiguously, which every category in this package does at
    desk scale.
    """
    objs = list(objects)
    ids = [cat.obj_label(o) for o in objs]
    if len(set(ids)) != len(ids):
        raise CategoryError("object labels collide; cannot snapshot")
    by_id = dict(zip(ids, objs))
    morphisms, store = {}, {}
    for la, a in zip(ids, objs):
        for lb, b in zip(ids, objs):
            for f in cat.hom(a, b):
                mid = pair_id(pair_id(la, lb), cat.mor_label(f))
                if mid in morphisms:
                    raise CategoryError(
                        "morphism labels collide at %r" % (mid,))
                morphisms[mid] = (la, lb)
                store[mid] = f
    def locate(s, t, f):
        for m, (ms, mt) in morphisms.items():
            if ms == s and mt == t and cat.mor_eq(store[m], f):
                return m
        raise CategoryError("snapshot is not closed under composition")
    identities = {la: locate(la, la, cat.identity(by_id[la])) for la in ids}
    table = {}
    for m, (s1, t1) in morphisms.items():
        for n, (s2, t2) in morphisms.items():
            if t1 == s2:
                table[(m, n)] = locate(s1, t2,
                                       cat.compose(store[m], store[n]))
    category = FinCategory(ids, morphisms, identities, table)
    return Snapshot(cat, category, by_id, store)


# ------------------------------------------------------ universal oracle


def _cone_pool(category, diagram, colim, candidates):
    shape = diagram.source
    objs = sorted_values(shape.objects)
    arrows = _arrows_of(shape)
    pool = []
    for v in candidates:
        per = []
        empty = False
        for r in objs:
            if colim:
                opts = list(category.hom(diagram.on_obj(r), v))
            else:
                opts = list(category.hom(v, diagram.on_obj(r)))
            if not opts:
                empty = True
                break
            per.append(opts)
        if empty:
            continue
        for combo in itertools.product(*per):
            legs = dict(zip(objs, combo))
            good = True
            for f, s, t in arrows:
                if colim:
                    ok = category.mor_eq(
                        category.compose(diagram.on_mor(f), legs[t]), legs[s])
                else:
                    ok = category.mor_eq(
                        category.compose(legs[s], diagram.on_mor(f)), legs[t])
                if not ok:
                    good = False
                    break
            if good:
                pool.append((v, legs))
    return objs, pool


def _factors_through(category, objs, colim, legs, h, other_legs):
    for r in objs:
        if colim:
            ok = category.mor_eq(category.compose(legs[r], h), other_legs[r])
        else:
            ok = category.mor_eq(category.compose(h, legs[r]), other_legs[r])
        if not ok:
            return False
    return True


def _mediators(category, objs, colim, vertex, legs, other_vertex, other_legs):
    if colim:
        hom = category.hom(vertex, other_vertex)
    else:
        hom = category.hom(other_vertex, vertex)
    return [h for h in hom
            if _factors_through(category, objs, colim, legs, h, other_legs)]


def oracle_universal(category, diagram, kind, candidates=None):
    """Exhaustive search for the universal (co)cone of a finite diagram.

    Every cone over every candidate vertex is enumerated, and a cone is kept
    only if every other cone factors through it exactly once.  ``candidates``
    defaults to all objects when the ambient category is finite; large
    categories must supply a finite vertex pool.  Finding several universal
    cones that are not isomorphic is an internal error and raises plainly.
    """
    if kind not in ("limit", "colimit"):
        raise CategoryError("kind must be 'limit' or 'colimit', got %r" % kind)
    colim = kind == "colimit"
    if candidates is None:
        if not isinstance(category, FinCategory):
            raise CategoryError(
                "supply candidate vertices for a non-finite ambient category")
        candidates = category.objects
    candidates = list(candidates)
    objs, pool = _cone_pool(category, diagram, colim, candidates)
    universal = []
    for v, legs in pool:
        good = True
        for w, wlegs in pool:
            if len(_mediators(category, objs, colim, v, legs, w, wlegs)) != 1:
                good = False
                break
        if good:
            universal.append((v, legs))
    if not universal:
        raise NoUniversalCone(
            "no universal %s among %d candidate vertices"
            % (kind, len(candidates)))
    v0, legs0 = universal[0]
    for v1, legs1 in universal[1:]:
        f = _mediators(category, objs, colim, v0, legs0, v1, legs1)[0]
        g = _mediators(category, objs, colim, v1, legs1, v0, legs0)[0]
        if colim:
            round1 = category.compose(f, g)
            round2 = category.compose(g, f)
        else:
            round1 = category.compose(g, f)
            round2 = category.compose(f, g)
        if not (category.mor_eq(round1, category.identity(v0))
                and category.mor_eq(round2, category.identity(v1))):
            raise CategoryError(
                "oracle bug: two non-isomorphic universal cones found")
    cone = Cone(diagram, v0, legs0, colimit=colim)

    def mediator(candidate):
        found = _mediators(category, objs, colim, v0, legs0,
                           candidate.vertex, candidate.legs)
        if not found:
            raise NoMediator("candidate cone does not factor")
        if len(found) > 1:
            raise NonUniqueMediator("%d factorizations found" % len(found))
        return found[0]

    return LimitResult(cone, mediator)


class ContinuityReport:
    """Outcome of a continuity check; ``ok`` plus a human-readable detail."""

    def __init__(self, ok, kind, details=""):
        self.ok = ok
        self.kind = kind
        self.details = details

    def __bool__(self):
        return self.ok

    def __repr__(self):
        state = "ok" if self.ok else "FAIL"
        tail = ": " + self.details if self.details else ""
        return "ContinuityReport(%s %s%s)" % (self.kind, state, tail)


def check_continuity(functor, diagram, kind,
                     source_candidates=None, target_candidates=None):
    """Does ``functor`` send the universal (co)cone of ``diagram`` to a
    universal one?  Returns a report instead of raising."""
    colim = kind == "colimit"
    try:
        upstream = oracle_universal(functor.source, diagram, kind,
                                    source_candidates)
    except NoUniversalCone as exc:
        return ContinuityReport(False, kind,
                                "no universal cone upstream: %s" % exc)
    image_diagram = compose_passages(diagram, functor)
    category = functor.target
    image_legs = {r: functor.on_mor(upstream.cone.legs[r])
                  for r in diagram.source.objects}
    image_vertex = functor.on_obj(upstream.cone.vertex)
    try:
        Cone(image_diagram, image_vertex, image_legs, colimit=colim)
    except CategoryError as exc:
        return ContinuityReport(False, kind,
                                "image is not even a cone: %s" % exc)
    if target_candidates is None:
        if not isinstance(category, FinCategory):
            return ContinuityReport(False, kind,
                                    "no target candidates supplied")
        target_candidates = list(category.objects)
    objs, pool = _cone_pool(category, image_diagram, colim, target_candidates)
    for w, wlegs in pool:
        n = len(_mediators(category, objs, colim,
                           image_vertex, image_legs, w, wlegs))
        if n != 1:
            return ContinuityReport(
                False, kind,
                "image cone admits %d factorizations from a cone at %r"
                % (n, w))
    return ContinuityReport(True, kind)


# --------------------------------------------------------- Kan extensions


class KanExtension:
    """A pointwise Kan extension.

    ``passage`` is the extended diagram, ``connector`` the comparison bridge
    (the unit for left extensions, the counit for right ones) and ``factor``
    the universal factorization procedure.
    """

    def __init__(self, kind, passage, connector, factor, pointwise=None):
        self.kind = kind
        self.passage = passage
        self.connector = connector
        self.factor = factor
        self._pointwise = pointwise

    def __repr__(self):
        return "KanExtension(%s)" % self.kind


def _comma_under(k_passage, c1):
    """The category of objects over ``c1`` through ``k_passage``."""
    point = terminal_category()
    const = constant_passage(point, k_passage.target, c1)
    cat, proj, _, kappa = comma_category(k_passage, const)
    to_obj, of_obj = {}, {}
    for o in cat.objects:
        key = (proj.on_obj(o), kappa.at(o))
        to_obj[key] = o
        of_obj[o] = key
    return cat, proj, to_obj, of_obj


def _comma_over(k_passage, c1):
    """The category of objects under ``c1`` through ``k_passage``."""
    point = terminal_category()
    const = constant_passage(point, k_passage.target, c1)
    cat, _, proj, kappa = comma_category(const, k_passage)
    to_obj, of_obj = {}, {}
    for o in cat.objects:
        key = (proj.on_obj(o), kappa.at(o))
        to_obj[key] = o
        of_obj[o] = key
    return cat, proj, to_obj, of_obj


def lan(k_passage, diagram):
    """Left Kan extension of a set-valued diagram, pointwise by comma-category
    colimits."""
    src_cat, tgt_cat = k_passage.source, k_passage.target
    data = {}
    for c1 in tgt_cat.objects:
        cat, proj, to_obj, of_obj = _comma_under(k_passage, c1)
        res = colimit_in_set(compose_passages(proj, diagram))
        data[c1] = (cat, proj, to_obj, of_obj, res)
    obj_map = {c1: data[c1][4].cone.vertex for c1 in tgt_cat.objects}
    mor_map = {}
    for u, (a, b) in tgt_cat.morphisms.items():
        cat_a, proj_a, _, of_a, res_a = data[a]
        to_b, res_b = data[b][2], data[b][4]
        legs = {}
        for o in cat_a.objects:
            c2, m = of_a[o]
            legs[o] = res_b.cone.legs[to_b[(c2, tgt_cat.compose(m, u))]]
        cocone = Cone(compose_passages(proj_a, diagram),
                      res_b.cone.vertex, legs, colimit=True)
        mor_map[u] = res_a.mediator(cocone)
    passage = Passage(tgt_cat, SET, obj_map, mor_map)
    unit_comps = {}
    for c2 in src_cat.objects:
        kc = k_passage.on_obj(c2)
        to_obj, res = data[kc][2], data[kc][4]
        unit_comps[c2] = res.cone.legs[to_obj[(c2, tgt_cat.identities[kc])]]
    unit = Bridge(diagram, compose_passages(k_passage, passage), unit_comps)

    def factor(alpha, target):
        """The unique ``beta: lan => target`` with
        ``alpha == unit • (beta whiskered along k)``."""
        comps = {}
        for c1 in tgt_cat.objects:
            _, _, _, of_obj, res = data[c1]
            mapping = {}
            for rep in res.cone.vertex:
                o, x = rep
                c2, m = of_obj[o]
                mapping[rep] = target.on_mor(m)(alpha.at(c2)(x))
            comps[c1] = SetFn(res.cone.vertex, target.on_obj(c1), mapping)
        beta = Bridge(passage, target, comps)
        check = vertical_compose(unit, whisker_left(k_passage, beta))
        if not bridges_equal(check, alpha):
            raise CategoryError("left Kan factorization failed to commute")
        return beta

    return KanExtension("lan", passage, unit, factor, data)


def ran(k_passage, diagram):
    """Right Kan extension of a set-valued diagram, pointwise by
    comma-category limits."""
    src_cat, tgt_cat = k_passage.source, k_passage.target
    data = {}
    for c1 in tgt_cat.objects:
        cat, proj, to_obj, of_obj = _comma_over(k_passage, c1)
        res = limit_in_set(compose_passages(proj, diagram))
        data[c1] = (cat, proj, to_obj, of_obj, res)
    obj_map = {c1: data[c1][4].cone.vertex for c1 in tgt_cat.objects}
    mor_map = {}
    for u, (a, b) in tgt_cat.morphisms.items():
        to_a, res_a = data[a][2], data[a][4]
        cat_b, proj_b, _, of_b, res_b = data[b]
        legs = {}
        for o in cat_b.objects:
            c2, e = of_b[o]
            legs[o] = res_a.cone.legs[to_a[(c2, tgt_cat.compose(u, e))]]
        cone = Cone(compose_passages(proj_b, diagram),
                    res_a.cone.vertex, legs)
        mor_map[u] = res_b.mediator(cone)
    passage = Passage(tgt_cat, SET, obj_map, mor_map)
    counit_comps = {}
    for c2 in src_cat.objects:
        kc = k_passage.on_obj(c2)
        to_obj, res = data[kc][2], data[kc][4]
        o0 = to_obj[(c2, tgt_cat.identities[kc])]
        counit_comps[c2] = SetFn(res.cone.vertex, diagram.on_obj(c2),
                                 {fam: tuple_get(fam, o0)
                                  for fam in res.cone.vertex})
    counit = Bridge(compose_passages(k_passage, passage), diagram,
                    counit_comps)

    def factor(alpha, source):
        """The unique ``beta: source => ran`` with
        ``alpha == (beta whiskered along k) • counit``."""
        comps = {}
        for c1 in tgt_cat.objects:
            cat, _, _, of_obj, res = data[c1]
            mapping = {}
            for y in source.on_obj(c1):
                fam = {}
                for o in cat.objects:
                    c2, e = of_obj[o]
                    fam[o] = alpha.at(c2)(source.on_mor(e)(y))
                mapping[y] = _family(fam.items())
            comps[c1] = SetFn(source.on_obj(c1), res.cone.vertex, mapping)
        beta = Bridge(source, passage, comps)
        check = vertical_compose(whisker_left(k_passage, beta), counit)
        if not bridges_equal(check, alpha):
            raise CategoryError("right Kan factorization failed to commute")
        return beta

    return KanExtension("ran", passage, counit, factor, data)


class DiagramCategory(CategoryInterface):
    """Set-valued diagrams on one finite shape, with bridges as morphisms."""

    def __init__(self, shape):
        self.shape = shape

    def obj_eq(self, a, b):
        return (all(SET.obj_eq(a.on_obj(x), b.on_obj(x))
                    for x in self.shape.objects)
                and all(SET.mor_eq(a.on_mor(f), b.on_mor(f))
                        for f in self.shape.morphisms))

    def mor_eq(self, f, g):
        return bridges_equal(f, g)

    def identity(self, a):
        return identity_bridge(a)

    def compose(self, f, g):
        return vertical_compose(f, g)

    def source(self, f):
        return f.source_passage

    def target(self, f):
        return f.target_passage

    def hom(self, a, b):
        return all_bridges(a, b)

    def __eq__(self, other):
        return isinstance(other, DiagramCategory) and self.shape == other.shape


def _lan_on_bridge(k_passage, bridge):
    src_ext = lan(k_passage, bridge.source_passage)
    tgt_ext = lan(k_passage, bridge.target_passage)
    comps = {}
    for c1 in k_passage.target.objects:
        cat, proj, _, of_obj, res_s = src_ext._pointwise[c1]
        res_t = tgt_ext._pointwise[c1][4]
        legs = {o: SET.compose(bridge.at(of_obj[o][0]), res_t.cone.legs[o])
                for o in cat.objects}
        cocone = Cone(compose_passages(proj, bridge.source_passage),
                      res_t.cone.vertex, legs, colimit=True)
        comps[c1] = res_s.mediator(cocone)
    return Bridge(src_ext.passage, tgt_ext.passage, comps)


def _ran_on_bridge(k_passage, bridge):
    src_ext = ran(k_passage, bridge.source_passage)
    tgt_ext = ran(k_passage, bridge.target_passage)
    comps = {}
    for c1 in k_passage.target.objects:
        cat, proj, _, of_obj, res_s = src_ext._pointwise[c1]
        res_t = tgt_ext._pointwise[c1][4]
        legs = {o: SET.compose(res_s.cone.legs[o], bridge.at(of_obj[o][0]))
                for o in cat.objects}
        cone = Cone(compose_passages(proj, bridge.target_passage),
                    res_s.cone.vertex, legs)
        comps[c1] = res_t.mediator(cone)
    return Bridge(src_ext.passage, tgt_ext.passage, comps)


def kan_adjunction(k_passage):
    """Both adjunctions around precomposition with ``k_passage``, acting on
    the set-valued diagram categories of its endpoints.

    Returns the pair (left extension ⊣ precompose, precompose ⊣ right
    extension); unit/counit components are computed lazily because the
    diagram categories are not enumerable, and the triangle identities are
    checked on sample objects via ``check_triangles``.
    """
    source_diagrams = DiagramCategory(k_passage.source)
    target_diagrams = DiagramCategory(k_passage.target)
    pre = Passage(target_diagrams, source_diagrams,
                  lambda s: compose_passages(k_passage, s),
                  lambda br: whisker_left(k_passage, br))
    lan_p = Passage(source_diagrams, target_diagrams,
                    lambda s: lan(k_passage, s).passage,
                    lambda br: _lan_on_bridge(k_passage, br))
    ran_p = Passage(source_diagrams, target_diagrams,
                    lambda s: ran(k_passage, s).passage,
                    lambda br: _ran_on_bridge(k_passage, br))
    lan_unit = Bridge(identity_passage(source_diagrams),
                      compose_passages(lan_p, pre),
                      lambda s: lan(k_passage, s).connector, check=False)

    def lan_counit_at(s1):
        composed = compose_passages(k_passage, s1)
        return lan(k_passage, composed).factor(identity_bridge(composed), s1)

    lan_counit = Bridge(compose_passages(pre, lan_p),
                        identity_passage(target_diagrams),
                        lan_counit_at, check=False)

    def ran_unit_at(s1):
        composed = compose_passages(k_passage, s1)
        return ran(k_passage, composed).factor(identity_bridge(composed), s1)

    ran_unit = Bridge(identity_passage(target_diagrams),
                      compose_passages(pre, ran_p),
                      ran_unit_at, check=False)
    ran_counit = Bridge(compose_passages(ran_p, pre),
                        identity_passage(source_diagrams),
                        lambda s: ran(k_passage, s).connector, check=False)
    left_adj = AdjunctionWitness(lan_p, pre, lan_unit, lan_counit)
    right_adj = AdjunctionWitness(pre, ran_p, ran_unit, ran_counit)
    return left_adj, right_adj


def _slice_of_signatures(diagram, sort):
    """The set-valued diagram of one sort's columns."""
    shape = diagram.source

    def columns(c):
        sig = diagram.on_obj(c)
        return frozenset(i for i in sig.arity if sig.sorts[i] == sort)

    return Passage(shape, SET,
                   {c: columns(c) for c in shape.objects},
                   {f: SetFn(columns(shape.morphisms[f][0]),
                             columns(shape.morphisms[f][1]),
                             {i: diagram.on_mor(f).index_map[i]
                              for i in columns(shape.morphisms[f][0])})
                    for f in shape.morphisms})


def _slice_of_bridge(bridge, sort, src_slice, tgt_slice):
    shape = src_slice.source
    comps = {c: SetFn(src_slice.on_obj(c), tgt_slice.on_obj(c),
                      {i: bridge.at(c).index_map[i]
                       for i in src_slice.on_obj(c)})
             for c in shape.objects}
    return Bridge(src_slice, tgt_slice, comps)


def _assemble_signatures(per_sort, shape, lx):
    obj_map = {}
    for c in shape.objects:
        sorts = {}
        for x, ext in per_sort.items():
            for e in ext.passage.on_obj(c):
                sorts[(x, e)] = x
        obj_map[c] = Signature(sorts, sorts, lx.sort_set)
    mor_map = {}
    for u, (a, b) in shape.morphisms.items():
        index_map = {}
        for x, ext in per_sort.items():
            fn = ext.passage.on_mor(u)
            for e in ext.passage.on_obj(a):
                index_map[(x, e)] = (x, fn(e))
        mor_map[u] = SigMorphism(obj_map[a], obj_map[b], index_map)
    return Passage(shape, lx, obj_map, mor_map)


def lan_listX(k_passage, diagram):
    """Left Kan extension of a signature-valued diagram: signatures over a
    sort set extend sortwise through the set-valued construction."""
    lx = diagram.target
    tgt_cat = k_passage.target
    per_sort = {x: lan(k_passage, _slice_of_signatures(diagram, x))
                for x in sorted_values(lx.sort_set)}
    passage = _assemble_signatures(per_sort, tgt_cat, lx)
    unit_comps = {}
    for c2 in k_passage.source.objects:
        sig = diagram.on_obj(c2)
        kc = k_passage.on_obj(c2)
        unit_comps[c2] = SigMorphism(
            sig, passage.on_obj(kc),
            {i: (sig.sorts[i],
                 per_sort[sig.sorts[i]].connector.at(c2)(i))
             for i in sig.arity})
    unit = Bridge(diagram, compose_passages(k_passage, passage), unit_comps)

    def factor(alpha, target):
        slices = {x: _slice_of_signatures(target, x) for x in per_sort}
        src_slices = {x: _slice_of_signatures(diagram, x) for x in per_sort}
        betas = {}
        for x, ext in per_sort.items():
            pre_slice = _slice_of_signatures(
                compose_passages(k_passage, target), x)
            alpha_x = _slice_of_bridge(alpha, x, src_slices[x], pre_slice)
            betas[x] = ext.factor(alpha_x, slices[x])
        comps = {}
        for c1 in tgt_cat.objects:
            index_map = {}
            for x, ext in per_sort.items():
                fn = betas[x].at(c1)
                for e in ext.passage.on_obj(c1):
                    index_map[(x, e)] = fn(e)
            comps[c1] = SigMorphism(passage.on_obj(c1),
                                    target.on_obj(c1), index_map)
        return Bridge(passage, target, comps)

    return KanExtension("lan", passage, unit, factor)


def ran_listX(k_passage, diagram):
    """Right Kan extension of a signature-valued diagram, sortwise."""
    lx = diagram.target
    tgt_cat = k_passage.target
    per_sort = {x: ran(k_passage, _slice_of_signatures(diagram, x))
                for x in sorted_values(lx.sort_set)}
    passage = _assemble_signatures(per_sort, tgt_cat, lx)
    counit_comps = {}
    for c2 in k_passage.source.objects:
        sig = diagram.on_obj(c2)
        kc = k_passage.on_obj(c2)
        counit_comps[c2] = SigMorphism(
            passage.on_obj(kc), sig,
            {(x, fam): per_sort[x].connector.at(c2)(fam)
             for (x, fam) in passage.on_obj(kc).arity})
    counit = Bridge(compose_passages(k_passage, passage), diagram,
                    counit_comps)

    def factor(alpha, source):
        src_slices = {x: _slice_of_signatures(source, x) for x in per_sort}
        tgt_slices = {x: _slice_of_signatures(diagram, x) for x in per_sort}
        betas = {}
        for x, ext in per_sort.items():
            pre_slice = _slice_of_signatures(
                compose_passages(k_passage, source), x)
            alpha_x = _slice_of_bridge(alpha, x, pre_slice, tgt_slices[x])
            betas[x] = ext.factor(alpha_x, src_slices[x])
        comps = {}
        for c1 in tgt_cat.objects:
            sig = source.on_obj(c1)
            comps[c1] = SigMorphism(
                sig, passage.on_obj(c1),
                {i: (sig.sorts[i], betas[sig.sorts[i]].at(c1)(i))
                 for i in sig.arity})
        return Bridge(source, passage, comps)

    return KanExtension("ran", passage, counit, factor)


# ----------------------------------------------- indexed adjunctions


def _identity_adjunction(cat):
    ident = identity_passage(cat)
    comps = {a: cat.identity(a) for a in cat.objects}
    unit = Bridge(ident, compose_passages(ident, ident), comps)
    counit = Bridge(compose_passages(ident, ident), ident, dict(comps))
    return AdjunctionWitness(ident, ident, unit, counit)


class IndexedAdjunction:
    """Finite fiber categories indexed by a finite category, with a transport
    for every index morphism.

    ``witnesses[a]`` for ``a: i -> j`` is normally an
    :class:`~catdb.tables.AdjunctionWitness` whose left passage runs
    fiber(i) -> fiber(j) and whose right passage runs back; a bare
    :class:`~catdb.fincat.Passage` is also accepted as a push-forward
    transport with no declared adjoint (the operations that need the adjoint
    then raise :class:`~catdb.tables.MissingAdjunctionWitness`).  Identity
    witnesses may be omitted.  The assignment must be strict — identity
    transports are identity functors with identity unit and counit,
    composite transports are composites on the nose, and the unit/counit of
    a composite witness are the pasted ones (so mates compose) — or
    :class:`StrictnessViolation` is raised.  Every full witness's triangle
    identities are verified on all fiber objects.
    """

    def __init__(self, index, fibers, witnesses, check=True):
        self.index = index
        self.fibers = dict(fibers)
        self.witnesses = dict(witnesses)
        for i in index.objects:
            self.witnesses.setdefault(index.identities[i],
                                      _identity_adjunction(self.fibers[i]))
        if check:
            self._validate()

    def has_adjoint(self, a):
        return isinstance(self.witnesses[a], AdjunctionWitness)

    def witness(self, a):
        w = self.witnesses[a]
        if not isinstance(w, AdjunctionWitness):
            raise MissingAdjunctionWitness(
                "index morphism %r has no declared adjoint transport" % (a,))
        return w

    def left(self, a):
        w = self.witnesses[a]
        return w.left if isinstance(w, AdjunctionWitness) else w

    def right(self, a):
        return self.witness(a).right

    def _validate(self):
        for a, (i, j) in self.index.morphisms.items():
            w = self.witnesses.get(a)
            if w is None:
                raise MissingAdjunctionWitness(
                    "no transport for index morphism %r" % a)
            left = self.left(a)
            if left.source != self.fibers[i] or left.target != self.fibers[j]:
                raise EndpointMismatch(
                    "left transport of %r runs between the wrong fibers" % a)
            if isinstance(w, AdjunctionWitness):
                if w.right.source != self.fibers[j] \
                        or w.right.target != self.fibers[i]:
                    raise EndpointMismatch(
                        "right transport of %r runs between the wrong fibers"
                        % a)
                w.check_triangles(self.fibers[i].objects,
                                  self.fibers[j].objects)
        for i in self.index.objects:
            w = self.witnesses[self.index.identities[i]]
            fib = self.fibers[i]
            full = isinstance(w, AdjunctionWitness)
            left = self.left(self.index.identities[i])
            for a_obj in fib.objects:
                if left.on_obj(a_obj) != a_obj or \
                        (full and w.right.on_obj(a_obj) != a_obj):
                    raise StrictnessViolation(
                        "identity transport at %r moves an object" % (i,))
                ident = fib.identities[a_obj]
                if full and (w.unit.at(a_obj) != ident
                             or w.counit.at(a_obj) != ident):
                    raise StrictnessViolation(
                        "identity witness at %r has a non-identity "
                        "unit or counit" % (i,))
            for f in fib.morphisms:
                if left.on_mor(f) != f or \
                        (full and w.right.on_mor(f) != f):
                    raise StrictnessViolation(
                        "identity transport at %r moves a morphism" % (i,))
        for (a, b), c in self.index.table.items():
            la, lb, lc = self.left(a), self.left(b), self.left(c)
            fib_i = self.fibers[self.index.morphisms[a][0]]
            for a_obj in fib_i.objects:
                if lc.on_obj(a_obj) != lb.on_obj(la.on_obj(a_obj)):
                    raise StrictnessViolation(
                        "left transport is not strict on (%r ; %r)" % (a, b))
            for f in fib_i.morphisms:
                if lc.on_mor(f) != lb.on_mor(la.on_mor(f)):
                    raise StrictnessViolation(
                        "left transport is not strict on (%r ; %r)" % (a, b))
            if not (self.has_adjoint(a) and self.has_adjoint(b)
                    and self.has_adjoint(c)):
                continue
            wa, wb, wc = (self.witnesses[a], self.witnesses[b],
                          self.witnesses[c])
            fib_k = self.fibers[self.index.morphisms[b][1]]
            for b_obj in fib_k.objects:
                if wc.right.on_obj(b_obj) != wa.right.on_obj(
                        wb.right.on_obj(b_obj)):
                    raise StrictnessViolation(
                        "right transport is not strict on (%r ; %r)" % (a, b))
            for g in fib_k.morphisms:
                if wc.right.on_mor(g) != wa.right.on_mor(wb.right.on_mor(g)):
                    raise StrictnessViolation(
                        "right transport is not strict on (%r ; %r)" % (a, b))
            # Mates along a composite must agree with composed mates, which
            # pins the composite's unit and counit to the pasted ones.
            for a_obj in fib_i.objects:
                pasted = fib_i.compose(
                    wa.unit.at(a_obj),
                    wa.right.on_mor(wb.unit.at(wa.left.on_obj(a_obj))))
                if not fib_i.mor_eq(wc.unit.at(a_obj), pasted):
                    raise StrictnessViolation(
                        "unit of (%r ; %r) is not the pasted unit" % (a, b))
            for b_obj in fib_k.objects:
                pasted = fib_k.compose(
                    wb.left.on_mor(wa.counit.at(wb.right.on_obj(b_obj))),
                    wb.counit.at(b_obj))
                if not fib_k.mor_eq(wc.counit.at(b_obj), pasted):
                    raise StrictnessViolation(
                        "counit of (%r ; %r) is not the pasted counit"
                        % (a, b))


class GrothendieckTotal:
    """The flattened total category of an indexed adjunction.

    Objects pair an index object with a fiber object; a morphism pairs an
    index morphism with a fiber morphism, recorded in both its push-forward
    (acute) and pull-back (grave) presentations.  ``transpose`` exposes the
    full record ``(index morphism, source fiber object, acute, grave, target
    fiber object)`` for any total morphism.
    """

    def __init__(self, indexing, convention, total, projection, inclusions,
                 acute_bridges, grave_bridges, obj_data, mor_data, mor_ids):
        self.indexing = indexing
        self.convention = convention
        self.total = total
        self.projection = projection
        self.inclusions = inclusions
        self.acute_bridges = acute_bridges
        self.grave_bridges = grave_bridges
        self.obj_data = obj_data
        self.mor_data = mor_data
        self._mor_ids = mor_ids

    def obj_id(self, i, fiber_obj):
        return pair_id(i, fiber_obj)

    def mor_id(self, index_mor, src_fiber_obj, acute):
        return self._mor_ids[(index_mor, src_fiber_obj, acute)]

    def transpose(self, m):
        return self.mor_data[m]

    def __repr__(self):
        return "GrothendieckTotal(%d objects, %s)" % (
            len(self.total.objects), self.convention)


def grothendieck(indexing, convention="opfibration"):
    """Flatten a strictly functorial indexed adjunction into one category.

    ``convention`` selects which presentation names the morphisms: with
    "opfibration" a morphism id carries its source fiber object and the
    push-forward part; with "fibration" it carries the pull-back part and the
    target fiber object.  Both presentations are stored either way, and
    composition is computed on the push-forward side.  Index morphisms whose
    transport has no declared adjoint still flatten under the opfibration
    convention, with a ``None`` pull-back slot in ``transpose``.
    """
    if convention not in ("fibration", "opfibration"):
        raise CategoryError(
            "convention must be 'fibration' or 'opfibration', got %r"
            % (convention,))
    ix = indexing
    objects, obj_data = [], {}
    for i in ix.index.objects:
        for a_obj in ix.fibers[i].objects:
            o = pair_id(i, a_obj)
            objects.append(o)
            obj_data[o] = (i, a_obj)
    morphisms, mor_data, mor_ids = {}, {}, {}
    for a, (i, j) in ix.index.morphisms.items():
        fib_j = ix.fibers[j]
        full = ix.has_adjoint(a)
        if convention == "fibration" and not full:
            raise MissingAdjunctionWitness(
                "the fibration convention names morphisms by their "
                "pull-back part, but %r has no declared adjoint" % (a,))
        left = ix.left(a)
        for src_obj in ix.fibers[i].objects:
            pushed = left.on_obj(src_obj)
            for f, (fs, ft) in fib_j.morphisms.items():
                if fs != pushed:
                    continue
                grave = ix.witness(a).right_mate(src_obj, f) if full else None
                if convention == "opfibration":
                    mid = pair_id(a, pair_id(src_obj, f))
                else:
                    mid = pair_id(a, pair_id(grave, ft))
                if mid in morphisms:
                    raise CategoryError(
                        "total morphism id collision at %r" % (mid,))
                morphisms[mid] = (pair_id(i, src_obj), pair_id(j, ft))
                mor_data[mid] = (a, src_obj, f, grave, ft)
                mor_ids[(a, src_obj, f)] = mid
    identities = {}
    for o, (i, a_obj) in obj_data.items():
        identities[o] = mor_ids[(ix.index.identities[i], a_obj,
                                 ix.fibers[i].identities[a_obj])]
    table = {}
    for m1, (a, src_obj, f, _, mid_obj) in mor_data.items():
        for m2, (b, src2, g, _, _) in mor_data.items():
            if morphisms[m1][1] != morphisms[m2][0]:
                continue
            c = ix.index.table[(a, b)]
            k = ix.index.morphisms[b][1]
            comp = ix.fibers[k].table[(ix.left(b).on_mor(f), g)]
            table[(m1, m2)] = mor_ids[(c, src_obj, comp)]
    total = FinCategory(objects, morphisms, identities, table)
    projection = Passage(total, ix.index,
                         {o: obj_data[o][0] for o in objects},
                         {m: mor_data[m][0] for m in morphisms})
    inclusions = {}
    for i in ix.index.objects:
        fib = ix.fibers[i]
        inclusions[i] = Passage(
            fib, total,
            {a_obj: pair_id(i, a_obj) for a_obj in fib.objects},
            {f: mor_ids[(ix.index.identities[i], fib.morphisms[f][0], f)]
             for f in fib.morphisms})
    acute_bridges, grave_bridges = {}, {}
    for a, (i, j) in ix.index.morphisms.items():
        left = ix.left(a)
        fib_i, fib_j = ix.fibers[i], ix.fibers[j]
        acute_bridges[a] = Bridge(
            inclusions[i], compose_passages(left, inclusions[j]),
            {a_obj: mor_ids[(a, a_obj,
                             fib_j.identities[left.on_obj(a_obj)])]
             for a_obj in fib_i.objects})
        if ix.has_adjoint(a):
            w = ix.witness(a)
            grave_bridges[a] = Bridge(
                compose_passages(w.right, inclusions[i]), inclusions[j],
                {b_obj: mor_ids[(a, w.right.on_obj(b_obj),
                                 w.counit.at(b_obj))]
                 for b_obj in fib_j.objects})
    return GrothendieckTotal(ix, convention, total, projection, inclusions,
                             acute_bridges, grave_bridges, obj_data,
                             mor_data, mor_ids)


def groth_structured_limit(gt, diagram):
    """Limit of a total-category diagram by the index-then-fiber recipe.

    First the index limit of the projected diagram, then the pull-back
    transports along its legs into the limiting fiber, then the fiber limit
    there (:class:`FiberNotCocomplete` if it does not exist).  Mediators are
    found by exhaustive hom search in the total category.
    """
    ix = gt.indexing
    shape = diagram.source
    objs = sorted_values(shape.objects)
    projected = compose_passages(diagram, gt.projection)
    idx = oracle_universal(ix.index, projected, "limit")
    i0 = idx.cone.vertex
    fib0 = ix.fibers[i0]
    dobj, dmor = {}, {}
    for r in objs:
        _, a_r = gt.obj_data[diagram.on_obj(r)]
        dobj[r] = ix.right(idx.cone.legs[r]).on_obj(a_r)
    for f, (s, t) in shape.morphisms.items():
        grave = gt.mor_data[diagram.on_mor(f)][3]
        dmor[f] = ix.right(idx.cone.legs[s]).on_mor(grave)
    transported = Passage(shape, fib0, dobj, dmor)
    try:
        fib = oracle_universal(fib0, transported, "limit")
    except NoUniversalCone as exc:
        raise FiberNotCocomplete(
            "fiber at %r lacks the transported limit: %s" % (i0, exc)) from exc
    legs = {}
    for r in objs:
        lam = idx.cone.legs[r]
        _, a_r = gt.obj_data[diagram.on_obj(r)]
        acute = ix.witness(lam).left_mate(a_r, fib.cone.legs[r])
        legs[r] = gt.mor_id(lam, fib.cone.vertex, acute)
    vertex = pair_id(i0, fib.cone.vertex)
    cone = Cone(diagram, vertex, legs)
    total = gt.total

    def mediator(candidate):
        found = [h for h in total.hom(candidate.vertex, vertex)
                 if all(total.mor_eq(total.compose(h, legs[r]),
                                     candidate.legs[r]) for r in objs)]
        if not found:
            raise NoMediator("candidate cone does not factor")
        if len(found) > 1:
            raise NonUniqueMediator("%d factorizations found" % len(found))
        return found[0]

    return LimitResult(cone, mediator)


def groth_structured_colimit(gt, diagram):
    """Colimit of a total-category diagram, dual to the structured limit:
    index colimit, push-forward transports, fiber colimit."""
    ix = gt.indexing
    shape = diagram.source
    objs = sorted_values(shape.objects)
    projected = compose_passages(diagram, gt.projection)
    idx = oracle_universal(ix.index, projected, "colimit")
    i0 = idx.cone.vertex
    fib0 = ix.fibers[i0]
    dobj, dmor = {}, {}
    for r in objs:
        _, a_r = gt.obj_data[diagram.on_obj(r)]
        dobj[r] = ix.left(idx.cone.legs[r]).on_obj(a_r)
    for f, (s, t) in shape.morphisms.items():
        acute = gt.mor_data[diagram.on_mor(f)][2]
        dmor[f] = ix.left(idx.cone.legs[t]).on_mor(acute)
    transported = Passage(shape, fib0, dobj, dmor)
    try:
        fib = oracle_universal(fib0, transported, "colimit")
    except NoUniversalCone as exc:
        raise FiberNotCocomplete(
            "fiber at %r lacks the transported colimit: %s"
            % (i0, exc)) from exc
    legs = {}
    for r in objs:
        lam = idx.cone.legs[r]
        _, a_r = gt.obj_data[diagram.on_obj(r)]
        legs[r] = gt.mor_id(lam, a_r, fib.cone.legs[r])
    vertex = pair_id(i0, fib.cone.vertex)
    cone = Cone(diagram, vertex, legs, colimit=True)
    total = gt.total

    def mediator(candidate):
        found = [h for h in total.hom(vertex, candidate.vertex)
                 if all(total.mor_eq(total.compose(legs[r], h),
                                     candidate.legs[r]) for r in objs)]
        if not found:
            raise NoMediator("candidate cocone does not factor")
        if len(found) > 1:
            raise NonUniqueMediator("%d factorizations found" % len(found))
        return found[0]

    return LimitResult(cone, mediator)
