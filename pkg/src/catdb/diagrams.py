"""Schemas, schemed domains, and databases as diagrams over finite shapes.

A schema assigns a signature to every object of a finite shape category; a
schemed domain additionally carries type domains; a database assigns a whole
table to every shape object and a table morphism to every shape arrow, with
the arrow images running against the arrow direction (the diagram lives over
the opposite of the shape).  Morphisms at every level pair a shape-changing
passage with a componentwise bridge; schema-level morphisms carry their shape
passage along the morphism direction, database-level ones against it.

Morphisms that cross between type domains carry two interchangeable component
families (one landing in the pulled-back table, one in the pushed-forward
one); the conversions between them and the inclusion into the varying-domain
category live here as well.
"""

from .fincat import (
    Bridge,
    CategoryError,
    EndpointMismatch,
    FinCategory,
    Passage,
    compose_passages,
    constant_passage,
    identity_passage,
    opposite,
    opposite_passage,
    vertical_compose,
    whisker_left,
)
from .tables import (
    CLS,
    DOM,
    DomMor,
    LIST,
    ListMor,
    ListX,
    MissingAdjunctionWitness,
    SET,
    SetFn,
    SignedDomain,
    TBL,
    TblA,
    key_fn,
    list_fiber_adjunction,
    table_inclusion_bridges,
    tbl_fiber_adjunction,
    tbl_inclusion,
    tup_fn,
    tup_fn_fixed,
    tup_set,
)


class SortDiagramMismatch(CategoryError):
    pass


# -------------------------------------------------------------------- schemas


class Schema:
    """A diagram of signatures over a finite shape."""

    def __init__(self, shape, diagram):
        if diagram.source != shape:
            raise EndpointMismatch("diagram source is not the shape")
        self.shape = shape
        self.diagram = diagram

    def at(self, r):
        return self.diagram.on_obj(r)

    def __eq__(self, other):
        return (isinstance(other, Schema) and self.shape == other.shape
                and all(self.at(r) == other.at(r) for r in self.shape.objects)
                and all(self.diagram.on_mor(f) == other.diagram.on_mor(f)
                        for f in self.shape.morphisms))


class SchemaMorphism:
    """Shape passage along the morphism plus a componentwise bridge.

    From ``src`` to ``tgt`` it carries ``shape: src.shape -> tgt.shape`` and
    a bridge with a component ``src(r) -> tgt(shape(r))`` at each object of
    the source shape.
    """

    def __init__(self, src, tgt, shape, bridge):
        self.src = src
        self.tgt = tgt
        self.shape = shape
        if shape.source != src.shape or shape.target != tgt.shape:
            raise EndpointMismatch("shape passage endpoints are wrong")
        expected = compose_passages(shape, tgt.diagram)
        if isinstance(bridge, dict):
            bridge = Bridge(src.diagram, expected, bridge)
        self.bridge = bridge
        if not _parallel(bridge.source_passage, src.diagram) or \
                not _parallel(bridge.target_passage, expected):
            raise EndpointMismatch("bridge does not connect the diagrams")

    def component(self, r):
        return self.bridge.at(r)


def identity_schema_morphism(schema):
    cat = schema.diagram.target
    comps = {r: cat.identity(schema.at(r)) for r in schema.shape.objects}
    return SchemaMorphism(schema, schema, identity_passage(schema.shape),
                          Bridge(schema.diagram, schema.diagram, comps))


def compose_schema_morphisms(m1, m2):
    if m1.tgt is not m2.src and m1.tgt != m2.src:
        raise EndpointMismatch("schema morphisms do not meet")
    shape = compose_passages(m1.shape, m2.shape)
    bridge = vertical_compose(m1.bridge, whisker_left(m1.shape, m2.bridge))
    return SchemaMorphism(m1.src, m2.tgt, shape, bridge)


# ------------------------------------------------------------ schemed domains


class SchemedDomain:
    """A diagram of signatures with type-domain data.

    With ``domain`` given, the diagram lands in the signatures over that one
    domain's sorts; without it, each shape object carries its own signed
    domain (signature plus type domain).
    """

    def __init__(self, shape, diagram, domain=None):
        if diagram.source != shape:
            raise EndpointMismatch("diagram source is not the shape")
        self.shape = shape
        self.diagram = diagram
        self.domain = domain
        if domain is not None:
            for r in shape.objects:
                if diagram.on_obj(r).sort_set != domain.sorts:
                    raise SortDiagramMismatch(
                        "signature at %r is not over the domain's sorts" % r)

    def at(self, r):
        return self.diagram.on_obj(r)

    def signed_at(self, r):
        if self.domain is not None:
            return SignedDomain(self.at(r), self.domain)
        return self.at(r)

    def __eq__(self, other):
        return (isinstance(other, SchemedDomain)
                and self.shape == other.shape and self.domain == other.domain
                and all(self.at(r) == other.at(r) for r in self.shape.objects)
                and all(self.diagram.on_mor(f) == other.diagram.on_mor(f)
                        for f in self.shape.morphisms))


class SchemedDomainMorphism:
    """Same data as a schema morphism, for schemed-domain diagrams."""

    def __init__(self, src, tgt, shape, bridge):
        self.src = src
        self.tgt = tgt
        self.shape = shape
        if shape.source != src.shape or shape.target != tgt.shape:
            raise EndpointMismatch("shape passage endpoints are wrong")
        expected = compose_passages(shape, tgt.diagram)
        if isinstance(bridge, dict):
            bridge = Bridge(src.diagram, expected, bridge)
        self.bridge = bridge
        if not _parallel(bridge.source_passage, src.diagram) or \
                not _parallel(bridge.target_passage, expected):
            raise EndpointMismatch("bridge does not connect the diagrams")

    def component(self, r):
        return self.bridge.at(r)


def compose_schemed_morphisms(m1, m2):
    if m1.tgt is not m2.src and m1.tgt != m2.src:
        raise EndpointMismatch("schemed-domain morphisms do not meet")
    shape = compose_passages(m1.shape, m2.shape)
    bridge = vertical_compose(m1.bridge, whisker_left(m1.shape, m2.bridge))
    return SchemedDomainMorphism(m1.src, m2.tgt, shape, bridge)


class SchemedDomainMorphismAlong:
    """A schemed-domain morphism crossing between type domains.

    Connects a diagram over the infomorphism's source domain to one over its
    target domain through a shape passage and either of two component
    families: ``acute`` lands in the pulled-back signature, ``grave`` starts
    from the pushed-forward one.  Missing sides are filled in by
    :func:`levo_dextro_schemed`.
    """

    def __init__(self, src, tgt, shape, info, acute=None, grave=None,
                 check=True):
        self.src = src
        self.tgt = tgt
        self.shape = shape
        self.info = info
        if acute is None and grave is None:
            raise MissingAdjunctionWitness(
                "at least one component family is required")
        if src.domain != info.source or tgt.domain != info.target:
            raise EndpointMismatch("infomorphism does not match the domains")
        if isinstance(acute, dict):
            acute = _bridge_like(self, acute, side="acute")
        if isinstance(grave, dict):
            grave = _bridge_like(self, grave, side="grave")
        self.acute = acute
        self.grave = grave
        if check:
            self._validate()

    def _adjunction(self):
        return list_fiber_adjunction(self.info.sort_map,
                                     self.info.source.sorts,
                                     self.info.target.sorts)

    def _validate(self):
        adj = self._adjunction()
        lx2 = ListX(self.info.source.sorts)
        lx1 = ListX(self.info.target.sorts)
        for r in self.src.shape.objects:
            above = self.tgt.at(self.shape.on_obj(r))
            if self.acute is not None:
                comp = self.acute.at(r)
                if comp.src != self.src.at(r) or \
                        comp.tgt != adj.right.on_obj(above):
                    raise EndpointMismatch(
                        "pulled-back component at %r has wrong endpoints" % r)
            if self.grave is not None:
                comp = self.grave.at(r)
                if comp.src != adj.left.on_obj(self.src.at(r)) or \
                        comp.tgt != above:
                    raise EndpointMismatch(
                        "pushed-forward component at %r has wrong endpoints"
                        % r)
        # naturality of whichever families are present
        for f, (r, r2) in self.src.shape.morphisms.items():
            below = self.src.diagram.on_mor(f)
            above = self.tgt.diagram.on_mor(self.shape.on_mor(f))
            if self.acute is not None:
                left = lx2.compose(below, self.acute.at(r2))
                right = lx2.compose(self.acute.at(r), adj.right.on_mor(above))
                if left != right:
                    raise CategoryError(
                        "pulled-back family is not natural at %r" % f)
            if self.grave is not None:
                left = lx1.compose(adj.left.on_mor(below), self.grave.at(r2))
                right = lx1.compose(self.grave.at(r), above)
                if left != right:
                    raise CategoryError(
                        "pushed-forward family is not natural at %r" % f)


def levo_dextro_schemed(m):
    """Fill in the missing component family of a cross-domain schemed
    morphism; with both present, verify they determine each other."""
    adj = m._adjunction()
    lx1 = ListX(m.info.target.sorts)
    lx2 = ListX(m.info.source.sorts)

    def grave_from_acute(r):
        above = m.tgt.at(m.shape.on_obj(r))
        return lx1.compose(adj.left.on_mor(m.acute.at(r)),
                           adj.counit.at(above))

    def acute_from_grave(r):
        return lx2.compose(adj.unit.at(m.src.at(r)),
                           adj.right.on_mor(m.grave.at(r)))

    objs = m.src.shape.objects
    if m.acute is not None and m.grave is None:
        grave = _bridge_like(m, {r: grave_from_acute(r) for r in objs},
                             side="grave")
        return SchemedDomainMorphismAlong(m.src, m.tgt, m.shape, m.info,
                                          m.acute, grave)
    if m.grave is not None and m.acute is None:
        acute = _bridge_like(m, {r: acute_from_grave(r) for r in objs},
                             side="acute")
        return SchemedDomainMorphismAlong(m.src, m.tgt, m.shape, m.info,
                                          acute, m.grave)
    for r in objs:
        if m.grave.at(r) != grave_from_acute(r) or \
                m.acute.at(r) != acute_from_grave(r):
            raise CategoryError(
                "component families disagree at %r" % (r,))
    return m


def _bridge_like(m, comps, side):
    adj = m._adjunction()
    shaped = compose_passages(m.shape, m.tgt.diagram)
    if side == "grave":
        source = compose_passages(m.src.diagram, adj.left)
        return Bridge(source, shaped, comps, check=False)
    target = compose_passages(shaped, adj.right)
    return Bridge(m.src.diagram, target, comps, check=False)


def _db_bridge_like(m, comps, side):
    adj = m._adjunction()
    below = compose_passages(opposite_passage(m.shape), m.src.diagram)
    if side == "acute":
        return Bridge(compose_passages(below, adj.left), m.tgt.diagram,
                      comps, check=False)
    return Bridge(below, compose_passages(m.tgt.diagram, adj.right),
                  comps, check=False)


def schemed_along_to_general(m, route="acute"):
    """Collapse a cross-domain schemed morphism to a single componentwise
    bridge in the varying-domain category; both routes give the same result."""
    m = levo_dextro_schemed(m)
    src_gen = schemed_to_general(m.src)
    tgt_gen = schemed_to_general(m.tgt)
    comps = {}
    for r in m.src.shape.objects:
        above = m.tgt.at(m.shape.on_obj(r))
        if route == "acute":
            comps[r] = DomMor(SignedDomain(m.src.at(r), m.info.source),
                              SignedDomain(above, m.info.target),
                              {i: m.acute.at(r).index_map[i][0]
                               for i in m.src.at(r).arity},
                              m.info)
        else:
            comps[r] = DomMor(SignedDomain(m.src.at(r), m.info.source),
                              SignedDomain(above, m.info.target),
                              m.grave.at(r).index_map, m.info)
    bridge = Bridge(src_gen.diagram,
                    compose_passages(m.shape, tgt_gen.diagram), comps)
    return SchemedDomainMorphism(src_gen, tgt_gen, m.shape, bridge)


def schemed_to_general(sd):
    """Forget the fixed-domain presentation: one signed domain per object."""
    if sd.domain is None:
        return sd
    dom = sd.domain
    obj_map = {r: SignedDomain(sd.at(r), dom) for r in sd.shape.objects}
    mor_map = {}
    for f in sd.shape.morphisms:
        h = sd.diagram.on_mor(f)
        mor_map[f] = DomMor(obj_map[sd.shape.source(f)],
                            obj_map[sd.shape.target(f)], h.index_map,
                            CLS.identity(dom))
    return SchemedDomain(sd.shape, Passage(sd.shape, DOM, obj_map, mor_map))


# ------------------------------------------------------------------ databases


class Database:
    """A diagram of tables over the opposite of a finite shape.

    ``diagram`` runs from the opposite of ``shape`` into the tables over
    ``domain`` (or over varying domains when ``domain`` is None), so a shape
    arrow ``r -> r2`` is sent to a table morphism ``T(r2) -> T(r)``.
    """

    def __init__(self, shape, diagram, domain=None):
        if diagram.source != opposite(shape):
            raise EndpointMismatch(
                "diagram source must be the opposite of the shape")
        self.shape = shape
        self.diagram = diagram
        self.domain = domain
        if domain is not None:
            for r in shape.objects:
                if diagram.on_obj(r).domain != domain:
                    raise SortDiagramMismatch(
                        "table at %r is not over the stated domain" % r)

    def at(self, r):
        return self.diagram.on_obj(r)

    def arrow(self, f):
        return self.diagram.on_mor(f)

    def category(self):
        return TblA(self.domain) if self.domain is not None else TBL

    def __eq__(self, other):
        return (isinstance(other, Database) and self.shape == other.shape
                and self.domain == other.domain
                and all(self.at(r) == other.at(r) for r in self.shape.objects)
                and all(self.arrow(f) == other.arrow(f)
                        for f in self.shape.morphisms))


def database_from_tables(shape, tables, arrows, domain):
    """Build a one-domain database from explicit tables and arrow images.

    ``arrows`` maps each non-identity shape morphism ``f: r -> r2`` to a
    table morphism ``tables[r2] -> tables[r]``; identities are filled in.
    """
    cat = TblA(domain)
    op_shape = opposite(shape)
    mor_map = {}
    for f in shape.morphisms:
        if f in shape.identities.values():
            r = shape.morphisms[f][0]
            mor_map[f] = cat.identity(tables[r])
        else:
            mor_map[f] = arrows[f]
    diagram = Passage(op_shape, cat, dict(tables), mor_map)
    return Database(shape, diagram, domain)


class DatabaseMorphism:
    """Shape passage against the morphism plus componentwise table morphisms.

    From ``src`` to ``tgt`` it carries ``shape: tgt.shape -> src.shape`` and
    a bridge with a component ``src(shape(r)) -> tgt(r)`` at each object of
    the target shape.
    """

    def __init__(self, src, tgt, shape, bridge):
        self.src = src
        self.tgt = tgt
        self.shape = shape
        if shape.source != tgt.shape or shape.target != src.shape:
            raise EndpointMismatch(
                "shape passage must run from target shape to source shape")
        expected = compose_passages(opposite_passage(shape), src.diagram)
        if isinstance(bridge, dict):
            bridge = Bridge(expected, tgt.diagram, bridge)
        self.bridge = bridge
        if not _parallel(bridge.source_passage, expected) or \
                not _parallel(bridge.target_passage, tgt.diagram):
            raise EndpointMismatch("bridge does not connect the diagrams")

    def component(self, r):
        return self.bridge.at(r)


def identity_database_morphism(db):
    cat = db.category()
    comps = {r: cat.identity(db.at(r)) for r in db.shape.objects}
    return DatabaseMorphism(db, db, identity_passage(db.shape),
                            Bridge(db.diagram, db.diagram, comps))


def compose_database_morphisms(m1, m2):
    if m1.tgt is not m2.src and m1.tgt != m2.src:
        raise EndpointMismatch("database morphisms do not meet")
    shape = compose_passages(m2.shape, m1.shape)
    bridge = vertical_compose(whisker_left(opposite_passage(m2.shape),
                                           m1.bridge),
                              m2.bridge)
    return DatabaseMorphism(m1.src, m2.tgt, shape, bridge)


class DatabaseMorphismAlong:
    """A database morphism crossing between type domains.

    ``acute`` components map the pulled-back source tables into the target
    tables; ``grave`` components map the source tables into the pushed-forward
    target tables.  Either determines the other through the table fiber
    adjunction (:func:`levo_dextro_db`).
    """

    def __init__(self, src, tgt, shape, info, acute=None, grave=None,
                 check=True):
        self.src = src
        self.tgt = tgt
        self.shape = shape
        self.info = info
        if acute is None and grave is None:
            raise MissingAdjunctionWitness(
                "at least one component family is required")
        if src.domain != info.target or tgt.domain != info.source:
            raise EndpointMismatch("infomorphism does not match the domains")
        if shape.source != tgt.shape or shape.target != src.shape:
            raise EndpointMismatch(
                "shape passage must run from target shape to source shape")
        if isinstance(acute, dict):
            acute = _db_bridge_like(self, acute, side="acute")
        if isinstance(grave, dict):
            grave = _db_bridge_like(self, grave, side="grave")
        self.acute = acute
        self.grave = grave
        if check:
            self._validate()

    def _adjunction(self):
        return tbl_fiber_adjunction(self.info)

    def _validate(self):
        adj = self._adjunction()
        ta2 = TblA(self.info.source)
        ta1 = TblA(self.info.target)
        for r2 in self.tgt.shape.objects:
            below = self.src.at(self.shape.on_obj(r2))
            if self.acute is not None:
                comp = self.acute.at(r2)
                if comp.src != adj.left.on_obj(below) or \
                        comp.tgt != self.tgt.at(r2):
                    raise EndpointMismatch(
                        "pulled-back component at %r has wrong endpoints" % r2)
            if self.grave is not None:
                comp = self.grave.at(r2)
                if comp.src != below or \
                        comp.tgt != adj.right.on_obj(self.tgt.at(r2)):
                    raise EndpointMismatch(
                        "pushed-forward component at %r has wrong endpoints"
                        % r2)
        for f in self.tgt.shape.morphisms:
            s, t = self.tgt.shape.morphisms[f]
            below = self.src.diagram.on_mor(self.shape.on_mor(f))
            above = self.tgt.diagram.on_mor(f)
            if self.acute is not None:
                left = ta2.compose(adj.left.on_mor(below), self.acute.at(s))
                right = ta2.compose(self.acute.at(t), above)
                if left != right:
                    raise CategoryError(
                        "pulled-back family is not natural at %r" % f)
            if self.grave is not None:
                left = ta1.compose(below, self.grave.at(s))
                right = ta1.compose(self.grave.at(t),
                                    adj.right.on_mor(above))
                if left != right:
                    raise CategoryError(
                        "pushed-forward family is not natural at %r" % f)


def levo_dextro_db(m):
    """Fill in the missing component family of a cross-domain database
    morphism; with both present, verify they determine each other."""
    adj = m._adjunction()
    ta2 = TblA(m.info.source)
    ta1 = TblA(m.info.target)

    def acute_from_grave(r2):
        return ta2.compose(adj.left.on_mor(m.grave.at(r2)),
                           adj.counit.at(m.tgt.at(r2)))

    def grave_from_acute(r2):
        below = m.src.at(m.shape.on_obj(r2))
        return ta1.compose(adj.unit.at(below),
                           adj.right.on_mor(m.acute.at(r2)))

    objs = m.tgt.shape.objects
    if m.acute is not None and m.grave is None:
        grave = _db_bridge_like(m, {r2: grave_from_acute(r2) for r2 in objs},
                                side="grave")
        return DatabaseMorphismAlong(m.src, m.tgt, m.shape, m.info,
                                     m.acute, grave)
    if m.grave is not None and m.acute is None:
        acute = _db_bridge_like(m, {r2: acute_from_grave(r2) for r2 in objs},
                                side="acute")
        return DatabaseMorphismAlong(m.src, m.tgt, m.shape, m.info,
                                     acute, m.grave)
    for r2 in objs:
        if m.grave.at(r2) != grave_from_acute(r2) or \
                m.acute.at(r2) != acute_from_grave(r2):
            raise CategoryError("component families disagree at %r" % (r2,))
    return m


def database_to_general(db):
    """Reread a one-domain database as a database over varying domains."""
    if db.domain is None:
        return db
    inc = tbl_inclusion(db.domain)
    return Database(db.shape, compose_passages(db.diagram, inc))


def include_db_in_DB(m, route="acute"):
    """Collapse a cross-domain database morphism to a plain database
    morphism between the varying-domain rereadings of its endpoints.

    The component at each object is the inclusion-bridge component followed
    by the chosen family (or the other family preceded by it); the two routes
    agree.
    """
    m = levo_dextro_db(m)
    chi_acute, chi_grave = table_inclusion_bridges(m.info)
    inc2 = tbl_inclusion(m.info.source)
    inc1 = tbl_inclusion(m.info.target)
    src_gen = database_to_general(m.src)
    tgt_gen = database_to_general(m.tgt)
    comps = {}
    for r2 in m.tgt.shape.objects:
        below = m.src.at(m.shape.on_obj(r2))
        if route == "acute":
            comps[r2] = TBL.compose(chi_acute.at(below),
                                    inc2.on_mor(m.acute.at(r2)))
        else:
            comps[r2] = TBL.compose(inc1.on_mor(m.grave.at(r2)),
                                    chi_grave.at(m.tgt.at(r2)))
    bridge = Bridge(
        compose_passages(opposite_passage(m.shape), src_gen.diagram),
        tgt_gen.diagram, comps)
    return DatabaseMorphism(src_gen, tgt_gen, m.shape, bridge)


# ---------------------------------------------------------------- projections


def arity_projection(schema):
    """The underlying diagram of index sets of a schema (or of the signature
    part of a schemed domain)."""
    def index_fn(h):
        src = frozenset(h.src.arity)
        tgt = frozenset(h.tgt.arity)
        return SetFn(src, tgt, {i: h.index_map[i] for i in src})
    return Passage(
        schema.shape, SET,
        {r: frozenset(schema.at(r).arity) for r in schema.shape.objects},
        {f: index_fn(schema.diagram.on_mor(f))
         for f in schema.shape.morphisms})


def sort_projection(schema):
    """The underlying diagram of sort sets of a schema."""
    def sort_fn(h):
        src = frozenset(h.src.sort_set)
        tgt = frozenset(h.tgt.sort_set)
        if isinstance(h, ListMor):
            return SetFn(src, tgt, h.sort_fn)
        return SetFn(src, tgt, {x: x for x in src})
    return Passage(
        schema.shape, SET,
        {r: frozenset(schema.at(r).sort_set) for r in schema.shape.objects},
        {f: sort_fn(schema.diagram.on_mor(f))
         for f in schema.shape.morphisms})


def arity_projection_morphism(m):
    """Arity part of a schema morphism, as a bridge between the projected
    diagrams."""
    comps = {}
    for r in m.src.shape.objects:
        h = m.component(r)
        comps[r] = SetFn(h.src.arity, h.tgt.arity, h.index_map)
    return Bridge(arity_projection(m.src),
                  compose_passages(m.shape, arity_projection(m.tgt)), comps)


def sort_projection_morphism(m):
    """Sort part of a schema morphism, as a bridge between the projected
    diagrams (identities unless the morphism translates sorts)."""
    comps = {}
    for r in m.src.shape.objects:
        h = m.component(r)
        if isinstance(h, ListMor):
            comps[r] = SetFn(h.src.sort_set, h.tgt.sort_set, h.sort_fn)
        else:
            comps[r] = SET.identity(frozenset(h.src.sort_set))
    return Bridge(sort_projection(m.src),
                  compose_passages(m.shape, sort_projection(m.tgt)), comps)


def sign_projection(sd):
    """Signature part of a schemed domain, as a schema."""
    if sd.domain is not None:
        return Schema(sd.shape, sd.diagram)

    def strip(dm):
        return ListMor(dm.src.sig, dm.tgt.sig, dm.index_map,
                       dm.info.sort_map)
    return Schema(sd.shape, Passage(
        sd.shape, LIST,
        {r: sd.at(r).sig for r in sd.shape.objects},
        {f: strip(sd.diagram.on_mor(f)) for f in sd.shape.morphisms}))


def data_projection(sd):
    """Type-domain part of a schemed domain, as a diagram of domains."""
    if sd.domain is not None:
        return constant_passage(sd.shape, CLS, sd.domain)
    return Passage(
        sd.shape, CLS,
        {r: sd.at(r).domain for r in sd.shape.objects},
        {f: sd.diagram.on_mor(f).info for f in sd.shape.morphisms})


def reconstruct_schemed(sign_schema, data_diagram):
    """Rebuild a general schemed domain from its two projections; the sort
    diagrams must agree on the nose."""
    shape = sign_schema.shape
    if data_diagram.source != shape:
        raise EndpointMismatch("projections have different shapes")
    obj_map = {}
    for r in shape.objects:
        sig = sign_schema.at(r)
        dom = data_diagram.on_obj(r)
        if sig.sort_set != dom.sorts:
            raise SortDiagramMismatch(
                "sort sets disagree at object %r" % (r,))
        obj_map[r] = SignedDomain(sig, dom)
    mor_map = {}
    for f in shape.morphisms:
        h = sign_schema.diagram.on_mor(f)
        info = data_diagram.on_mor(f)
        sort_fn = h.sort_fn if isinstance(h, ListMor) \
            else {x: x for x in h.src.sort_set}
        if sort_fn != info.sort_map:
            raise SortDiagramMismatch(
                "sort translations disagree at morphism %r" % (f,))
        mor_map[f] = DomMor(obj_map[shape.morphisms[f][0]],
                            obj_map[shape.morphisms[f][1]],
                            h.index_map, info)
    return SchemedDomain(shape, Passage(shape, DOM, obj_map, mor_map))


def dom_projection(db):
    """Schemed domain underlying a database: signatures and domains of the
    tables, with the arrow images' column parts."""
    shape = db.shape
    obj_map = {}
    mor_map = {}
    if db.domain is not None:
        for r in shape.objects:
            obj_map[r] = db.at(r).sig
        for f in shape.morphisms:
            h = db.arrow(f).sig_mor
            mor_map[f] = h  # runs covariantly along the shape arrow
        diagram = Passage(shape, ListX(db.domain.sorts), obj_map, mor_map)
        return SchemedDomain(shape, diagram, db.domain)
    for r in shape.objects:
        obj_map[r] = db.at(r).dom
    for f in shape.morphisms:
        mor_map[f] = db.arrow(f).dom_mor
    return SchemedDomain(shape, Passage(shape, DOM, obj_map, mor_map))


def key_projection(db):
    """Key sets of a database, as a diagram over the opposite shape."""
    op_shape = opposite(db.shape)
    return Passage(
        op_shape, SET,
        {r: frozenset(db.at(r).keys) for r in op_shape.objects},
        {f: key_fn(db.arrow(f)) for f in op_shape.morphisms})


def tuple_diagram(db):
    """Tuple sets of a database, as a diagram over the opposite shape."""
    op_shape = opposite(db.shape)
    obj_map = {r: frozenset(tup_set(db.at(r).dom)) for r in op_shape.objects}
    mor_map = {}
    for f in op_shape.morphisms:
        u = db.arrow(f)
        if db.domain is not None:
            mor_map[f] = tup_fn_fixed(u.sig_mor, db.domain)
        else:
            mor_map[f] = tup_fn(u.dom_mor)
    return Passage(op_shape, SET, obj_map, mor_map)


def tuple_bridge(db):
    """The tuple map of every table, as a bridge from the key diagram to the
    tuple diagram.  Its naturality is exactly the tables' arrow conditions,
    so building it re-verifies the database."""
    comps = {r: SetFn(db.at(r).keys, tup_set(db.at(r).dom), db.at(r).tuples)
             for r in db.shape.objects}
    return Bridge(key_projection(db), tuple_diagram(db), comps)


def key_projection_morphism(m):
    """Key part of a database morphism, componentwise."""
    comps = {r2: key_fn(m.component(r2)) for r2 in m.tgt.shape.objects}
    return Bridge(
        compose_passages(opposite_passage(m.shape), key_projection(m.src)),
        key_projection(m.tgt), comps)


class CheckReport:
    """Outcome of validating a database morphism componentwise."""

    def __init__(self, failures):
        self.failures = list(failures)

    @property
    def ok(self):
        return not self.failures

    def __repr__(self):
        if self.ok:
            return "CheckReport(ok)"
        return "CheckReport(%d failures)" % len(self.failures)


def check_database_morphism(m):
    """Re-verify a database morphism from scratch: component endpoints, the
    key/tuple compatibility condition at every object, and naturality at
    every arrow of the target shape.  Returns a report instead of raising."""
    failures = []
    src, tgt = m.src, m.tgt
    fixed = tgt.domain is not None and src.domain == tgt.domain
    for r2 in tgt.shape.objects:
        below = src.at(m.shape.on_obj(r2))
        comp = m.component(r2)
        if comp.src != below or comp.tgt != tgt.at(r2):
            failures.append("component at %r has wrong endpoints" % (r2,))
            continue
        if fixed:
            transport = tup_fn_fixed(comp.sig_mor, tgt.domain)
        else:
            transport = tup_fn(comp.dom_mor)
        for k in below.keys:
            mapped = comp.key_map.get(k)
            if mapped not in tgt.at(r2).keys:
                failures.append("key %r at %r not mapped" % (k, r2))
                continue
            if tgt.at(r2).tuples[mapped] != transport(below.tuples[k]):
                failures.append(
                    "tuple condition fails at object %r, key %r" % (r2, k))
    cat = tgt.category()
    for f in tgt.shape.morphisms:
        s, t = tgt.shape.morphisms[f]
        below = src.diagram.on_mor(m.shape.on_mor(f))
        above = tgt.diagram.on_mor(f)
        try:
            left = cat.compose(below, m.component(s))
            right = cat.compose(m.component(t), above)
        except CategoryError as e:
            failures.append("naturality at %r cannot be formed: %s" % (f, e))
            continue
        if not cat.mor_eq(left, right):
            failures.append("naturality fails at arrow %r" % (f,))
    return CheckReport(failures)


def _parallel(p, q):
    """Pointwise equality of two passages over the same finite source."""
    if p is q:
        return True
    if not isinstance(p.source, FinCategory) or p.source != q.source:
        return False
    tgt = p.target
    try:
        return (all(tgt.obj_eq(p.on_obj(x), q.on_obj(x))
                    for x in p.source.objects)
                and all(tgt.mor_eq(p.on_mor(f), q.on_mor(f))
                        for f in p.source.morphisms))
    except CategoryError:
        return False
