"""Typed values, signatures, and tables: the single-table layer.

A type domain classifies values by sorts; a signature assigns sorts to column
indices; a table is a key set together with a sort-correct tuple for each key.
Changing the type domain along a pair of maps (sorts forward, values backward)
induces adjoint transports on signatures and on whole tables, and this module
builds those transports together with explicit unit/counit witnesses so the
adjunctions can be checked rather than trusted.

Sets are ``frozenset``s, functions are dictionaries, and a tuple is stored as
an association tuple sorted by a canonical key, so equality is structural
everywhere and output is deterministic under hash randomization.
"""

import itertools

from .fincat import (
    Bridge,
    CategoryError,
    CategoryInterface,
    EndpointMismatch,
    OppositeInterface,
    Passage,
    compose_passages,
)


class SortConditionViolation(CategoryError):
    pass


class InfomorphismViolation(CategoryError):
    pass


class MissingAdjunctionWitness(CategoryError):
    pass


def value_key(v):
    """Total ordering key for heterogeneous hashable values.

    Sorting by ``repr`` alone is not stable for frozensets (iteration order
    depends on the hash seed), so containers are keyed recursively.
    """
    if isinstance(v, frozenset):
        return "fs{" + ",".join(sorted(value_key(x) for x in v)) + "}"
    if isinstance(v, tuple):
        return "tp(" + ",".join(value_key(x) for x in v) + ")"
    return "%s:%r" % (type(v).__name__, v)


def sorted_values(vs):
    return sorted(vs, key=value_key)


# --------------------------------------------------------------------- tuples
#
# A tuple over a signature is a total assignment index -> value, stored as an
# association tuple in canonical index order so it is hashable and comparable.


def tuple_make(assignment):
    return tuple(sorted(assignment.items(), key=lambda kv: value_key(kv[0])))


def tuple_get(t, i):
    for j, v in t:
        if j == i:
            return v
    raise KeyError(i)


def tuple_as_dict(t):
    return dict(t)


def tuple_reindex(t, index_map, new_indices):
    """Precompose: result(i) = t(index_map(i)) for each new index."""
    return tuple_make({i: tuple_get(t, index_map[i]) for i in new_indices})


def tuple_mapvals(t, value_map):
    return tuple_make({i: value_map[v] for i, v in t})


# ----------------------------------------------------------------- categories


class SetFn:
    """A function between finite sets, with explicit endpoints."""

    def __init__(self, src, tgt, mapping):
        self.src = frozenset(src)
        self.tgt = frozenset(tgt)
        self.mapping = dict(mapping)
        missing = self.src - set(self.mapping)
        if missing:
            raise CategoryError("function undefined on %r" % sorted_values(missing))
        for x in self.src:
            if self.mapping[x] not in self.tgt:
                raise CategoryError("value %r of %r outside the codomain"
                                    % (self.mapping[x], x))

    def __call__(self, x):
        return self.mapping[x]

    def __eq__(self, other):
        return (isinstance(other, SetFn) and self.src == other.src
                and self.tgt == other.tgt
                and all(self.mapping[x] == other.mapping[x] for x in self.src))

    def __repr__(self):
        return "SetFn(%d -> %d elements)" % (len(self.src), len(self.tgt))


class SetCat(CategoryInterface):
    """Finite sets (frozensets) and functions (SetFn)."""

    def obj_eq(self, a, b):
        return frozenset(a) == frozenset(b)

    def mor_eq(self, f, g):
        return f == g

    def identity(self, a):
        return SetFn(a, a, {x: x for x in a})

    def compose(self, f, g):
        if f.tgt != g.src:
            raise EndpointMismatch("function endpoints do not meet")
        return SetFn(f.src, g.tgt, {x: g(f(x)) for x in f.src})

    def source(self, f):
        return f.src

    def target(self, f):
        return f.tgt

    def hom(self, a, b):
        a = sorted_values(a)
        b = sorted_values(b)
        if a and not b:
            return []
        out = []
        for images in itertools.product(b, repeat=len(a)):
            out.append(SetFn(a, b, dict(zip(a, images))))
        return out

    def obj_label(self, a):
        return "{" + ",".join(value_key(x) for x in sorted_values(a)) + "}"

    def mor_label(self, f):
        return "[" + ";".join("%s->%s" % (value_key(x), value_key(f(x)))
                              for x in sorted_values(f.src)) + "]"

    def __eq__(self, other):
        return isinstance(other, SetCat)


SET = SetCat()


class TypeDomain:
    """Sorts, values, and which values belong to which sort."""

    def __init__(self, sorts, values, incidence):
        self.sorts = frozenset(sorts)
        self.values = frozenset(values)
        self.incidence = frozenset(incidence)
        for y, x in self.incidence:
            if x not in self.sorts or y not in self.values:
                raise CategoryError(
                    "incidence pair (%r, %r) uses undeclared sort or value"
                    % (y, x))

    def classifies(self, y, x):
        return (y, x) in self.incidence

    def extent(self, x):
        if x not in self.sorts:
            raise CategoryError("unknown sort %r" % x)
        return frozenset(y for y, x_ in self.incidence if x_ == x)

    def __eq__(self, other):
        return (isinstance(other, TypeDomain) and self.sorts == other.sorts
                and self.values == other.values
                and self.incidence == other.incidence)

    def __hash__(self):
        return hash((self.sorts, self.values, self.incidence))

    def __repr__(self):
        return "TypeDomain(%d sorts, %d values)" % (
            len(self.sorts), len(self.values))


class Infomorphism:
    """A pair of maps between type domains: sorts forward, values backward.

    ``sort_map`` sends each sort of ``source`` to a sort of ``target``;
    ``value_map`` sends each value of ``target`` back to a value of
    ``source``.  They must respect classification in both directions: a
    target value ``y`` belongs to the translated sort exactly when the pulled
    value belongs to the original sort.
    """

    def __init__(self, source, target, sort_map, value_map):
        self.source = source
        self.target = target
        self.sort_map = dict(sort_map)
        self.value_map = dict(value_map)
        for x in source.sorts:
            if self.sort_map.get(x) not in target.sorts:
                raise InfomorphismViolation("sort %r not mapped into the "
                                            "target domain" % x)
        for y in target.values:
            if self.value_map.get(y) not in source.values:
                raise InfomorphismViolation("value %r not mapped into the "
                                            "source domain" % y)
        for y in target.values:
            for x in source.sorts:
                lhs = target.classifies(y, self.sort_map[x])
                rhs = source.classifies(self.value_map[y], x)
                if lhs != rhs:
                    raise InfomorphismViolation(
                        "classification not preserved at value %r, sort %r"
                        % (y, x))

    def __eq__(self, other):
        return (isinstance(other, Infomorphism)
                and self.source == other.source and self.target == other.target
                and self.sort_map == other.sort_map
                and self.value_map == other.value_map)

    def __repr__(self):
        return "Infomorphism(%r <-> %r)" % (self.source, self.target)


def identity_infomorphism(domain):
    return Infomorphism(domain, domain,
                        {x: x for x in domain.sorts},
                        {y: y for y in domain.values})


def compose_infomorphisms(m1, m2):
    """First ``m1``, then ``m2`` (sources chain: m1.target == m2.source)."""
    if m1.target != m2.source:
        raise EndpointMismatch("infomorphism endpoints do not meet")
    return Infomorphism(
        m1.source, m2.target,
        {x: m2.sort_map[m1.sort_map[x]] for x in m1.source.sorts},
        {y: m1.value_map[m2.value_map[y]] for y in m2.target.values})


def all_infomorphisms(source, target):
    """Enumerate every valid infomorphism between two small type domains."""
    xs = sorted_values(source.sorts)
    ys = sorted_values(target.values)
    out = []
    x_opts = sorted_values(target.sorts)
    y_opts = sorted_values(source.values)
    if (xs and not x_opts) or (ys and not y_opts):
        return out
    for fs in itertools.product(x_opts, repeat=len(xs)):
        for gs in itertools.product(y_opts, repeat=len(ys)):
            try:
                out.append(Infomorphism(source, target,
                                        dict(zip(xs, fs)), dict(zip(ys, gs))))
            except InfomorphismViolation:
                pass
    return out


class Signature:
    """A finite index set with a sort for each index, over a fixed sort set."""

    def __init__(self, arity, sorts, sort_set):
        self.arity = frozenset(arity)
        self.sorts = dict(sorts)
        self.sort_set = frozenset(sort_set)
        for i in self.arity:
            if self.sorts.get(i) not in self.sort_set:
                raise SortConditionViolation(
                    "index %r has no sort in the sort set" % (i,))

    def sort_of(self, i):
        return self.sorts[i]

    def __eq__(self, other):
        return (isinstance(other, Signature) and self.arity == other.arity
                and self.sort_set == other.sort_set
                and all(self.sorts[i] == other.sorts[i] for i in self.arity))

    def __hash__(self):
        return hash((self.arity, self.sort_set,
                     tuple(sorted(((i, self.sorts[i]) for i in self.arity),
                                  key=lambda kv: value_key(kv[0])))))

    def __repr__(self):
        return "Signature(%d columns over %d sorts)" % (
            len(self.arity), len(self.sort_set))


class SigMorphism:
    """A sort-preserving reindexing between signatures over the same sorts.

    ``index_map`` sends each index of ``src`` to an index of ``tgt`` with the
    same sort.
    """

    def __init__(self, src, tgt, index_map):
        if src.sort_set != tgt.sort_set:
            raise SortConditionViolation("signatures have different sort sets")
        self.src = src
        self.tgt = tgt
        self.index_map = dict(index_map)
        for i in src.arity:
            j = self.index_map.get(i)
            if j not in tgt.arity:
                raise SortConditionViolation("index %r not mapped" % (i,))
            if src.sorts[i] != tgt.sorts[j]:
                raise SortConditionViolation(
                    "index %r changes sort: %r vs %r"
                    % (i, src.sorts[i], tgt.sorts[j]))

    def __call__(self, i):
        return self.index_map[i]

    def __eq__(self, other):
        return (isinstance(other, SigMorphism) and self.src == other.src
                and self.tgt == other.tgt
                and all(self.index_map[i] == other.index_map[i]
                        for i in self.src.arity))

    def __repr__(self):
        return "SigMorphism(%r -> %r)" % (self.src, self.tgt)


class ListX(CategoryInterface):
    """Signatures over a fixed sort set, with sort-preserving reindexings."""

    def __init__(self, sort_set):
        self.sort_set = frozenset(sort_set)

    def obj_eq(self, a, b):
        return a == b

    def mor_eq(self, f, g):
        return f == g

    def identity(self, a):
        return SigMorphism(a, a, {i: i for i in a.arity})

    def compose(self, f, g):
        if f.tgt != g.src:
            raise EndpointMismatch("signature morphisms do not meet")
        return SigMorphism(f.src, g.tgt,
                           {i: g.index_map[f.index_map[i]] for i in f.src.arity})

    def source(self, f):
        return f.src

    def target(self, f):
        return f.tgt

    def hom(self, a, b):
        idx = sorted_values(a.arity)
        opts = []
        for i in idx:
            same_sort = [j for j in sorted_values(b.arity)
                         if b.sorts[j] == a.sorts[i]]
            if not same_sort:
                return []
            opts.append(same_sort)
        return [SigMorphism(a, b, dict(zip(idx, combo)))
                for combo in itertools.product(*opts)]

    def obj_label(self, a):
        return "sig{" + ",".join("%s:%s" % (value_key(i), value_key(a.sorts[i]))
                                 for i in sorted_values(a.arity)) + "}"

    def mor_label(self, f):
        return "[" + ";".join("%s->%s" % (value_key(i), value_key(f(i)))
                              for i in sorted_values(f.src.arity)) + "]"

    def __eq__(self, other):
        return isinstance(other, ListX) and self.sort_set == other.sort_set


class ListMor:
    """A morphism of signatures over varying sort sets: a reindexing plus a
    sort translation making the sort squares commute."""

    def __init__(self, src, tgt, index_map, sort_fn):
        self.src = src
        self.tgt = tgt
        self.index_map = dict(index_map)
        self.sort_fn = dict(sort_fn)
        for x in src.sort_set:
            if self.sort_fn.get(x) not in tgt.sort_set:
                raise SortConditionViolation("sort %r not translated" % (x,))
        for i in src.arity:
            j = self.index_map.get(i)
            if j not in tgt.arity:
                raise SortConditionViolation("index %r not mapped" % (i,))
            if self.sort_fn[src.sorts[i]] != tgt.sorts[j]:
                raise SortConditionViolation(
                    "sort square does not commute at index %r" % (i,))

    def __eq__(self, other):
        return (isinstance(other, ListMor) and self.src == other.src
                and self.tgt == other.tgt
                and all(self.index_map[i] == other.index_map[i]
                        for i in self.src.arity)
                and all(self.sort_fn[x] == other.sort_fn[x]
                        for x in self.src.sort_set))

    def __repr__(self):
        return "ListMor(%r -> %r)" % (self.src, self.tgt)


class ListCat(CategoryInterface):
    """Signatures over varying sort sets."""

    def obj_eq(self, a, b):
        return a == b

    def mor_eq(self, f, g):
        return f == g

    def identity(self, a):
        return ListMor(a, a, {i: i for i in a.arity},
                       {x: x for x in a.sort_set})

    def compose(self, f, g):
        if f.tgt != g.src:
            raise EndpointMismatch("signature morphisms do not meet")
        return ListMor(f.src, g.tgt,
                       {i: g.index_map[f.index_map[i]] for i in f.src.arity},
                       {x: g.sort_fn[f.sort_fn[x]] for x in f.src.sort_set})

    def source(self, f):
        return f.src

    def target(self, f):
        return f.tgt

    def __eq__(self, other):
        return isinstance(other, ListCat)


LIST = ListCat()


class ClsCat(CategoryInterface):
    """Type domains and infomorphisms."""

    def obj_eq(self, a, b):
        return a == b

    def mor_eq(self, f, g):
        return f == g

    def identity(self, a):
        return identity_infomorphism(a)

    def compose(self, f, g):
        return compose_infomorphisms(f, g)

    def source(self, f):
        return f.source

    def target(self, f):
        return f.target

    def __eq__(self, other):
        return isinstance(other, ClsCat)


CLS = ClsCat()


class SignedDomain:
    """A signature together with a type domain over the same sort set."""

    def __init__(self, sig, domain):
        if sig.sort_set != domain.sorts:
            raise SortConditionViolation(
                "signature sorts differ from the domain's sorts")
        self.sig = sig
        self.domain = domain

    def __eq__(self, other):
        return (isinstance(other, SignedDomain) and self.sig == other.sig
                and self.domain == other.domain)

    def __hash__(self):
        return hash((self.sig, self.domain))

    def __repr__(self):
        return "SignedDomain(%r, %r)" % (self.sig, self.domain)


class DomMor:
    """A morphism of signed domains: reindexing plus an infomorphism.

    From ``src`` over domain ``A_s`` to ``tgt`` over ``A_t`` it carries
    ``index_map: src.arity -> tgt.arity``, and an infomorphism whose sort map
    runs ``A_s -> A_t`` and whose value map runs backward, such that sorts
    commute: ``sort_map(src.sort(i)) == tgt.sort(index_map(i))``.
    """

    def __init__(self, src, tgt, index_map, info):
        self.src = src
        self.tgt = tgt
        self.index_map = dict(index_map)
        self.info = info
        if info.source != src.domain or info.target != tgt.domain:
            raise EndpointMismatch("infomorphism does not match the domains")
        for i in src.sig.arity:
            j = self.index_map.get(i)
            if j not in tgt.sig.arity:
                raise SortConditionViolation("index %r not mapped" % (i,))
            if info.sort_map[src.sig.sorts[i]] != tgt.sig.sorts[j]:
                raise SortConditionViolation(
                    "sort square does not commute at index %r" % (i,))

    def __eq__(self, other):
        return (isinstance(other, DomMor) and self.src == other.src
                and self.tgt == other.tgt and self.info == other.info
                and all(self.index_map[i] == other.index_map[i]
                        for i in self.src.sig.arity))

    def __repr__(self):
        return "DomMor(%r -> %r)" % (self.src, self.tgt)


class DomCat(CategoryInterface):
    """Signed domains over varying type domains."""

    def obj_eq(self, a, b):
        return a == b

    def mor_eq(self, f, g):
        return f == g

    def identity(self, a):
        return DomMor(a, a, {i: i for i in a.sig.arity},
                      identity_infomorphism(a.domain))

    def compose(self, f, g):
        if f.tgt != g.src:
            raise EndpointMismatch("signed-domain morphisms do not meet")
        return DomMor(f.src, g.tgt,
                      {i: g.index_map[f.index_map[i]] for i in f.src.sig.arity},
                      compose_infomorphisms(f.info, g.info))

    def source(self, f):
        return f.src

    def target(self, f):
        return f.tgt

    def __eq__(self, other):
        return isinstance(other, DomCat)


DOM = DomCat()


# ---------------------------------------------------------------- tuple sets


def tup_set(d):
    """All sort-correct tuples of a signed domain, canonically ordered."""
    idx = sorted_values(d.sig.arity)
    extents = [sorted_values(d.domain.extent(d.sig.sorts[i])) for i in idx]
    out = []
    for combo in itertools.product(*extents):
        out.append(tuple_make(dict(zip(idx, combo))))
    return sorted(out, key=value_key)


def tup_fn(m):
    """Tuple transport along a signed-domain morphism, contravariantly.

    For ``m: D2 -> D1`` this is the function ``tup(D1) -> tup(D2)`` sending
    ``t`` to ``i ↦ value_map(t(index_map(i)))``.
    """
    src_tuples = tup_set(m.tgt)
    tgt_tuples = tup_set(m.src)
    g = m.info.value_map
    mapping = {}
    for t in src_tuples:
        image = tuple_make({i: g[tuple_get(t, m.index_map[i])]
                            for i in m.src.sig.arity})
        mapping[t] = image
    fn = SetFn(src_tuples, tgt_tuples, mapping)
    return fn


def tup_fn_fixed(h, domain):
    """Tuple transport along a same-domain signature morphism ``h: S2 -> S1``:
    the function ``tup(S1) -> tup(S2)``, ``t ↦ t ∘ h``."""
    d2 = SignedDomain(h.src, domain)
    d1 = SignedDomain(h.tgt, domain)
    mapping = {t: tuple_reindex(t, h.index_map, h.src.arity)
               for t in tup_set(d1)}
    return SetFn(tup_set(d1), tup_set(d2), mapping)


def tup_passage(domain):
    """The tuple functor of a fixed type domain, contravariant on signatures:
    a passage from the opposite of the signature category to sets."""
    lx = ListX(domain.sorts)
    return Passage(
        OppositeInterface(lx), SET,
        lambda s: frozenset(tup_set(SignedDomain(s, domain))),
        lambda h: tup_fn_fixed(h, domain),
        check=False)


# -------------------------------------------------------------------- tables


class Table:
    """A key set with a sort-correct tuple for each key."""

    def __init__(self, dom, keys, tuples):
        self.dom = dom
        self.keys = frozenset(keys)
        self.tuples = dict(tuples)
        valid = set(tup_set(dom))
        for k in self.keys:
            if k not in self.tuples:
                raise CategoryError("key %r has no tuple" % (k,))
            if self.tuples[k] not in valid:
                raise CategoryError(
                    "tuple for key %r is not sort-correct: %r"
                    % (k, self.tuples[k]))

    @property
    def sig(self):
        return self.dom.sig

    @property
    def domain(self):
        return self.dom.domain

    def __eq__(self, other):
        return (isinstance(other, Table) and self.dom == other.dom
                and self.keys == other.keys
                and all(self.tuples[k] == other.tuples[k] for k in self.keys))

    def __hash__(self):
        return hash((self.dom, self.keys,
                     tuple(sorted(((k, self.tuples[k]) for k in self.keys),
                                  key=lambda kv: value_key(kv[0])))))

    def __repr__(self):
        return "Table(%d columns, %d keys)" % (len(self.sig.arity),
                                               len(self.keys))


class TableMorphism:
    """A morphism of tables over one type domain.

    From ``src`` to ``tgt`` it carries a signature morphism
    ``sig_mor: tgt.sig -> src.sig`` (columns travel backward) and a key map
    ``key_map: src.keys -> tgt.keys`` (keys travel forward), such that the
    tuple at an image key is the reindexed source tuple.
    """

    def __init__(self, src, tgt, sig_mor, key_map, check=True):
        self.src = src
        self.tgt = tgt
        self.sig_mor = sig_mor
        self.key_map = dict(key_map)
        if check:
            self._validate()

    def _validate(self):
        if self.src.domain != self.tgt.domain:
            raise EndpointMismatch("tables live over different type domains")
        if self.sig_mor.src != self.tgt.sig or self.sig_mor.tgt != self.src.sig:
            raise EndpointMismatch(
                "signature morphism must run from target to source signature")
        for k in self.src.keys:
            if self.key_map.get(k) not in self.tgt.keys:
                raise CategoryError("key %r not mapped into the target" % (k,))
            expected = tuple_reindex(self.src.tuples[k],
                                     self.sig_mor.index_map,
                                     self.tgt.sig.arity)
            if self.tgt.tuples[self.key_map[k]] != expected:
                raise CategoryError(
                    "tuple condition fails at key %r: %r != %r"
                    % (k, self.tgt.tuples[self.key_map[k]], expected))

    def __eq__(self, other):
        return (isinstance(other, TableMorphism) and self.src == other.src
                and self.tgt == other.tgt and self.sig_mor == other.sig_mor
                and all(self.key_map[k] == other.key_map[k]
                        for k in self.src.keys))

    def __repr__(self):
        return "TableMorphism(%r -> %r)" % (self.src, self.tgt)


class TblA(CategoryInterface):
    """Tables over one fixed type domain."""

    def __init__(self, domain):
        self.domain = domain

    def obj_eq(self, a, b):
        return a == b

    def mor_eq(self, f, g):
        return f == g

    def identity(self, a):
        return TableMorphism(a, a, SigMorphism(a.sig, a.sig,
                                               {i: i for i in a.sig.arity}),
                             {k: k for k in a.keys})

    def compose(self, f, g):
        if f.tgt != g.src:
            raise EndpointMismatch("table morphisms do not meet")
        lx = ListX(self.domain.sorts)
        return TableMorphism(
            f.src, g.tgt,
            lx.compose(g.sig_mor, f.sig_mor),
            {k: g.key_map[f.key_map[k]] for k in f.src.keys})

    def source(self, f):
        return f.src

    def target(self, f):
        return f.tgt

    def hom(self, a, b):
        lx = ListX(self.domain.sorts)
        out = []
        keys_a = sorted_values(a.keys)
        keys_b = sorted_values(b.keys)
        if keys_a and not keys_b:
            return []
        for h in lx.hom(b.sig, a.sig):
            for combo in itertools.product(keys_b, repeat=len(keys_a)):
                try:
                    out.append(TableMorphism(a, b, h, dict(zip(keys_a, combo))))
                except CategoryError:
                    pass
        return out

    def __eq__(self, other):
        return isinstance(other, TblA) and self.domain == other.domain


class GenTableMorphism:
    """A morphism of tables over different type domains: a signed-domain
    morphism running target-to-source plus a forward key map satisfying the
    tuple-transport condition."""

    def __init__(self, src, tgt, dom_mor, key_map, check=True):
        self.src = src
        self.tgt = tgt
        self.dom_mor = dom_mor
        self.key_map = dict(key_map)
        if check:
            self._validate()

    def _validate(self):
        if self.dom_mor.src != self.tgt.dom or self.dom_mor.tgt != self.src.dom:
            raise EndpointMismatch(
                "signed-domain morphism must run from target to source")
        transport = tup_fn(self.dom_mor)
        for k in self.src.keys:
            if self.key_map.get(k) not in self.tgt.keys:
                raise CategoryError("key %r not mapped into the target" % (k,))
            if self.tgt.tuples[self.key_map[k]] != transport(self.src.tuples[k]):
                raise CategoryError(
                    "tuple transport condition fails at key %r" % (k,))

    def __eq__(self, other):
        return (isinstance(other, GenTableMorphism) and self.src == other.src
                and self.tgt == other.tgt and self.dom_mor == other.dom_mor
                and all(self.key_map[k] == other.key_map[k]
                        for k in self.src.keys))


class TblCat(CategoryInterface):
    """Tables over varying type domains."""

    def obj_eq(self, a, b):
        return a == b

    def mor_eq(self, f, g):
        return f == g

    def identity(self, a):
        return GenTableMorphism(a, a, DOM.identity(a.dom),
                                {k: k for k in a.keys})

    def compose(self, f, g):
        if f.tgt != g.src:
            raise EndpointMismatch("table morphisms do not meet")
        return GenTableMorphism(
            f.src, g.tgt,
            DOM.compose(g.dom_mor, f.dom_mor),
            {k: g.key_map[f.key_map[k]] for k in f.src.keys})

    def source(self, f):
        return f.src

    def target(self, f):
        return f.tgt

    def __eq__(self, other):
        return isinstance(other, TblCat)


TBL = TblCat()


# -------------------------------------------------------- table projections


def sign_of(table):
    return table.sig


def key_of(table):
    return table.keys


def dom_of(table):
    return table.dom


def data_of(table):
    """The tuple map of a table, as an explicit function into its tuple set."""
    return SetFn(table.keys, tup_set(table.dom), table.tuples)


def key_fn(tm):
    """Key part of a table morphism, functorially (forward)."""
    return SetFn(tm.src.keys, tm.tgt.keys, tm.key_map)


def sign_fn(tm):
    """Signature part of a table morphism (runs target to source)."""
    return tm.sig_mor


# ------------------------------------------------------ adjunction machinery


class AdjunctionWitness:
    """A left/right adjoint pair with explicit unit and counit.

    ``left: C -> D`` and ``right: D -> C``; ``unit: Id_C => left;right`` and
    ``counit: right;left => Id_D``.  Large fibers make exhaustive validation
    impossible, so the triangle identities are checked on demand for the
    objects actually touched.
    """

    def __init__(self, left, right, unit, counit):
        self.left = left
        self.right = right
        self.unit = unit
        self.counit = counit

    def check_triangles(self, c_objects=(), d_objects=()):
        c = self.left.source
        d = self.left.target
        for a in c_objects:
            la = self.left.on_obj(a)
            lhs = d.compose(self.left.on_mor(self.unit.at(a)),
                            self.counit.at(la))
            if not d.mor_eq(lhs, d.identity(la)):
                raise CategoryError("first triangle identity fails at %r" % (a,))
        for b in d_objects:
            rb = self.right.on_obj(b)
            lhs = c.compose(self.unit.at(rb),
                            self.right.on_mor(self.counit.at(b)))
            if not c.mor_eq(lhs, c.identity(rb)):
                raise CategoryError("second triangle identity fails at %r" % (b,))
        return True

    def right_mate(self, a, u):
        """Turn ``u: left(a) -> b`` into ``a -> right(b)``."""
        return self.left.source.compose(self.unit.at(a), self.right.on_mor(u))

    def left_mate(self, b, v):
        """Turn ``v: a -> right(b)`` into ``left(a) -> b``."""
        return self.left.target.compose(self.left.on_mor(v), self.counit.at(b))


def sigma_f(f, source_sorts, target_sorts):
    """Direct signature transport along a sort function ``f``: keep the
    indices, compose the sort assignment with ``f``."""
    lx2 = ListX(source_sorts)
    lx1 = ListX(target_sorts)

    def on_obj(s):
        return Signature(s.arity, {i: f[s.sorts[i]] for i in s.arity},
                         target_sorts)

    def on_mor(h):
        return SigMorphism(on_obj(h.src), on_obj(h.tgt), h.index_map)

    return Passage(lx2, lx1, on_obj, on_mor, check=False)


def f_star(f, source_sorts, target_sorts):
    """Inverse-image signature transport: indices become pairs ``(i, x)``
    with ``f(x)`` equal to the sort of ``i``, sorted by second component."""
    lx2 = ListX(source_sorts)
    lx1 = ListX(target_sorts)

    def on_obj(s):
        arity = frozenset((i, x) for i in s.arity for x in source_sorts
                          if f[x] == s.sorts[i])
        return Signature(arity, {(i, x): x for (i, x) in arity}, source_sorts)

    def on_mor(h):
        return SigMorphism(on_obj(h.src), on_obj(h.tgt),
                           {(i, x): (h.index_map[i], x)
                            for (i, x) in on_obj(h.src).arity})

    return Passage(lx1, lx2, on_obj, on_mor, check=False)


def list_fiber_adjunction(f, source_sorts, target_sorts):
    """The direct/inverse signature transports as an adjoint pair."""
    left = sigma_f(f, source_sorts, target_sorts)
    right = f_star(f, source_sorts, target_sorts)

    def unit_at(s):
        # s over the source sorts; include each index as the pair (i, sort(i))
        fs = right.on_obj(left.on_obj(s))
        return SigMorphism(s, fs, {i: (i, s.sorts[i]) for i in s.arity})

    def counit_at(s):
        # s over the target sorts; forget the chosen preimage sort
        sf = left.on_obj(right.on_obj(s))
        return SigMorphism(sf, s, {(i, x): i for (i, x) in sf.arity})

    unit = Bridge(Passage(left.source, left.source, lambda x: x, lambda m: m,
                          check=False),
                  compose_passages(left, right), unit_at, check=False)
    counit = Bridge(compose_passages(right, left),
                    Passage(right.source, right.source, lambda x: x,
                            lambda m: m, check=False),
                    counit_at, check=False)
    return AdjunctionWitness(left, right, unit, counit)


def tbl_acute(info):
    """Table transport toward the infomorphism's source domain: pull the
    signature back along the sort map and push values with the value map;
    keys are unchanged."""
    a1, a2 = info.target, info.source
    fst = f_star(info.sort_map, a2.sorts, a1.sorts)
    g = info.value_map

    def on_obj(t1):
        s_new = fst.on_obj(t1.sig)
        tuples = {}
        for k in t1.keys:
            tuples[k] = tuple_make({(i, x): g[tuple_get(t1.tuples[k], i)]
                                    for (i, x) in s_new.arity})
        return Table(SignedDomain(s_new, a2), t1.keys, tuples)

    def on_mor(u):
        return TableMorphism(on_obj(u.src), on_obj(u.tgt),
                             fst.on_mor(u.sig_mor), u.key_map)

    return Passage(TblA(a1), TblA(a2), on_obj, on_mor, check=False)


def tbl_grave(info):
    """Table transport toward the infomorphism's target domain: push the
    signature forward along the sort map; a key is a pair of an original key
    and a tuple over the pushed signature whose value image reproduces the
    original tuple."""
    a1, a2 = info.target, info.source
    sig_push = sigma_f(info.sort_map, a2.sorts, a1.sorts)
    g = info.value_map

    def on_obj(t2):
        s_new = sig_push.on_obj(t2.sig)
        d_new = SignedDomain(s_new, a1)
        keys = []
        tuples = {}
        for k2 in sorted_values(t2.keys):
            for t in tup_set(d_new):
                if tuple_mapvals(t, g) == t2.tuples[k2]:
                    keys.append((k2, t))
                    tuples[(k2, t)] = t
        return Table(d_new, keys, tuples)

    def on_mor(v):
        src_new = on_obj(v.src)
        tgt_new = on_obj(v.tgt)
        h = v.sig_mor
        h_new = sig_push.on_mor(h)
        key_map = {}
        for (k2, t) in src_new.keys:
            key_map[(k2, t)] = (v.key_map[k2],
                                tuple_reindex(t, h.index_map, h.src.arity))
        return TableMorphism(src_new, tgt_new, h_new, key_map)

    return Passage(TblA(a2), TblA(a1), on_obj, on_mor, check=False)


def tbl_fiber_adjunction(info):
    """The two table transports as an adjoint pair with explicit witnesses."""
    a1, a2 = info.target, info.source
    left = tbl_acute(info)
    right = tbl_grave(info)

    def unit_at(t1):
        rl = right.on_obj(left.on_obj(t1))
        sig_mor = SigMorphism(rl.sig, t1.sig,
                              {(i, x): i for (i, x) in rl.sig.arity})
        key_map = {}
        for k in t1.keys:
            witness = tuple_make(
                {(i, x): tuple_get(t1.tuples[k], i)
                 for (i, x) in rl.sig.arity})
            key_map[k] = (k, witness)
        return TableMorphism(t1, rl, sig_mor, key_map)

    def counit_at(t2):
        lr = left.on_obj(right.on_obj(t2))
        sig_mor = SigMorphism(t2.sig, lr.sig,
                              {i: (i, t2.sig.sorts[i]) for i in t2.sig.arity})
        key_map = {key: key[0] for key in lr.keys}
        return TableMorphism(lr, t2, sig_mor, key_map)

    unit = Bridge(Passage(left.source, left.source, lambda x: x, lambda m: m,
                          check=False),
                  compose_passages(left, right), unit_at, check=False)
    counit = Bridge(compose_passages(right, left),
                    Passage(right.source, right.source, lambda x: x,
                            lambda m: m, check=False),
                    counit_at, check=False)
    return AdjunctionWitness(left, right, unit, counit)


def tup_along(info):
    """The two tuple-transport bridges of an infomorphism.

    The first has a component at each signature over the target domain's
    sorts, sending one of its tuples to the induced tuple of the pulled-back
    signature; the second has a component at each signature over the source
    domain's sorts, postcomposing tuples of the pushed-forward signature with
    the value map.
    """
    a1, a2 = info.target, info.source
    g = info.value_map
    tup1 = tup_passage(a1)
    tup2 = tup_passage(a2)
    fst = f_star(info.sort_map, a2.sorts, a1.sorts)
    push = sigma_f(info.sort_map, a2.sorts, a1.sorts)
    op_fst = Passage(OppositeInterface(fst.source), OppositeInterface(fst.target),
                     fst.obj_map, fst.mor_map, check=False)
    op_push = Passage(OppositeInterface(push.source),
                      OppositeInterface(push.target),
                      push.obj_map, push.mor_map, check=False)

    def acute_at(s1):
        src = frozenset(tup_set(SignedDomain(s1, a1)))
        s_new = fst.on_obj(s1)
        tgt = frozenset(tup_set(SignedDomain(s_new, a2)))
        return SetFn(src, tgt,
                     {t: tuple_make({(i, x): g[tuple_get(t, i)]
                                     for (i, x) in s_new.arity})
                      for t in src})

    def grave_at(s2):
        s_new = push.on_obj(s2)
        src = frozenset(tup_set(SignedDomain(s_new, a1)))
        tgt = frozenset(tup_set(SignedDomain(s2, a2)))
        return SetFn(src, tgt, {t: tuple_mapvals(t, g) for t in src})

    acute = Bridge(tup1, compose_passages(op_fst, tup2), acute_at, check=False)
    grave = Bridge(compose_passages(op_push, tup1), tup2, grave_at, check=False)
    return acute, grave


def list_inclusion_bridges(info):
    """The two bridges tying the fiber transports of signatures into the
    category of signed domains over varying type domains."""
    a1, a2 = info.target, info.source
    lx1 = ListX(a1.sorts)
    lx2 = ListX(a2.sorts)
    inc1 = dom_inclusion(a1)
    inc2 = dom_inclusion(a2)
    push = sigma_f(info.sort_map, a2.sorts, a1.sorts)
    pull = f_star(info.sort_map, a2.sorts, a1.sorts)

    def acute_at(s):
        # s over the source-domain sorts
        sd_src = SignedDomain(s, a2)
        sd_tgt = SignedDomain(push.on_obj(s), a1)
        return DomMor(sd_src, sd_tgt, {i: i for i in s.arity}, info)

    def grave_at(s):
        # s over the target-domain sorts
        pulled = pull.on_obj(s)
        sd_src = SignedDomain(pulled, a2)
        sd_tgt = SignedDomain(s, a1)
        return DomMor(sd_src, sd_tgt,
                      {(i, x): i for (i, x) in pulled.arity}, info)

    acute = Bridge(inc2, compose_passages(push, inc1), acute_at, check=False)
    grave = Bridge(compose_passages(pull, inc2), inc1, grave_at, check=False)
    return acute, grave


def table_inclusion_bridges(info):
    """The two bridges tying the fiber transports of whole tables into the
    category of tables over varying type domains."""
    a1, a2 = info.target, info.source
    inc1 = tbl_inclusion(a1)
    inc2 = tbl_inclusion(a2)
    acute_pass = tbl_acute(info)
    grave_pass = tbl_grave(info)

    def acute_at(t1):
        image = acute_pass.on_obj(t1)
        dm = DomMor(image.dom, t1.dom,
                    {(i, x): i for (i, x) in image.sig.arity}, info)
        return GenTableMorphism(t1, image, dm, {k: k for k in t1.keys})

    def grave_at(t2):
        image = grave_pass.on_obj(t2)
        dm = DomMor(t2.dom, image.dom, {i: i for i in t2.sig.arity}, info)
        return GenTableMorphism(image, t2, dm,
                                {key: key[0] for key in image.keys})

    acute = Bridge(inc1, compose_passages(acute_pass, inc2), acute_at,
                   check=False)
    grave = Bridge(compose_passages(grave_pass, inc1), inc2, grave_at,
                   check=False)
    return acute, grave


def dom_inclusion(domain):
    """List(X) of the domain's sorts, embedded into signed domains."""
    lx = ListX(domain.sorts)
    return Passage(
        lx, DOM,
        lambda s: SignedDomain(s, domain),
        lambda h: DomMor(SignedDomain(h.src, domain),
                         SignedDomain(h.tgt, domain),
                         h.index_map, identity_infomorphism(domain)),
        check=False)


def tbl_inclusion(domain):
    """Tables over one domain, embedded into tables over varying domains."""
    ta = TblA(domain)
    return Passage(
        ta, TBL,
        lambda t: t,
        lambda u: GenTableMorphism(
            u.src, u.tgt,
            DomMor(u.tgt.dom, u.src.dom, u.sig_mor.index_map,
                   identity_infomorphism(domain)),
            u.key_map),
        check=False)
