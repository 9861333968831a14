"""Exact evaluation of words and terms in finite family models.

A model assigns a finite carrier to every declared space and a function
table to every generator.  A sheaf on a presented space is a family of
finite dimensional vector spaces indexed by the carrier; direct image
takes products over fibres, inverse image reindexes.  Natural
transformation terms evaluate to one matrix per element of the carrier
of the target space, with entries in exact rationals.  No floating
point is used anywhere.

The evaluator is deliberately independent of the rewriting layer: the
base-change cell is evaluated through its adjunction expansion, not
through any rule that the rewriter also uses, so the two routes can
check each other.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .errors import OracleError
from .sgnt import make_bc

ZERO = Fraction(0)
ONE = Fraction(1)


class Mat:
    """A dense exact-rational matrix; dimensions may be zero."""

    __slots__ = ("rows", "cols", "a")

    def __init__(self, rows, cols, a=None):
        self.rows = rows
        self.cols = cols
        if a is None:
            a = [[ZERO] * cols for _ in range(rows)]
        self.a = a

    @staticmethod
    def identity(n):
        m = Mat(n, n)
        for i in range(n):
            m.a[i][i] = ONE
        return m

    @staticmethod
    def from_rows(rows):
        r = len(rows)
        c = len(rows[0]) if rows else 0
        return Mat(r, c, [[Fraction(x) for x in row] for row in rows])

    def mul(self, other):
        if self.cols != other.rows:
            raise OracleError("matrix dimensions do not match: %dx%d @ %dx%d"
                              % (self.rows, self.cols, other.rows, other.cols))
        out = Mat(self.rows, other.cols)
        for i in range(self.rows):
            row = self.a[i]
            orow = out.a[i]
            for k in range(self.cols):
                x = row[k]
                if x:
                    brow = other.a[k]
                    for j in range(other.cols):
                        if brow[j]:
                            orow[j] += x * brow[j]
        return out

    def inverse(self):
        if self.rows != self.cols:
            raise OracleError("cannot invert a %dx%d matrix" % (self.rows, self.cols))
        n = self.rows
        work = [row[:] + irow[:] for row, irow in
                zip(self.a, Mat.identity(n).a)]
        for col in range(n):
            pivot = None
            for r in range(col, n):
                if work[r][col]:
                    pivot = r
                    break
            if pivot is None:
                raise OracleError("matrix is singular; the certified cell has "
                                  "no inverse in this model")
            work[col], work[pivot] = work[pivot], work[col]
            pv = work[col][col]
            work[col] = [x / pv for x in work[col]]
            for r in range(n):
                if r != col and work[r][col]:
                    factor = work[r][col]
                    work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
        return Mat(n, n, [row[n:] for row in work])

    def __eq__(self, other):
        return (isinstance(other, Mat) and self.rows == other.rows
                and self.cols == other.cols and self.a == other.a)

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(r) for r in self.a)))

    def __repr__(self):
        return "Mat(%d, %d, %r)" % (self.rows, self.cols,
                                    [[str(x) for x in row] for row in self.a])


def block_diag(mats):
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    out = Mat(rows, cols)
    r0 = c0 = 0
    for m in mats:
        for i in range(m.rows):
            out.a[r0 + i][c0:c0 + m.cols] = m.a[i][:]
        r0 += m.rows
        c0 += m.cols
    return out


class FamilyShape:
    """Dimension data for a sheaf on one presented space."""

    __slots__ = ("space", "dims")

    def __init__(self, space, dims):
        self.space = space
        self.dims = dict(dims)

    @staticmethod
    def ones(model, space):
        return FamilyShape(space, {x: 1 for x in model.carrier(space)})

    def __repr__(self):
        return "FamilyShape(%s, %r)" % (self.space.label(), self.dims)


class FiniteFamilyModel:
    """Finite carriers and tables interpreting a session's generators."""

    def __init__(self, session, spaces, maps, name=None):
        self.session = session
        self.name = name
        self.carriers = {}
        self.tables = {}
        for sname, labels in spaces.items():
            if sname not in session.space_ids:
                raise OracleError("model mentions unknown space %r" % sname)
            self.carriers[session.space_ids[sname]] = list(labels)
        for mname, table in maps.items():
            gid = session.gen_ids.get(mname)
            if gid is None:
                raise OracleError(
                    "model gives a table for %r, which is not a generator; "
                    "fibre products and their projections are computed" % mname)
            self.tables[gid] = dict(table)
        for uid in range(len(session.space_names)):
            if uid not in self.carriers:
                raise OracleError("model gives no carrier for space %r"
                                  % session.space_names[uid])
        for gid in range(len(session.gen_names)):
            if gid not in self.tables:
                raise OracleError("model gives no table for map %r"
                                  % session.gen_names[gid])
        self._carrier_cache = {}
        self._fiber_cache = {}
        self.validate()

    @staticmethod
    def from_tables(session, carriers, tables, name=None):
        spaces = {session.space_names[u]: c for u, c in carriers.items()}
        maps = {session.gen_names[g]: t for g, t in tables.items()}
        return FiniteFamilyModel(session, spaces, maps, name=name)

    # -- consistency -----------------------------------------------------

    def validate(self):
        s = self.session
        for gid in range(len(s.gen_names)):
            table = self.tables[gid]
            src_c = self.carriers[s.gen_src[gid]]
            dst_c = self.carriers[s.gen_dst[gid]]
            for x in src_c:
                if x not in table:
                    raise OracleError("table for %r misses %r"
                                      % (s.gen_names[gid], x))
                if table[x] not in dst_c:
                    raise OracleError("table for %r sends %r outside its target"
                                      % (s.gen_names[gid], x))
            if gid in s.iso_gens:
                image = [table[x] for x in src_c]
                if len(set(image)) != len(src_c) or len(src_c) != len(dst_c):
                    raise OracleError("declared iso %r is not bijective in "
                                      "this model" % s.gen_names[gid])
            if gid in s.mono_gens:
                image = [table[x] for x in src_c]
                if len(set(image)) != len(src_c):
                    raise OracleError("declared mono %r is not injective in "
                                      "this model" % s.gen_names[gid])
        for start, lhsw, rhsw in s.word_eqs:
            for x in self.carriers[start]:
                if self._eval_word(lhsw, x) != self._eval_word(rhsw, x):
                    raise OracleError("declared relation fails at %r" % (x,))

    # -- evaluation of spaces and maps ------------------------------------

    def _eval_word(self, word, label):
        for gid in word:
            label = self.tables[gid][label]
        return label

    def eval_expr(self, x, expr):
        i, word = expr
        return self._eval_word(word, x[i])

    def carrier(self, space):
        """Elements of a presented space, in deterministic product order."""
        out = self._carrier_cache.get(space.sid)
        if out is not None:
            return out
        pools = [self.carriers[uid] for uid in space.atoms]
        out = []
        for x in itertools.product(*pools):
            if all(self.eval_expr(x, a) == self.eval_expr(x, b)
                   for a, b in space.constraints):
                out.append(x)
        self._carrier_cache[space.sid] = out
        return out

    def eval_map(self, m, x):
        return tuple(self.eval_expr(x, e) for e in m.coords)

    def fiber(self, m, y):
        fibers = self._fiber_cache.get(m)
        if fibers is None:
            fibers = {z: [] for z in self.carrier(m.dst)}
            for x in self.carrier(m.src):
                fibers[self.eval_map(m, x)].append(x)
            self._fiber_cache[m] = fibers
        return fibers[y]


# ----------------------------------------------------------------------
# shapes under functor words


def apply_term(model, term, shape):
    f = term.map
    if term.lower:
        dims = {}
        for y in model.carrier(f.dst):
            dims[y] = sum(shape.dims[x] for x in model.fiber(f, y))
        return FamilyShape(f.dst, dims)
    dims = {}
    for z in model.carrier(f.src):
        dims[z] = shape.dims[model.eval_map(f, z)]
    return FamilyShape(f.src, dims)


def apply_word(model, word, shape):
    if shape.space is not word.src_space:
        raise OracleError("shape lives on %s, word starts at %s"
                          % (shape.space.label(), word.src_space.label()))
    for term in reversed(word.terms):
        shape = apply_term(model, term, shape)
    return shape


def eval_sgf(model, word, shape):
    return apply_word(model, word, shape)


# ----------------------------------------------------------------------
# matrices of cells and terms


def cell_matrices(model, cell, shape):
    """Component matrices of a cell at the given input shape.

    ``shape`` lives on the input space of the cell's source word.  The
    result maps each element of the output-space carrier to a matrix
    from the source-word value to the target-word value.
    """
    if cell.inverted:
        plain = cell.inverse()
        base = cell_matrices(model, plain, shape)
        return {z: m.inverse() for z, m in base.items()}
    kind = cell.kind
    if kind == "unit":
        f, = cell.params
        out = {}
        for y in model.carrier(f.dst):
            d = shape.dims[y]
            k = len(model.fiber(f, y))
            m = Mat(k * d, d)
            for b in range(k):
                for i in range(d):
                    m.a[b * d + i][i] = ONE
            out[y] = m
        return out
    if kind == "counit":
        f, = cell.params
        pushed = apply_term(model, _lower(f), shape)
        out = {}
        for x in model.carrier(f.src):
            fib = model.fiber(f, model.eval_map(f, x))
            total = pushed.dims[model.eval_map(f, x)]
            m = Mat(shape.dims[x], total)
            off = 0
            for x2 in fib:
                if x2 == x:
                    for i in range(shape.dims[x]):
                        m.a[i][off + i] = ONE
                off += shape.dims[x2]
            out[x] = m
        return out
    if kind == "comp_lower":
        f, g = cell.params
        gf = f.then(g)
        out = {}
        for z in model.carrier(g.dst):
            nested = [x for y in model.fiber(g, z) for x in model.fiber(f, y)]
            direct = model.fiber(gf, z)
            col_off = {}
            off = 0
            for x in nested:
                col_off[x] = off
                off += shape.dims[x]
            total = off
            m = Mat(total, total)
            off = 0
            for x in direct:
                d = shape.dims[x]
                for i in range(d):
                    m.a[off + i][col_off[x] + i] = ONE
                off += d
            out[z] = m
        return out
    if kind == "comp_upper":
        f, g = cell.params
        gf = f.then(g)
        out = {}
        for x in model.carrier(f.src):
            out[x] = Mat.identity(shape.dims[model.eval_map(gf, x)])
        return out
    if kind in ("triv_lower", "triv_upper"):
        x_space, = cell.params
        return {x: Mat.identity(shape.dims[x]) for x in model.carrier(x_space)}
    if kind == "bc":
        sq, = cell.params
        expanded = make_bc(cell.session, sq)
        return eval_sgnt(model, expanded, shape)
    raise OracleError("cannot evaluate cell kind %r" % kind)


def _lower(f):
    from .sgf import Term
    return Term(f, True)


def transport(model, term, comps):
    """Whisker a family of component matrices through one functor symbol."""
    f = term.map
    if term.lower:
        out = {}
        for y in model.carrier(f.dst):
            out[y] = block_diag([comps[x] for x in model.fiber(f, y)])
        return out
    out = {}
    for z in model.carrier(f.src):
        out[z] = comps[model.eval_map(f, z)]
    return out


def layer_matrices(model, layer, shape):
    inner = apply_word(model, layer.right, shape)
    comps = cell_matrices(model, layer.cell, inner)
    for term in reversed(layer.left.terms):
        comps = transport(model, term, comps)
    return comps


def eval_sgnt(model, term, shape):
    """Component matrices of a whole term at each target-carrier element."""
    out_shape = apply_word(model, term.src, shape)
    acc = {z: Mat.identity(out_shape.dims[z])
           for z in model.carrier(term.src.dst_space)}
    for layer in term.layers:
        mats = layer_matrices(model, layer, shape)
        acc = {z: mats[z].mul(acc[z]) for z in acc}
    return acc


# ----------------------------------------------------------------------
# model and shape search


def sample_model(session, rng, max_size=4):
    """One random valid model, or None if validation rejects the draw."""
    carriers = {}
    for uid in range(len(session.space_names)):
        carriers[uid] = list(range(1, rng.randint(1, max_size) + 1))
    tables = {}
    for gid in range(len(session.gen_names)):
        src_c = carriers[session.gen_src[gid]]
        dst_c = carriers[session.gen_dst[gid]]
        if gid in session.iso_gens:
            if len(src_c) != len(dst_c):
                return None
            image = dst_c[:]
            rng.shuffle(image)
            tables[gid] = dict(zip(src_c, image))
        else:
            tables[gid] = {x: rng.choice(dst_c) for x in src_c}
    try:
        return FiniteFamilyModel.from_tables(session, carriers, tables)
    except OracleError:
        return None


def sample_shape(model, space, rng, max_dim=3):
    return FamilyShape(space, {x: rng.randint(0, max_dim)
                               for x in model.carrier(space)})


def find_counterexample(phi, psi, trials=100, seed=0, models=()):
    """Search finite models for a point where two terms disagree.

    Declared models are tried first with the all-ones shape, then with
    random shapes; afterwards random models are drawn.  Models where
    some certified inverse fails to exist are skipped: they lie outside
    the declared hypotheses.  Returns a JSON-ready witness or None.
    """
    if phi.src != psi.src or phi.dst != psi.dst:
        raise OracleError("cannot compare terms with different endpoints")
    session = phi.session
    rng = random.Random(seed)
    space = phi.src.src_space

    candidates = []
    for m in models:
        candidates.append(m)
    attempts = 0
    count = 0
    while count < trials:
        if count < len(candidates):
            model = candidates[count]
        else:
            model = sample_model(session, rng)
            attempts += 1
            if model is None:
                if attempts > 50 * trials:
                    break
                continue
        count += 1
        shapes = [FamilyShape.ones(model, space)]
        for _ in range(2):
            shapes.append(sample_shape(model, space, rng))
        for shape in shapes:
            try:
                left = eval_sgnt(model, phi, shape)
                right = eval_sgnt(model, psi, shape)
            except OracleError:
                continue
            for z in model.carrier(phi.src.dst_space):
                if left[z] != right[z]:
                    return make_witness(model, shape, z, left[z], right[z])
    return None


def make_witness(model, shape, element, lhs, rhs):
    s = model.session
    return {
        "model": {
            "spaces": {s.space_names[u]: list(c)
                       for u, c in model.carriers.items()},
            "maps": {s.gen_names[g]: [[x, y] for x, y in t.items()]
                     for g, t in model.tables.items()},
        },
        "shape": {
            "space": shape.space.label(),
            "dims": [[list(x), d] for x, d in shape.dims.items()],
        },
        "element": list(element),
        "lhs": _mat_json(lhs),
        "rhs": _mat_json(rhs),
    }


def _mat_json(m):
    return {"rows": m.rows, "cols": m.cols,
            "entries": [[str(x) for x in row] for row in m.a]}


def replay_witness(session, phi, psi, witness):
    """Re-evaluate both terms at the witness point; returns (lhs, rhs)."""
    model = FiniteFamilyModel(
        session,
        {n: c for n, c in witness["model"]["spaces"].items()},
        {n: {x: y for x, y in t} for n, t in witness["model"]["maps"].items()})
    space = phi.src.src_space
    dims = {tuple(x): d for x, d in witness["shape"]["dims"]}
    shape = FamilyShape(space, dims)
    element = tuple(witness["element"])
    left = eval_sgnt(model, phi, shape)[element]
    right = eval_sgnt(model, psi, shape)[element]
    return left, right
