"""Graded bases, degree-homogeneous sparse linear maps, and the Koszul sign engine.

Every sign in the whole engine originates in exactly two places here:

* ``GradedMap.tensor``: (f (x) g)(x (x) y) = (-1)^(deg g * deg x) f(x) (x) g(y)
* ``koszul_perm_sign``: the signed permutation action on tensor words, which is
  the iterated form of the same braiding rule.

Composition of maps is sign-free.  Matrices are sparse dicts keyed by basis
element name; basis element names are strings, or tuples of strings for
elements of tensor-product bases (tensor products are flattened, so the basis
of (A (x) B) (x) C literally equals that of A (x) (B (x) C)).
"""

from .field import Field


class StructureError(ValueError):
    """A structural precondition (basis mismatch, bad degree, ...) failed."""


def as_word(name):
    """Normalize a basis element name to its tuple-of-letters form."""
    return name if isinstance(name, tuple) else (name,)


def word_name(letters):
    """Inverse of :func:`as_word` for length-1 words."""
    return letters[0] if len(letters) == 1 else tuple(letters)


# ---------------------------------------------------------------------------
# sparse vectors: dict name -> nonzero scalar


def vec_add_into(field, acc, vec, coeff=None):
    """acc += coeff * vec, dropping zeros. Mutates and returns acc."""
    if coeff is not None and not coeff:
        return acc
    for name, c in vec.items():
        if coeff is not None:
            c = field.mul(coeff, c)
        s = field.add(acc.get(name, field.zero), c)
        if s:
            acc[name] = s
        else:
            acc.pop(name, None)
    return acc


def vec_scale(field, vec, coeff):
    if not coeff:
        return {}
    return {n: field.mul(coeff, c) for n, c in vec.items()}


def vec_sub(field, a, b):
    out = dict(a)
    for n, c in b.items():
        s = field.sub(out.get(n, field.zero), c)
        if s:
            out[n] = s
        else:
            out.pop(n, None)
    return out


def vec_eq(a, b):
    return not vec_sub_nonzero(a, b)


def vec_sub_nonzero(a, b):
    if a == b:
        return False
    keys = set(a) | set(b)
    for k in keys:
        if a.get(k, 0) != b.get(k, 0):
            return True
    return False


# ---------------------------------------------------------------------------


class GradedBasis:
    """An ordered finite basis of a graded vector space over an exact field."""

    def __init__(self, elements, field):
        self.field = field
        self.elements = list(elements)
        self.index = {}
        self.degrees = {}
        for i, (name, deg) in enumerate(self.elements):
            if name in self.index:
                raise StructureError("duplicate basis element %r" % (name,))
            self.index[name] = i
            self.degrees[name] = deg

    def names(self):
        return [n for n, _ in self.elements]

    def degree(self, name):
        try:
            return self.degrees[name]
        except KeyError:
            raise StructureError("element %r not in basis" % (name,))

    def names_in_degree(self, deg):
        return [n for n, d in self.elements if d == deg]

    def occupied_degrees(self):
        return sorted({d for _, d in self.elements})

    def dim(self, deg=None):
        if deg is None:
            return len(self.elements)
        return sum(1 for _, d in self.elements if d == deg)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, name):
        return name in self.index

    def __eq__(self, other):
        return (
            isinstance(other, GradedBasis)
            and other.field == self.field
            and other.elements == self.elements
        )

    def __hash__(self):
        return hash((self.field, tuple(self.elements)))

    def __repr__(self):
        return "GradedBasis(%d elements, %s)" % (len(self.elements), self.field.tag())

    # -- constructions ------------------------------------------------

    def shifted(self, shift):
        """Same names, degrees shifted by ``shift`` (suspension carrier)."""
        return GradedBasis([(n, d + shift) for n, d in self.elements], self.field)

    def tensor(self, other):
        """Tensor-product basis with flattened tuple names."""
        if other.field != self.field:
            raise StructureError("field mismatch in tensor of bases")
        elems = []
        for n1, d1 in self.elements:
            for n2, d2 in other.elements:
                elems.append((word_name(as_word(n1) + as_word(n2)), d1 + d2))
        return GradedBasis(elems, self.field)

    def word_degree(self, letters):
        return sum(self.degree(l) for l in letters)


def tensor_power_basis(basis, n):
    out = basis
    for _ in range(n - 1):
        out = out.tensor(basis)
    return out


class GradedMap:
    """A degree-homogeneous linear map given by a sparse column dictionary.

    ``matrix[src] = {tgt: coeff, ...}``; absent columns are zero.  Immutable
    by convention: all operations return new maps.
    """

    def __init__(self, source, target, degree, matrix=None):
        if source.field != target.field:
            raise StructureError("field mismatch between source and target bases")
        self.source = source
        self.target = target
        self.field = source.field
        self.degree = degree
        self.matrix = {}
        if matrix:
            for src, col in matrix.items():
                col = {t: c for t, c in col.items() if c}
                if not col:
                    continue
                sdeg = source.degree(src)
                for tgt in col:
                    if target.degree(tgt) != sdeg + degree:
                        raise StructureError(
                            "entry %r -> %r violates degree %d" % (src, tgt, degree)
                        )
                self.matrix[src] = col

    # -- basic constructors -------------------------------------------

    @classmethod
    def zero(cls, source, target, degree=0):
        return cls(source, target, degree)

    @classmethod
    def identity(cls, basis):
        one = basis.field.one
        return cls(basis, basis, 0, {n: {n: one} for n in basis.names()})

    # -- evaluation ---------------------------------------------------

    def __call__(self, name):
        """Column of a basis element, as a sparse vector."""
        return dict(self.matrix.get(name, ()))

    def apply(self, vec):
        """Image of a sparse vector."""
        f = self.field
        out = {}
        for src, coeff in vec.items():
            col = self.matrix.get(src)
            if col:
                vec_add_into(f, out, col, coeff)
        return out

    def is_zero(self):
        return not self.matrix

    # -- algebra ------------------------------------------------------

    def compose(self, other):
        """self after other (matrix product, no signs)."""
        if other.target != self.source:
            raise StructureError(
                "compose: inner bases differ (%r vs %r)" % (self.source, other.target)
            )
        mat = {}
        for src, col in other.matrix.items():
            image = self.apply(col)
            if image:
                mat[src] = image
        return GradedMap(other.source, self.target, self.degree + other.degree, mat)

    def __mul__(self, other):
        return self.compose(other)

    def __add__(self, other):
        if other.source != self.source or other.target != self.target:
            raise StructureError("sum of maps with different bases")
        if other.degree != self.degree:
            raise StructureError("sum of maps of different degrees")
        f = self.field
        mat = {s: dict(c) for s, c in self.matrix.items()}
        for src, col in other.matrix.items():
            vec_add_into(f, mat.setdefault(src, {}), col)
        return GradedMap(self.source, self.target, self.degree, mat)

    def __sub__(self, other):
        return self + other.scale(self.field.neg(self.field.one))

    def __neg__(self):
        return self.scale(self.field.neg(self.field.one))

    def scale(self, coeff):
        mat = {s: vec_scale(self.field, col, coeff) for s, col in self.matrix.items()}
        return GradedMap(self.source, self.target, self.degree, mat)

    def __eq__(self, other):
        if not isinstance(other, GradedMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.degree == other.degree
            and self.matrix == other.matrix
        )

    __hash__ = None

    def tensor(self, other):
        """Koszul-signed tensor product of maps.

        This is THE sign site: (f (x) g)(x (x) y) picks up (-1)^(|g| |x|).
        """
        f = self.field
        src = self.source.tensor(other.source)
        tgt = self.target.tensor(other.target)
        deg = self.degree + other.degree
        mat = {}
        gdeg_odd = other.degree % 2 != 0
        for n1, col1 in self.matrix.items():
            d1 = self.source.degree(n1)
            sign_neg = gdeg_odd and d1 % 2 != 0
            for n2, col2 in other.matrix.items():
                name = word_name(as_word(n1) + as_word(n2))
                col = {}
                for t1, c1 in col1.items():
                    for t2, c2 in col2.items():
                        c = f.mul(c1, c2)
                        if sign_neg:
                            c = f.neg(c)
                        col[word_name(as_word(t1) + as_word(t2))] = c
                mat[name] = col
        return GradedMap(src, tgt, deg, mat)

    def restricted(self, names):
        """Restriction to a subset of source columns."""
        mat = {n: self.matrix[n] for n in names if n in self.matrix}
        return GradedMap(self.source, self.target, self.degree, mat)

    def __repr__(self):
        return "GradedMap(deg=%d, %d cols)" % (self.degree, len(self.matrix))


def suspension_map(basis, shift=1):
    """The canonical degree-``shift`` isomorphism onto the shifted basis."""
    one = basis.field.one
    return GradedMap(
        basis, basis.shifted(shift), shift, {n: {n: one} for n in basis.names()}
    )


def tensor_many(*maps):
    out = maps[0]
    for m in maps[1:]:
        out = out.tensor(m)
    return out


def tensor_power(f, n):
    return tensor_many(*([f] * n))


# ---------------------------------------------------------------------------
# signed permutations of tensor factors


def koszul_perm_sign(degrees, perm):
    """Sign of the braiding action sending slot i to slot perm[i].

    ``degrees[i]`` is the degree of the letter initially in slot i; the sign
    is the product of (-1)^(|x||y|) over all pairs transposed by the
    permutation, i.e. over inversions.
    """
    n = len(degrees)
    exp = 0
    for i in range(n):
        for j in range(i + 1, n):
            if perm[i] > perm[j]:
                exp += degrees[i] * degrees[j]
    return -1 if exp % 2 else 1


def permute_letters(field, letters, degrees, perm):
    """Apply a signed permutation to one tensor word.

    Returns (new_letters, sign) where new_letters[perm[i]] = letters[i].
    """
    n = len(letters)
    out = [None] * n
    for i, l in enumerate(letters):
        out[perm[i]] = l
    sign = koszul_perm_sign(degrees, perm)
    return tuple(out), field.one if sign > 0 else field.neg(field.one)


# ---------------------------------------------------------------------------
# exact row reduction


def rref(field, rows):
    """Reduced row echelon form of a dense matrix (list of row lists).

    Returns (reduced rows, pivot column indices).  First-nonzero-column
    pivoting in row order: fully deterministic.
    """
    rows = [list(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, nrows):
            if rows[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.mul(inv, x) for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                coeff = rows[i][c]
                rows[i] = [field.sub(x, field.mul(coeff, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def row_reduce(gmap, degree):
    """Echelon data of the degree-``degree`` block of a graded map.

    Returns (rank, pivots, kernel basis, image basis); kernel vectors are
    sparse dicts over the source basis, image vectors over the target basis.
    """
    field = gmap.field
    src_names = gmap.source.names_in_degree(degree)
    tgt_names = gmap.target.names_in_degree(degree + gmap.degree)
    tgt_index = {n: i for i, n in enumerate(tgt_names)}
    # transpose: we reduce the matrix whose rows are indexed by source
    # elements so that kernel vectors come out in echelon form over columns.
    ncols = len(tgt_names)
    cols = []
    for s in src_names:
        col = gmap(s)
        row = [field.zero] * ncols
        for t, c in col.items():
            row[tgt_index[t]] = c
        cols.append(row)
    if not src_names:
        return 0, [], [], []
    # column-style reduction: reduce the transposed system [A^T | I]
    aug = [cols[i] + [field.one if j == i else field.zero for j in range(len(src_names))]
           for i in range(len(src_names))]
    red, _ = rref(field, aug)
    rank = sum(1 for row in red if any(row[:ncols]))
    pivots = []
    image = []
    kernel = []
    for row in red:
        head, tail = row[:ncols], row[ncols:]
        if any(head):
            vec = {tgt_names[j]: c for j, c in enumerate(head) if c}
            image.append(vec)
            for j, c in enumerate(head):
                if c:
                    pivots.append(tgt_names[j])
                    break
        else:
            kernel.append({src_names[j]: c for j, c in enumerate(tail) if c})
    return rank, pivots, kernel, image
