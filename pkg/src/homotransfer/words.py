"""Tensor-word calculus: word spaces, lazy word operators, bar/cobar
differentials, the tensor-trick contraction lift, coderivation dictionaries,
and shuffle products.

Words are tuples of letter names (always tuples, even length 1); vectors over
words are sparse dicts word -> scalar.  Word spaces are never materialized:
operators are lazy, with memoized columns, so an 8-letter alphabet at arity 6
costs nothing until specific words are hit.
"""

from .field import Field
from .graded import (
    GradedBasis,
    GradedMap,
    StructureError,
    koszul_perm_sign,
    suspension_map,
    vec_add_into,
    vec_scale,
    vec_sub,
)
from .complexes import AxiomError, ChainComplex, Contraction


class TruncationError(ValueError):
    """An operation would produce words longer than the declared max arity."""


class WordSpace:
    """Tensor words of length 1..max_arity over a letter basis."""

    def __init__(self, letters, max_arity):
        self.letters = letters
        self.field = letters.field
        self.max_arity = max_arity

    def degree(self, word):
        return sum(self.letters.degree(l) for l in word)

    def words(self, length):
        """All words of one length (only sane for small alphabets)."""
        names = self.letters.names()
        if length == 0:
            yield ()
            return
        for prefix in self.words(length - 1):
            for n in names:
                yield prefix + (n,)

    def all_words(self, max_length=None):
        top = self.max_arity if max_length is None else max_length
        for k in range(1, top + 1):
            yield from self.words(k)

    def __repr__(self):
        return "WordSpace(%d letters, N=%d)" % (len(self.letters), self.max_arity)


class WordOp:
    """Lazy linear operator on word vectors, with memoized columns.

    ``col`` maps a single word to a sparse word vector.  Degree is tracked for
    Koszul bookkeeping by the windowed extensions below.
    """

    def __init__(self, space_in, space_out, degree, col):
        self.space_in = space_in
        self.space_out = space_out
        self.field = space_in.field
        self.degree = degree
        self._col = col
        self._cache = {}

    def column(self, word):
        v = self._cache.get(word)
        if v is None:
            v = self._col(word)
            self._cache[word] = v
        return v

    __call__ = column

    def apply(self, vec):
        f = self.field
        out = {}
        for w, c in vec.items():
            vec_add_into(f, out, self.column(w), c)
        return out

    # -- combinators --------------------------------------------------

    def __add__(self, other):
        if other.degree != self.degree:
            raise StructureError("sum of word ops of different degrees")
        f = self.field

        def col(word):
            out = dict(self.column(word))
            return vec_add_into(f, out, other.column(word))

        return WordOp(self.space_in, self.space_out, self.degree, col)

    def __mul__(self, other):
        """self after other (sign-free composition)."""

        def col(word):
            return self.apply(other.column(word))

        return WordOp(other.space_in, self.space_out,
                      self.degree + other.degree, col)

    def scale(self, coeff):
        f = self.field
        return WordOp(self.space_in, self.space_out, self.degree,
                      lambda w: vec_scale(f, self.column(w), coeff))

    def __neg__(self):
        return self.scale(self.field.neg(self.field.one))

    def __sub__(self, other):
        return self + (-other)

    @classmethod
    def zero(cls, space_in, space_out, degree):
        return cls(space_in, space_out, degree, lambda w: {})

    @classmethod
    def identity(cls, space):
        one = space.field.one
        return cls(space, space, 0, lambda w: {w: one})


def op_from_graded(gmap, space_in, space_out):
    """Word op acting on length-1 words via a letter-level graded map."""

    def col(word):
        if len(word) != 1:
            return {}
        return {(t,): c for t, c in gmap(word[0]).items()}

    return WordOp(space_in, space_out, gmap.degree, col)


def wordwise_tensor(gmap, space_in, space_out):
    """Degree-0 letter map applied to every letter of every word (no signs)."""
    if gmap.degree != 0:
        raise StructureError("wordwise extension requires a degree-0 map")
    f = gmap.field

    def col(word):
        out = {(): f.one}
        for l in word:
            img = gmap(l)
            if not img:
                return {}
            nxt = {}
            for w, c in out.items():
                for t, c2 in img.items():
                    nxt[w + (t,)] = f.mul(c, c2)
            out = nxt
        return out

    return WordOp(space_in, space_out, 0, col)


def windowed_op(space_in, space_out, components, truncate=False):
    """Sum over positions of Id^a (x) comp (x) Id^b with prefix Koszul signs.

    ``components`` maps window length j -> (degree, fn) where fn takes a
    j-letter word to a sparse vector of output words (any length).  The sign
    for a window starting after prefix p is (-1)^(degree * |p|).  Used for
    coderivations (j -> 1), derivations (1 -> j), and the perturbations.
    """
    f = space_in.field
    letters = space_in.letters
    cap = space_out.max_arity

    def col(word):
        n = len(word)
        out = {}
        pref_deg = 0
        for a in range(n):
            for j, (deg, fn) in components.items():
                if a + j > n:
                    continue
                res = fn(word[a:a + j])
                if not res:
                    continue
                sign = f.one if (deg * pref_deg) % 2 == 0 else f.neg(f.one)
                for mid, c in res.items():
                    new = word[:a] + mid + word[a + j:]
                    if len(new) > cap:
                        if truncate:
                            continue
                        raise TruncationError(
                            "word %r exceeds max arity %d" % (new, cap))
                    if len(new) == 0:
                        continue
                    vec_add_into(f, out, {new: f.mul(sign, c)})
            pref_deg += letters.degree(word[a])
        return out

    degree = next(iter(components.values()))[0] if components else 0
    return WordOp(space_in, space_out, degree, col)


# ---------------------------------------------------------------------------
# suspension of contractions


def suspend_complex(cx, shift=1):
    """Shifted complex with d_s = -s d s^{-1} (entries negated, degrees moved)."""
    basis = cx.basis.shifted(shift)
    mat = {s: {t: cx.field.neg(c) for t, c in col.items()}
           for s, col in cx.d.matrix.items()}
    return ChainComplex(basis, GradedMap(basis, basis, -1, mat), check=False)


def suspend_contraction(c, shift=1):
    """Conjugate a contraction by the suspension: pi, nabla keep their entries,
    h flips sign (so that d_s h_s + h_s d_s = Id - nabla_s pi_s still holds)."""
    big = suspend_complex(c.big, shift)
    small = suspend_complex(c.small, shift)
    f = c.field
    pi = GradedMap(big.basis, small.basis, 0, c.pi.matrix)
    nabla = GradedMap(small.basis, big.basis, 0, c.nabla.matrix)
    hmat = {s: {t: f.neg(v) for t, v in col.items()}
            for s, col in c.h.matrix.items()}
    h = GradedMap(big.basis, big.basis, 1, hmat)
    return Contraction(big, small, pi, nabla, h)


# ---------------------------------------------------------------------------
# the tensor trick


def lift_contraction_tensor(c, N):
    """Lift a letter-level contraction to word spaces of arity <= N.

    T pi and T nabla act letter-wise; the homotopy is

        Th = sum_a Id^(x)a (x) h (x) (nabla pi)^(x)(k-1-a)

    with the prefix Koszul sign from |h| = 1.  The same carrier serves the
    algebra and coalgebra readings.
    """
    f = c.field
    big = WordSpace(c.big.basis, N)
    small = WordSpace(c.small.basis, N)
    Tpi = wordwise_tensor(c.pi, big, small)
    Tnabla = wordwise_tensor(c.nabla, small, big)
    np_ = c.nabla * c.pi

    def th_col(word):
        out = {}
        pref_deg = 0
        for a in range(len(word)):
            hv = c.h(word[a])
            if hv:
                sign = f.one if pref_deg % 2 == 0 else f.neg(f.one)
                # tails: nabla pi on every later letter
                tails = {(): f.one}
                dead = False
                for l in word[a + 1:]:
                    img = np_(l)
                    if not img:
                        dead = True
                        break
                    nxt = {}
                    for w, cw in tails.items():
                        for t, ct in img.items():
                            nxt[w + (t,)] = f.mul(cw, ct)
                    tails = nxt
                if not dead:
                    for t1, c1 in hv.items():
                        for tw, c2 in tails.items():
                            new = word[:a] + (t1,) + tw
                            vec_add_into(
                                f, out, {new: f.mul(sign, f.mul(c1, c2))})
            pref_deg += c.big.basis.degree(word[a])
        return out

    Th = WordOp(big, big, 1, th_col)
    return big, small, Tpi, Tnabla, Th


def word_differential(cx, N, space=None):
    """The word-space differential sum Id^(x)a (x) d (x) Id^(x)b."""
    space = space or WordSpace(cx.basis, N)
    return windowed_op(space, space, {1: (-1, lambda w: {
        (t,): c for t, c in cx.d(w[0]).items()})})


# ---------------------------------------------------------------------------
# DG (co)algebras


class DGAlgebra:
    """Augmentation ideal of an augmented DGA: basis, d, and products mu."""

    def __init__(self, basis, d, mu, check=True):
        # mu: dict (a, b) -> sparse vector over basis
        self.basis = basis
        self.field = basis.field
        self.cx = ChainComplex(basis, d, check=check)
        self.d = d
        self.mu = {k: dict(v) for k, v in mu.items() if v}
        if check:
            self.verify()

    def product(self, a, b):
        return dict(self.mu.get((a, b), ()))

    def product_vec(self, va, vb):
        f = self.field
        out = {}
        for a, ca in va.items():
            for b, cb in vb.items():
                vec_add_into(f, out, self.product(a, b), f.mul(ca, cb))
        return out

    def verify(self):
        f = self.field
        names = self.basis.names()
        for a in names:
            for b in names:
                ab = self.product(a, b)
                dab = self.basis.degree(a) + self.basis.degree(b)
                for t in ab:
                    if self.basis.degree(t) != dab:
                        raise AxiomError(
                            "product not degree additive at (%s,%s)" % (a, b))
                # Leibniz: d(ab) = (da)b + (-1)^|a| a(db)
                lhs = self.d.apply(ab)
                rhs = self.product_vec(self.d(a), {b: f.one})
                sgn = f.one if self.basis.degree(a) % 2 == 0 else f.neg(f.one)
                vec_add_into(f, rhs, self.product_vec({a: sgn}, self.d(b)))
                if vec_sub(f, lhs, rhs):
                    raise AxiomError("Leibniz fails at (%s,%s)" % (a, b))
                for c in names:
                    l = self.product_vec(ab, {c: f.one})
                    r = self.product_vec({a: f.one}, self.product(b, c))
                    if vec_sub(f, l, r):
                        raise AxiomError(
                            "associativity fails at (%s,%s,%s)" % (a, b, c))

    def is_commutative(self):
        f = self.field
        for a in self.basis.names():
            for b in self.basis.names():
                sgn = (self.basis.degree(a) * self.basis.degree(b)) % 2
                ba = self.product(b, a)
                ba = vec_scale(f, ba, f.neg(f.one)) if sgn else ba
                if vec_sub(f, self.product(a, b), ba):
                    return False
        return True


class DGCoalgebra:
    """Coaugmentation coideal of a DGC: basis, d, and diagonal Delta."""

    def __init__(self, basis, d, delta, check=True):
        # delta: dict a -> sparse vector over pairs (x, y)
        self.basis = basis
        self.field = basis.field
        self.cx = ChainComplex(basis, d, check=check)
        self.d = d
        self.delta = {k: dict(v) for k, v in delta.items() if v}
        if check:
            self.verify()

    def diag(self, a):
        return dict(self.delta.get(a, ()))

    def verify(self):
        f = self.field
        for a in self.basis.names():
            da = self.basis.degree(a)
            # coassociativity: (Delta (x) id) Delta = (id (x) Delta) Delta
            lhs, rhs = {}, {}
            for (x, y), c in self.diag(a).items():
                for (u, v), c2 in self.diag(x).items():
                    vec_add_into(f, lhs, {(u, v, y): f.mul(c, c2)})
                for (u, v), c2 in self.diag(y).items():
                    vec_add_into(f, rhs, {(x, u, v): f.mul(c, c2)})
            if vec_sub(f, lhs, rhs):
                raise AxiomError("coassociativity fails at %s" % a)
            # co-Leibniz: Delta d = (d (x) id + id (x) d) Delta
            lhs = {}
            for t, c in self.d(a).items():
                vec_add_into(f, lhs, self.diag(t), c)
            rhs = {}
            for (x, y), c in self.diag(a).items():
                for t, c2 in self.d(x).items():
                    vec_add_into(f, rhs, {(t, y): f.mul(c, c2)})
                sgn = f.one if self.basis.degree(x) % 2 == 0 else f.neg(f.one)
                for t, c2 in self.d(y).items():
                    vec_add_into(f, rhs, {(x, t): f.mul(f.mul(sgn, c), c2)})
            if vec_sub(f, lhs, rhs):
                raise AxiomError("co-Leibniz fails at %s" % a)


# ---------------------------------------------------------------------------
# bar and cobar perturbations
#
# Sign convention (frozen; certified by the square-zero and Stasheff suites):
# letters of the bar carrier are suspended, d_s = -s d s^{-1}, and the arity-2
# component of the bar perturbation is mu_s = -(s mu (s^{-1} (x) s^{-1})),
# i.e. mu_s(sa (x) sb) = (-1)^|a| s mu(a,b).


def suspended_product_component(A):
    """The arity-2 bar component on suspended letters, as a plain function."""
    f = A.field

    def comp(word):
        a, b = word
        prod = A.product(a, b)
        if not prod:
            return {}
        # (s^{-1} (x) s^{-1})(sa (x) sb) = (-1)^(|a|+1) a (x) b; overall minus
        # from the frozen convention gives (-1)^|a|.
        if A.basis.degree(a) % 2 == 0:
            return {(t,): c for t, c in prod.items()}
        return {(t,): f.neg(c) for t, c in prod.items()}

    return comp


def bar_perturbation(A, N, space=None):
    """Coderivation on T^c[s IA] induced by the multiplication of A."""
    sbasis = A.basis.shifted(1)
    space = space or WordSpace(sbasis, N)
    comp = suspended_product_component(A)
    return windowed_op(space, space, {2: (-1, comp)})


def cobar_perturbation(C, N, space=None, truncate=False):
    """Derivation on T[s^{-1} JC] induced by the diagonal of C.

    Accepted without ``truncate`` only in the connectivity regimes where the
    diagonal cannot produce unboundedly long words of bounded degree: the
    coideal concentrated in degrees >= 2 (simply connected) or <= 0.
    """
    f = C.field
    degs = [d for _, d in C.basis.elements]
    if not truncate and degs and not (min(degs) >= 2 or max(degs) <= 0):
        raise AxiomError(
            "cobar input must be simply connected (degrees >= 2) or "
            "non-positively graded; pass truncate=True to force arity truncation")
    dbasis = C.basis.shifted(-1)
    space = space or WordSpace(dbasis, N)

    def comp(word):
        a = word[0]
        out = {}
        for (x, y), c in C.diag(a).items():
            # (s (x) s)(desuspension stuff): mirror of the bar convention:
            # component s^{-1}a -> (-1)^|x| (s^{-1}x, s^{-1}y), overall minus.
            sgn = f.neg(f.one) if C.basis.degree(x) % 2 == 0 else f.one
            vec_add_into(f, out, {(x, y): f.mul(sgn, c)})
        return out

    return windowed_op(space, space, {1: (-1, comp)}, truncate=truncate)


# ---------------------------------------------------------------------------
# coderivation <-> components dictionaries


class Coderivation:
    """A coderivation on T^c[letters], stored by its corestrictions.

    components[j] is a function from j-letter words to letter vectors (dicts
    letter -> coeff); the induced action on words is the co-Leibniz extension.
    """

    def __init__(self, space, components, degree=-1):
        self.space = space
        self.field = space.field
        self.degree = degree
        self.components = dict(components)
        self._op = windowed_op(space, space, {
            j: (degree, fn) for j, fn in self.components.items()})

    def column(self, word):
        return self._op.column(word)

    __call__ = column

    def apply(self, vec):
        return self._op.apply(vec)

    def as_op(self):
        return self._op

    def corestriction(self, word):
        """Projection of the action to length-1 words (= sum of components)."""
        out = {}
        fn = self.components.get(len(word))
        if fn:
            vec_add_into(self.field, out, fn(word))
        return out


class Derivation:
    """A derivation on T[letters], stored by its restrictions to generators.

    components[j] is a function from a 1-letter word to a sparse vector of
    j-letter words; the induced action on longer words is the Leibniz
    extension (a length-1 window at every position, with the prefix Koszul
    sign).
    """

    def __init__(self, space, components, degree=-1, truncate=False):
        self.space = space
        self.field = space.field
        self.degree = degree
        self.components = dict(components)

        def gen(word):
            out = {}
            for fn in self.components.values():
                vec_add_into(self.field, out, fn(word))
            return out

        self._op = windowed_op(space, space, {1: (degree, gen)},
                               truncate=truncate)

    def column(self, word):
        return self._op.column(word)

    __call__ = column

    def apply(self, vec):
        return self._op.apply(vec)

    def as_op(self):
        return self._op

    def restriction(self, word):
        """Action on a generator (1-letter word): the sum of components."""
        out = {}
        for fn in self.components.values():
            vec_add_into(self.field, out, fn(word))
        return out


def components_from_derivation(D, max_arity=None):
    """Restrictions to generators, split by output word length."""
    space = D.space if hasattr(D, "space") else D.space_in
    top = max_arity or space.max_arity

    def fn(word, j):
        return {w: c for w, c in D.column(word).items() if len(w) == j}

    return {j: (lambda word, j=j: fn(word, j)) for j in range(1, top + 1)}


def coderivation_from_components(space, components, degree=-1):
    """Components given as GradedMaps from word tuples to letters."""
    comps = {}
    for j, gmap in components.items():
        if j > space.max_arity:
            raise TruncationError("component arity %d exceeds max arity %d"
                                  % (j, space.max_arity))

        def fn(word, gmap=gmap):
            key = word if len(word) > 1 else word[0]
            return {(t,) if not isinstance(t, tuple) else t: c
                    for t, c in gmap(key).items()}

        comps[j] = fn
    return Coderivation(space, comps, degree)


def components_from_coderivation(D, max_arity=None):
    """Read the corestrictions back off any word operator.

    For a coderivation, only the top component can shrink a length-j word all
    the way to length 1, so projecting the column to length-1 words recovers
    exactly the arity-j component.
    """
    space = D.space if hasattr(D, "space") else D.space_in
    top = max_arity or space.max_arity

    def fn(word):
        return {w: c for w, c in D.column(word).items() if len(w) == 1}

    return {j: fn for j in range(1, top + 1)}


# ---------------------------------------------------------------------------
# shuffles


def shuffle_product(field, degrees, u, v):
    """Signed sum over (|u|,|v|)-shuffles of two words.

    ``degrees`` maps letters to their (suspended) degrees.  Returns a sparse
    word vector.
    """
    out = {}
    one = field.one

    def go(left, right, acc, sign):
        if not left and not right:
            vec_add_into(field, out, {acc: sign})
            return
        if left:
            go(left[1:], right, acc + (left[0],), sign)
        if right:
            # right[0] jumps over the remaining letters of left
            jump = sum(degrees[l] for l in left)
            s = sign if (degrees[right[0]] * jump) % 2 == 0 else field.neg(sign)
            go(left, right[1:], acc + (right[0],), s)

    go(tuple(u), tuple(v), (), one)
    return out
