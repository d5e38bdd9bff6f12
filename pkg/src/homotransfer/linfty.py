"""Symmetric-word calculus and homotopy transfer of L-infinity structures.

The cocommutative side S^c[sM] is realized as signed-symmetrized words inside
the tensor coalgebra: a basis element is a canonically sorted word (letters in
basis order, no repeated letter of odd suspended degree), embedded as the full
signed symmetrization over all permutations.  In that (monomial) normalization
every coderivation-type extension is the classical unshuffle formula: a sum
over position subsets, the selected letters pulled to the front with their
Koszul sign.  Averaging requires characteristic 0 or p > max arity;
characteristic 2 is always refused (the factor 1/2 in the master equation is
kept literally).
"""

import itertools

from .complexes import AxiomError, ChainComplex, Contraction
from .graded import (
    GradedBasis,
    GradedMap,
    StructureError,
    vec_add_into,
    vec_scale,
    vec_sub,
)
from .perturbation import Filtration, OpContraction, Perturbation, perturb
from .transfer import CheckReport
from .words import WordOp, WordSpace, lift_contraction_tensor, \
    suspend_contraction


class UnsupportedFieldError(StructureError):
    """The ground field cannot support exact symmetrization at this arity."""


# ---------------------------------------------------------------------------
# DG Lie algebras


class DGLieAlgebra:
    """A finite DG Lie algebra: basis, differential, bracket table.

    ``bracket`` maps ordered pairs (x, y) of basis names to sparse vectors;
    missing pairs are derived from graded skew-symmetry
    [x,y] = -(-1)^(|x||y|) [y,x].
    """

    def __init__(self, basis, d, bracket, check=True, jacobi=True):
        self.basis = basis
        self.field = basis.field
        self.cx = ChainComplex(basis, d, check=check)
        self.d = d
        self.table = {k: dict(v) for k, v in bracket.items() if v}
        if check:
            self.verify(jacobi=jacobi)

    def bracket(self, x, y):
        got = self.table.get((x, y))
        if got is not None:
            return dict(got)
        rev = self.table.get((y, x))
        if rev is None:
            return {}
        f = self.field
        exp = 1 + self.basis.degree(x) * self.basis.degree(y)
        return {t: f.neg(c) for t, c in rev.items()} if exp % 2 else dict(rev)

    def bracket_vec(self, vx, vy):
        f = self.field
        out = {}
        for x, cx in vx.items():
            for y, cy in vy.items():
                vec_add_into(f, out, self.bracket(x, y), f.mul(cx, cy))
        return out

    def verify(self, jacobi=True):
        f = self.field
        deg = self.basis.degree
        names = self.basis.names()
        for x in names:
            for y in names:
                xy = self.bracket(x, y)
                for t in xy:
                    if deg(t) != deg(x) + deg(y):
                        raise AxiomError(
                            "bracket not degree additive at (%s,%s)" % (x, y))
                # graded skew-symmetry, including [x,x] = 0 for even x
                sgn = f.one if (1 + deg(x) * deg(y)) % 2 == 0 else \
                    f.neg(f.one)
                back = vec_scale(f, self.bracket(y, x), sgn)
                if vec_sub(f, xy, back):
                    raise AxiomError("skew-symmetry fails at (%s,%s)" % (x, y))
                # Leibniz: d[x,y] = [dx,y] + (-1)^|x| [x,dy]
                lhs = self.d.apply(xy)
                rhs = self.bracket_vec(self.d(x), {y: f.one})
                s = f.one if deg(x) % 2 == 0 else f.neg(f.one)
                vec_add_into(f, rhs, self.bracket_vec({x: s}, self.d(y)))
                if vec_sub(f, lhs, rhs):
                    raise AxiomError("Leibniz fails at (%s,%s)" % (x, y))
        if jacobi:
            bad = self.jacobi_failures(limit=1)
            if bad:
                raise AxiomError("Jacobi fails at (%s,%s,%s)" % bad[0])

    def jacobi_failures(self, limit=None):
        """Triples violating [x,[y,z]] = [[x,y],z] + (-1)^(|x||y|)[y,[x,z]]."""
        f = self.field
        deg = self.basis.degree
        names = self.basis.names()
        out = []
        for x in names:
            for y in names:
                for z in names:
                    lhs = self.bracket_vec({x: f.one}, self.bracket(y, z))
                    rhs = self.bracket_vec(self.bracket(x, y), {z: f.one})
                    s = f.one if (deg(x) * deg(y)) % 2 == 0 else f.neg(f.one)
                    vec_add_into(
                        f, rhs, self.bracket_vec({y: s}, self.bracket(x, z)))
                    if vec_sub(f, lhs, rhs):
                        out.append((x, y, z))
                        if limit and len(out) >= limit:
                            return out
        return out

    def is_abelian(self):
        return not any(v for v in self.table.values())


def suspended_bracket_component(g):
    """The symmetric arity-2 component on suspended letters, mirroring the
    bar convention: beta_s(sx (x) sy) = (-1)^|x| s[x,y]."""
    f = g.field

    def comp(pair):
        x, y = pair
        col = g.bracket(x, y)
        if not col:
            return {}
        if g.basis.degree(x) % 2 == 0:
            return dict(col)
        return {t: f.neg(c) for t, c in col.items()}

    return comp


# ---------------------------------------------------------------------------
# symmetric word spaces


def _factorial(n):
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


class SymWordSpace:
    """Canonical basis of S^c_j[letters], j <= max_arity.

    A basis word is sorted by letter index; a letter of odd degree never
    repeats (its symmetric square vanishes away from characteristic 2).
    """

    def __init__(self, letters, max_arity):
        self.letters = letters
        self.field = letters.field
        self.max_arity = max_arity
        p = self.field.char
        if p == 2:
            raise UnsupportedFieldError(
                "characteristic 2 is not supported by the symmetric calculus")
        if p and p <= max_arity:
            raise UnsupportedFieldError(
                "symmetrization at arity %d needs characteristic 0 or p > %d, "
                "got p = %d" % (max_arity, max_arity, p))

    def degree(self, word):
        return sum(self.letters.degree(l) for l in word)

    def canon(self, word):
        """Sort a word into canonical order; returns (word, sign exponent),
        or (None, 0) when a letter of odd degree repeats."""
        idx = self.letters.index
        deg = self.letters.degree
        arr = list(word)
        exp = 0
        for i in range(1, len(arr)):
            j = i
            while j > 0 and idx[arr[j - 1]] > idx[arr[j]]:
                exp += deg(arr[j - 1]) * deg(arr[j])
                arr[j - 1], arr[j] = arr[j], arr[j - 1]
                j -= 1
        for i in range(1, len(arr)):
            if arr[i] == arr[i - 1] and deg(arr[i]) % 2:
                return None, 0
        return tuple(arr), exp % 2

    def canon_into(self, acc, word, coeff):
        """acc += coeff * (canonical form of word), with the sorting sign."""
        w, exp = self.canon(word)
        if w is None:
            return acc
        f = self.field
        return vec_add_into(f, acc, {w: f.neg(coeff) if exp else coeff})

    def words(self, length):
        names = self.letters.names()
        deg = self.letters.degree
        if length == 0:
            yield ()
            return
        for combo in itertools.combinations_with_replacement(names, length):
            ok = all(combo[i] != combo[i - 1] or deg(combo[i]) % 2 == 0
                     for i in range(1, len(combo)))
            if ok:
                yield combo

    def all_words(self, max_length=None):
        top = self.max_arity if max_length is None else max_length
        for k in range(1, top + 1):
            yield from self.words(k)

    def multiplicity_factor(self, word):
        """Product of factorials of letter multiplicities."""
        out = 1
        run = 1
        for i in range(1, len(word)):
            run = run + 1 if word[i] == word[i - 1] else 1
            out *= run if word[i] == word[i - 1] else 1
        return out

    def embed(self, word):
        """The signed symmetrization of a canonical word as a tensor vector:
        the sum over all len(word)! permutations (equal terms accumulate)."""
        f = self.field
        out = {}
        mult = f.of(self.multiplicity_factor(word))
        for u in set(itertools.permutations(word)):
            w, exp = self.canon(u)
            # w == word by construction; exp is the sign of sorting u back
            c = f.neg(mult) if exp else mult
            vec_add_into(f, out, {u: c})
        return out

    def project(self, tensor_vec):
        """Left inverse of ``embed`` extended by the averaging projector:
        (1/n!) sum over distinct arrangements of the signed coefficients."""
        f = self.field
        acc = {}
        for u, c in tensor_vec.items():
            self.canon_into(acc, u, c)
        out = {}
        for w, c in acc.items():
            out[w] = f.div(c, f.of(_factorial(len(w))))
        return out

    def __repr__(self):
        return "SymWordSpace(%d letters, N=%d)" % (
            len(self.letters), self.max_arity)


def sym_windowed_op(space, components):
    """Coderivation-type extension on canonical words: for each component
    (degree, fn on j-letter subwords) sum over position subsets, the selected
    letters unshuffled to the front with their Koszul sign.

    ``fn`` maps a canonical j-word to a sparse vector over output words (any
    length); the output is prepended to the remaining letters and resorted.
    """
    f = space.field
    deg = space.letters.degree

    def col(word):
        n = len(word)
        degs = [deg(l) for l in word]
        out = {}
        for j, (_opdeg, fn) in components.items():
            if j > n:
                continue
            for sel in itertools.combinations(range(n), j):
                selset = set(sel)
                exp = 0
                for i in sel:
                    exp += degs[i] * sum(
                        degs[p] for p in range(i) if p not in selset)
                sub = tuple(word[i] for i in sel)
                img = fn(sub)
                if not img:
                    continue
                rest = tuple(word[i] for i in range(n) if i not in selset)
                sgn = f.one if exp % 2 == 0 else f.neg(f.one)
                for mid, c in img.items():
                    new = mid + rest
                    if not new:
                        continue
                    space.canon_into(out, new, f.mul(sgn, c))
        return out

    degree = next(iter(components.values()))[0] if components else 0
    return WordOp(space, space, degree, col)


def sym_letterwise(gmap, space_in, space_out):
    """A degree-0 letter map applied to every letter, then resorted."""
    if gmap.degree != 0:
        raise StructureError("letterwise extension requires a degree-0 map")
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
                    vec_add_into(f, nxt, {w + (t,): f.mul(c, c2)})
            out = nxt
        acc = {}
        for w, c in out.items():
            space_out.canon_into(acc, w, c)
        return acc

    return WordOp(space_in, space_out, 0, col)


def sym_word_differential(space, d_letter):
    """Extension of a degree -1 letter map (sum over positions)."""

    def fn(sub):
        return {(t,): c for t, c in d_letter(sub[0]).items()}

    return sym_windowed_op(space, {1: (-1, fn)})


# ---------------------------------------------------------------------------
# the CCE coalgebra


def cce_component(g):
    """Corestriction of the CCE coderivation on canonical suspended pairs:
    one half of the symmetrized suspended bracket."""
    f = g.field
    beta = suspended_bracket_component(g)
    half = f.div(f.one, f.of(2))
    sdeg = lambda l: g.basis.degree(l) + 1

    def comp(pair):
        x, y = pair
        out = {}
        vec_add_into(f, out, beta((x, y)), half)
        s = half if (sdeg(x) * sdeg(y)) % 2 == 0 else f.neg(half)
        vec_add_into(f, out, beta((y, x)), s)
        return {(t,): c for t, c in out.items()}

    return comp


def cce_coalgebra(g, N):
    """The CCE coalgebra of a DGLA: (S^c[s g] carrier, coderivation del,
    square-zero report).  del is the bracket part only; the report checks
    (d + del)^2 = 0 on all canonical words of length <= N, which holds iff
    the bracket satisfies the graded Jacobi identity."""
    sbasis = g.basis.shifted(1)
    space = SymWordSpace(sbasis, N)
    f = g.field
    partial = sym_windowed_op(space, {2: (-1, cce_component(g))})

    def d_letter(l):
        return {t: f.neg(c) for t, c in g.d(l).items()}

    d_s = sym_word_differential(space, d_letter)
    total = d_s + partial
    entries = []
    for word in space.all_words(N):
        res = total.apply(total.column(word))
        if res:
            entries.append((word, res))
    if not entries:
        entries = [(("all words <= %d" % N,), {})]
    report = CheckReport("cce-square-zero", entries)
    return space, partial, report


# ---------------------------------------------------------------------------
# cup brackets and twisting cochains


class SymMap:
    """A linear map from symmetric words to the Lie algebra, stored as a
    degree plus a column function on canonical words."""

    def __init__(self, space, g, degree, fn):
        self.space = space
        self.g = g
        self.field = space.field
        self.degree = degree
        self.fn = fn

    def value(self, word):
        return dict(self.fn(word) or {})


def cup_bracket(a, b):
    """[a, b] as the composite through the symmetric diagonal and the
    bracket: sum over proper position subsets S of

        (unshuffle sign) * (-1)^(|b| deg(w_S)) [a(w_S), b(w_rest)].
    """
    if a.space is not b.space or a.g is not b.g:
        raise StructureError("cup bracket needs a common carrier and target")
    space, g = a.space, a.g
    f = space.field
    deg = space.letters.degree

    def col(word):
        n = len(word)
        degs = [deg(l) for l in word]
        out = {}
        for j in range(1, n):
            for sel in itertools.combinations(range(n), j):
                selset = set(sel)
                exp = 0
                for i in sel:
                    exp += degs[i] * sum(
                        degs[p] for p in range(i) if p not in selset)
                left = a.value(tuple(word[i] for i in sel))
                if not left:
                    continue
                right = b.value(
                    tuple(word[i] for i in range(n) if i not in selset))
                if not right:
                    continue
                exp += b.degree * sum(degs[i] for i in sel)
                val = g.bracket_vec(left, right)
                if val:
                    c = f.one if exp % 2 == 0 else f.neg(f.one)
                    vec_add_into(f, out, val, c)
        return out

    return SymMap(space, g, a.degree + b.degree, col)


class LieTwistingCochain:
    """tau: S^c[s carrier] -> g, stored per arity at the suspended level
    (columns on canonical suspended words, valued in g-vectors; the
    underlying unsuspended map has degree -1)."""

    def __init__(self, space, g, comps, N):
        self.space = space
        self.g = g
        self.field = space.field
        self.comps = comps  # arity -> fn(word) -> vector over g basis
        self.N = N

    def value(self, word):
        fn = self.comps.get(len(word))
        return dict(fn(word)) if fn else {}


class LInfinityStructure:
    """Operations on a graded carrier presented as the components of the
    transferred coderivation on S^c[s carrier]: comps[j] maps canonical
    suspended words of length j >= 2 to suspended-letter vectors; the arity-1
    part is the differential of the carrier."""

    def __init__(self, carrier, space, comps, N, d1=None):
        self.carrier = carrier
        self.space = space
        self.field = carrier.field
        self.N = N
        self.comps = {j: {w: dict(col) for w, col in tab.items() if col}
                      for j, tab in comps.items()}
        self.comps = {j: tab for j, tab in self.comps.items() if tab}
        self.d1 = d1  # GradedMap on the carrier, or None when minimal

    def comp(self, j):
        return dict(self.comps.get(j, ()))

    def is_minimal(self):
        return self.d1 is None or self.d1.is_zero()

    def coderivation(self):
        """The full perturbed differential d + D on the symmetric words."""
        f = self.field
        comps = {}
        for j, tab in self.comps.items():
            def fn(word, tab=tab):
                col = tab.get(word, ())
                return {(t,): c for t, c in dict(col).items()}
            comps[j] = (-1, fn)
        if self.d1 is not None and not self.d1.is_zero():
            d1 = self.d1

            def dfn(word):
                # suspended differential: entry-wise negation of s d s^{-1}
                return {(t,): f.neg(c) for t, c in d1(word[0]).items()}

            comps[1] = (-1, dfn)
        return sym_windowed_op(self.space, comps)

    def __eq__(self, other):
        return (isinstance(other, LInfinityStructure)
                and self.comps == other.comps and self.N == other.N)

    __hash__ = None


def check_master(tau, D_small):
    """Residual of the master equation D tau = 1/2 [tau, tau] on canonical
    suspended words: d_g . tau + tau . (d + D) minus the half cup bracket of
    tau with itself (evaluated at the suspended level, where the twisting
    cochain components have degree 0 and the only signs are the unshuffle
    signs)."""
    space = tau.space
    g = tau.g
    f = tau.field
    deg = space.letters.degree
    beta = suspended_bracket_component(g)
    half = f.div(f.one, f.of(2))

    def bracket_s(left, right):
        out = {}
        for x, cx in left.items():
            for y, cy in right.items():
                vec_add_into(f, out, beta((x, y)), f.mul(cx, cy))
        return out

    entries = []
    for word in space.all_words(tau.N):
        n = len(word)
        degs = [deg(l) for l in word]
        lhs = {}
        for t, c in tau.value(word).items():
            vec_add_into(f, lhs, g.d(t), c)
        for w2, c in D_small.column(word).items():
            vec_add_into(f, lhs, tau.value(w2), c)
        rhs = {}
        for j in range(1, n):
            for sel in itertools.combinations(range(n), j):
                selset = set(sel)
                exp = 0
                for i in sel:
                    exp += degs[i] * sum(
                        degs[p] for p in range(i) if p not in selset)
                left = tau.value(tuple(word[i] for i in sel))
                if not left:
                    continue
                right = tau.value(
                    tuple(word[i] for i in range(n) if i not in selset))
                if not right:
                    continue
                val = bracket_s(left, right)
                if val:
                    c = half if exp % 2 == 0 else f.neg(half)
                    vec_add_into(f, rhs, val, c)
        res = vec_sub(f, lhs, rhs)
        if res:
            entries.append((word, res))
    if not entries:
        entries = [(("all words <= %d" % tau.N,), {})]
    return CheckReport("master-equation", entries)


# ---------------------------------------------------------------------------
# transfer


def _sym_lift(c, N):
    """Lift a letter-level contraction (on suspended bases) to the canonical
    symmetric word spaces: pi and nabla letterwise, the homotopy conjugated
    through the signed symmetrization (project . Th . embed), then squeezed
    to restore the side conditions."""
    f = c.field
    tbig, _tsmall, _Tpi, _Tnabla, Th = lift_contraction_tensor(c, N)
    big = SymWordSpace(c.big.basis, N)
    small = SymWordSpace(c.small.basis, N)
    Pi = sym_letterwise(c.pi, big, small)
    Nabla = sym_letterwise(c.nabla, small, big)

    dT = sym_word_differential(big, lambda l: dict(c.big.d(l)))
    dM = sym_word_differential(small, lambda l: dict(c.small.d(l)))

    def h0_col(word):
        return big.project(Th.apply(big.embed(word)))

    H0 = WordOp(big, big, 1, h0_col)
    # side conditions: squeeze between (Id - nabla pi), then h -> h d h
    ident = WordOp.identity(big)
    q = ident - (Nabla * Pi)
    h1 = q * (H0 * q)
    H = h1 * (dT * h1)
    return big, small, dT, dM, Pi, Nabla, H


def transfer_linf(g, c, N):
    """Homotopy transfer of the DGLA ``g`` through the contraction ``c``.

    Returns (structure, tau, contraction): the transferred operations as an
    LInfinityStructure on the small carrier, the Lie twisting cochain, and
    the contraction of (S^c[sM], d + D) onto the CCE coalgebra of g,
    realized by the perturbation lemma on the symmetrized word lift.

    Two independent computations must agree exactly: the twisting-cochain
    recursion run with the letter-level homotopy

        tau^1 = nabla,  tau^j = -h_s(Z_j),  D^j = pi_s(Z_j),
        Z_j = 1/2 sum over proper subsets [tau^(a), tau^(j-a)]

    and the corestrictions of the perturbation-lemma output; disagreement
    aborts.
    """
    if c.big.basis != g.basis:
        raise StructureError("contraction's big complex must carry the DGLA")
    f = g.field
    if f.char == 2:
        raise UnsupportedFieldError(
            "characteristic 2 is not supported by the symmetric calculus")
    sc = suspend_contraction(c)
    beta = suspended_bracket_component(g)
    half = f.div(f.one, f.of(2))
    hcar = c.small.basis
    small = SymWordSpace(hcar.shifted(1), N)
    deg = small.letters.degree

    tau_cache = {}

    def tau(word):
        v = tau_cache.get(word)
        if v is not None:
            return v
        if len(word) == 1:
            v = dict(sc.nabla(word[0]))
        else:
            v = vec_scale(f, sc.h.apply(zed(word)), f.neg(f.one))
        tau_cache[word] = v
        return v

    def zed(word):
        """1/2 sum over proper position subsets of the suspended bracket of
        tau values; the corestrictions have suspended degree 0, so the only
        signs are the unshuffle signs."""
        n = len(word)
        degs = [deg(l) for l in word]
        acc = {}
        for j in range(1, n):
            for sel in itertools.combinations(range(n), j):
                selset = set(sel)
                exp = 0
                for i in sel:
                    exp += degs[i] * sum(
                        degs[p] for p in range(i) if p not in selset)
                left = tau(tuple(word[i] for i in sel))
                if not left:
                    continue
                right = tau(
                    tuple(word[i] for i in range(n) if i not in selset))
                if not right:
                    continue
                c0 = half if exp % 2 == 0 else f.neg(half)
                for x, cx in left.items():
                    for y, cy in right.items():
                        col = beta((x, y))
                        if col:
                            vec_add_into(f, acc, col,
                                         f.mul(c0, f.mul(cx, cy)))
        return acc

    # perturbation realization on the symmetrized word lift
    big, small2, dT, dM, Pi, Nabla, H = _sym_lift(sc, N)
    oc = OpContraction(big, small2, dT, dM, Pi, Nabla, H)
    partial = sym_windowed_op(big, {2: (-1, cce_component(g))})
    D_op, pc = perturb(oc, Perturbation(partial))

    comps = {}
    tau_comps = {}
    for j in range(2, N + 1):
        tab = {}
        for word in small.words(j):
            col = sc.pi.apply(zed(word))
            # cross-check against the perturbation-lemma corestriction
            pcol = {t[0]: cc for t, cc in D_op.column(word).items()
                    if len(t) == 1}
            if vec_sub(f, col, pcol):
                raise AxiomError(
                    "recursion and perturbation lemma disagree on the "
                    "arity-%d component at %r" % (j, word))
            ncol = {t[0]: cc for t, cc in pc.nabla.column(word).items()
                    if len(t) == 1}
            if vec_sub(f, tau(word), ncol):
                raise AxiomError(
                    "recursion and perturbation lemma disagree on tau^%d "
                    "at %r" % (j, word))
            if col:
                tab[word] = col
        comps[j] = tab
    for j in range(1, N + 1):
        tau_comps[j] = tau

    d1 = c.small.d if not c.small.d.is_zero() else None
    structure = LInfinityStructure(hcar, small, comps, N, d1=d1)
    cochain = LieTwistingCochain(small, g, tau_comps, N)
    return structure, cochain, pc
