"""Chain complexes, homology contractions, weak systems, Hodge splitting.

A contraction (small <-> big, h) packages: projection pi, inclusion nabla,
and a degree +1 homotopy h on the big complex with

    pi nabla = Id
    d h + h d = Id - nabla pi
    pi h = 0,  h nabla = 0,  h h = 0.
"""

from .field import Field
from .graded import (
    GradedBasis,
    GradedMap,
    StructureError,
    rref,
    row_reduce,
    vec_add_into,
    vec_scale,
    vec_sub,
)


class AxiomError(ValueError):
    """An input violated the axioms of its declared structure."""


class ChainComplex:
    """A finite chain complex: graded basis plus a degree -1 differential."""

    def __init__(self, basis, d, check=True):
        if d.source != basis or d.target != basis:
            raise StructureError("differential must be an endomorphism of the basis")
        if d.degree != -1:
            raise StructureError("differential must have degree -1, got %d" % d.degree)
        if check:
            dd = d * d
            if not dd.is_zero():
                bad = next(iter(dd.matrix))
                raise AxiomError("d*d != 0, first offending element %r" % (bad,))
        self.basis = basis
        self.d = d
        self.field = basis.field

    @classmethod
    def zero_differential(cls, basis):
        return cls(basis, GradedMap.zero(basis, basis, -1), check=False)

    def __repr__(self):
        return "ChainComplex(%d elements)" % len(self.basis)


class Contraction:
    """Contraction data (small <-> big, h); axioms checked by verify_contraction."""

    requires_co0 = True

    def __init__(self, big, small, pi, nabla, h):
        self.big = big
        self.small = small
        self.pi = pi
        self.nabla = nabla
        self.h = h
        self.field = big.field

    def __repr__(self):
        return "%s(big=%d, small=%d)" % (
            type(self).__name__, len(self.big.basis), len(self.small.basis))


class WeakSystem(Contraction):
    """Like a Contraction but pi nabla = Id is not required (only (co1)+(side))."""

    requires_co0 = False


class ContractionReport:
    """Axiom-by-axiom verification outcome."""

    def __init__(self, results):
        # results: list of (axiom label, ok, first offending element or None)
        self.results = results

    @property
    def ok(self):
        return all(ok for _, ok, _ in self.results)

    def failures(self):
        return [(label, elem) for label, ok, elem in self.results if not ok]

    def lines(self):
        out = []
        for label, ok, elem in self.results:
            if ok:
                out.append("%-12s pass" % label)
            else:
                out.append("%-12s FAIL at %r" % (label, elem))
        return out

    def __repr__(self):
        return "ContractionReport(ok=%s)" % self.ok


def verify_contraction(c, big_names=None, small_names=None):
    """Check all contraction axioms; returns a report, never raises.

    For a WeakSystem the (co0) axiom is reported but its failure does not
    make the report fail.
    """
    field = c.field
    one = field.one
    if big_names is None:
        big_names = c.big.basis.names()
    if small_names is None:
        small_names = c.small.basis.names()
    dN = c.big.d
    dM = c.small.d
    pi, nabla, h = c.pi, c.nabla, c.h

    def probe(fn, names):
        for n in names:
            if fn({n: one}):
                return False, n
        return True, None

    results = []

    ok, bad = probe(lambda v: vec_sub(field, pi.apply(nabla.apply(v)), v), small_names)
    label = "(co0)" if c.requires_co0 else "(co0)*"
    results.append((label, ok if c.requires_co0 else True, bad))

    def co1(v):
        lhs = vec_add_into(field, dN.apply(h.apply(v)), h.apply(dN.apply(v)))
        rhs = vec_sub(field, v, nabla.apply(pi.apply(v)))
        return vec_sub(field, lhs, rhs)

    ok, bad = probe(co1, big_names)
    results.append(("(co1)", ok, bad))

    ok, bad = probe(lambda v: pi.apply(h.apply(v)), big_names)
    results.append(("pi h = 0", ok, bad))
    ok, bad = probe(lambda v: h.apply(nabla.apply(v)), small_names)
    results.append(("h nabla = 0", ok, bad))
    ok, bad = probe(lambda v: h.apply(h.apply(v)), big_names)
    results.append(("h h = 0", ok, bad))

    ok, bad = probe(
        lambda v: vec_sub(field, pi.apply(dN.apply(v)), dM.apply(pi.apply(v))), big_names)
    results.append(("pi chain", ok, bad))
    ok, bad = probe(
        lambda v: vec_sub(field, nabla.apply(dM.apply(v)), dN.apply(nabla.apply(v))),
        small_names)
    results.append(("nabla chain", ok, bad))

    return ContractionReport(results)


# ---------------------------------------------------------------------------
# homology contraction


def _row_reduce_with_preimages(cx, degree):
    """Echelon image basis of d in this degree together with chosen preimages.

    Returns (kernel basis over C_degree, image basis over C_(degree-1),
    preimages in C_degree with d(preimage) = image vector).
    """
    field = cx.field
    src_names = cx.basis.names_in_degree(degree)
    tgt_names = cx.basis.names_in_degree(degree - 1)
    if not src_names:
        return [], [], []
    tgt_index = {n: i for i, n in enumerate(tgt_names)}
    ncols = len(tgt_names)
    aug = []
    for i, s in enumerate(src_names):
        col = cx.d(s)
        row = [field.zero] * ncols
        for t, c in col.items():
            row[tgt_index[t]] = c
        aug.append(row + [field.one if j == i else field.zero
                          for j in range(len(src_names))])
    red, _ = rref(field, aug)
    kernel, image, pre = [], [], []
    for row in red:
        head, tail = row[:ncols], row[ncols:]
        vec_src = {src_names[j]: c for j, c in enumerate(tail) if c}
        if any(head):
            image.append({tgt_names[j]: c for j, c in enumerate(head) if c})
            pre.append(vec_src)
        else:
            kernel.append(vec_src)
    return kernel, image, pre


def _extend_echelon(field, names, fixed, candidates):
    """Greedily pick candidates that grow the span of ``fixed``; echelon order."""
    index = {n: i for i, n in enumerate(names)}
    rows = []
    for v in fixed:
        rows.append([field.zero] * len(names))
        for n, c in v.items():
            rows[-1][index[n]] = c
    red, _ = rref(field, rows) if rows else ([], [])
    red = [r for r in red if any(r)]
    chosen = []
    for v in candidates:
        row = [field.zero] * len(names)
        for n, c in v.items():
            row[index[n]] = c
        trial, _ = rref(field, red + [row])
        if sum(1 for r in trial if any(r)) > len(red):
            chosen.append(v)
            red = [r for r in trial if any(r)]
    return chosen


def _coords(field, names, basis_vectors, vec):
    """Solve vec = sum c_i basis_vectors[i]; the vectors must be independent."""
    index = {n: i for i, n in enumerate(names)}
    ncols = len(names)
    aug = []
    for i, b in enumerate(basis_vectors):
        row = [field.zero] * ncols
        for n, c in b.items():
            row[index[n]] = c
        aug.append(row + [field.one if j == i else field.zero
                          for j in range(len(basis_vectors))])
    # also append target vector as a row and reduce: easier to solve directly
    # by Gaussian elimination on the transposed system.
    A = [[aug[i][j] for i in range(len(basis_vectors))] for j in range(ncols)]
    b = [field.zero] * ncols
    for n, c in vec.items():
        b[index[n]] = c
    # solve A x = b with A (ncols x k)
    rows = [A[j] + [b[j]] for j in range(ncols)]
    red, pivots = rref(field, rows)
    k = len(basis_vectors)
    x = [field.zero] * k
    for r, p in zip(red, pivots):
        if p == k:
            raise StructureError("vector not in span")
        x[p] = r[k]
    return x


def homology_contraction(cx, names=None):
    """Deterministic contraction of a complex onto its homology.

    Homology classes are named ``H(g;k)`` (degree g, echelon index k); the
    homotopy h inverts d on the chosen complement of the cycles and vanishes
    on harmonic representatives.
    """
    field = cx.field
    degrees = cx.basis.occupied_degrees()
    # per degree: kernel, image (in degree-1), preimages (in degree)
    data = {n: _row_reduce_with_preimages(cx, n) for n in degrees}

    h_elems = []
    reps = {}      # degree -> list of harmonic representative vectors
    h_names = {}   # degree -> list of homology names
    for n in degrees:
        kernel, _, _ = data[n]
        boundaries = data[n + 1][1] if (n + 1) in data else []
        rep_vecs = _extend_echelon(field, cx.basis.names_in_degree(n), boundaries, kernel)
        reps[n] = rep_vecs
        h_names[n] = ["H(%d;%d)" % (n, k) for k in range(len(rep_vecs))]
        h_elems.extend((nm, n) for nm in h_names[n])

    small_basis = GradedBasis(h_elems, field)
    small = ChainComplex.zero_differential(small_basis)

    nabla_mat = {}
    for n in degrees:
        for nm, vec in zip(h_names[n], reps[n]):
            nabla_mat[nm] = vec
    nabla = GradedMap(small_basis, cx.basis, 0, nabla_mat)

    pi_mat = {}
    h_mat = {}
    for n in degrees:
        names_n = cx.basis.names_in_degree(n)
        if not names_n:
            continue
        _, _, pre_up = data.get(n + 1, ([], [], []))
        boundaries = data[n + 1][1] if (n + 1) in data else []
        # U_n: preimages of the image echelon of d_n (complement of the cycles)
        u_vecs = data[n][2]
        basis_vectors = u_vecs + reps[n] + boundaries
        for e in names_n:
            x = _coords(field, names_n, basis_vectors, {e: field.one})
            nu, nr = len(u_vecs), len(reps[n])
            pi_col = {}
            for k in range(nr):
                if x[nu + k]:
                    pi_col[h_names[n][k]] = x[nu + k]
            if pi_col:
                pi_mat[e] = pi_col
            h_col = {}
            for k in range(len(boundaries)):
                c = x[nu + nr + k]
                if c:
                    vec_add_into(field, h_col, pre_up[k], c)
            if h_col:
                h_mat[e] = h_col
    pi = GradedMap(cx.basis, small_basis, 0, pi_mat)
    h = GradedMap(cx.basis, cx.basis, 1, h_mat)
    return Contraction(cx, small, pi, nabla, h)


def trivial_contraction(cx):
    """The trivial contraction (X <-> X, h = 0) with identity pi and nabla."""
    ident = GradedMap.identity(cx.basis)
    return Contraction(cx, cx, ident, ident, GradedMap.zero(cx.basis, cx.basis, 1))


# ---------------------------------------------------------------------------
# Hodge-style splitting


def hodge_split(c, vec):
    """Split x = dh x + nabla pi x + hd x; returns (boundary, harmonic, h) parts."""
    field = c.field
    boundary = c.big.d.apply(c.h.apply(vec))
    harmonic = c.nabla.apply(c.pi.apply(vec))
    hpart = c.h.apply(c.big.d.apply(vec))
    total = {}
    vec_add_into(field, total, boundary)
    vec_add_into(field, total, harmonic)
    vec_add_into(field, total, hpart)
    if vec_sub(field, total, vec):
        raise AxiomError("splitting does not reassemble the input; data is not a contraction")
    return boundary, harmonic, hpart


# ---------------------------------------------------------------------------
# weak systems (side conditions without pi nabla = Id)


def normalize_weak_system(w):
    """Split off the projector part of a weak system.

    Returns (contraction, complement, blocks) where the contraction retracts
    the big complex onto the image of pi nabla, complement is the
    (Id - pi nabla)-part of the small complex, and blocks records the big
    splitting ``M1 = nabla(S1)``, ``M2 = ker pi``.
    """
    field = w.field
    small, big = w.small, w.big
    p = w.pi * w.nabla  # endomorphism of the small complex
    if p * p != p:
        raise AxiomError("pi nabla is not idempotent; input is not a weak system")

    # echelon bases of im(p) and ker(p) per degree
    s1_elems, s1_vecs = [], {}
    s2_elems, s2_vecs = [], {}
    for deg in small.basis.occupied_degrees():
        rank, _, kernel, image = row_reduce(p, deg)
        for k, v in enumerate(image):
            nm = "P(%d;%d)" % (deg, k)
            s1_elems.append((nm, deg))
            s1_vecs[nm] = v
        for k, v in enumerate(kernel):
            nm = "K(%d;%d)" % (deg, k)
            s2_elems.append((nm, deg))
            s2_vecs[nm] = v

    s1_basis = GradedBasis(s1_elems, field)
    s2_basis = GradedBasis(s2_elems, field)

    incl1 = GradedMap(s1_basis, small.basis, 0, s1_vecs)
    incl2 = GradedMap(s2_basis, small.basis, 0, s2_vecs)

    # coordinates of small elements in the (S1, S2) basis
    proj1_mat, proj2_mat = {}, {}
    for deg in small.basis.occupied_degrees():
        names = small.basis.names_in_degree(deg)
        b1 = [s1_vecs[nm] for nm, d in s1_elems if d == deg]
        n1 = [nm for nm, d in s1_elems if d == deg]
        b2 = [s2_vecs[nm] for nm, d in s2_elems if d == deg]
        n2 = [nm for nm, d in s2_elems if d == deg]
        for e in names:
            x = _coords(field, names, b1 + b2, {e: field.one})
            col1 = {n1[i]: x[i] for i in range(len(n1)) if x[i]}
            col2 = {n2[i]: x[len(n1) + i] for i in range(len(n2)) if x[len(n1) + i]}
            if col1:
                proj1_mat[e] = col1
            if col2:
                proj2_mat[e] = col2
    proj1 = GradedMap(small.basis, s1_basis, 0, proj1_mat)
    proj2 = GradedMap(small.basis, s2_basis, 0, proj2_mat)

    d1 = proj1 * small.d * incl1
    cx1 = ChainComplex(s1_basis, d1)
    d2 = proj2 * small.d * incl2
    cx2 = ChainComplex(s2_basis, d2)

    pi1 = proj1 * w.pi
    nabla1 = w.nabla * incl1
    contraction = Contraction(big, cx1, pi1, nabla1, w.h)

    blocks = {
        "m1_basis": [nabla1(nm) for nm in s1_basis.names()],
        "pi_nabla_rank": len(s1_elems),
        "complement_dim": len(s2_elems),
        "nabla2": w.nabla * incl2,
    }
    return contraction, cx2, blocks


def embed_as_weak_system(c):
    return WeakSystem(c.big, c.small, c.pi, c.nabla, c.h)


def fix_side_conditions(big, small, pi, nabla, h):
    """Upgrade data satisfying (co0)+(co1) to a full contraction.

    Standard replacement: first squeeze h between (Id - nabla pi), then
    h -> h d h; the result satisfies all three side conditions.
    """
    ident = GradedMap.identity(big.basis)
    q = ident - nabla * pi
    h1 = q * h * q
    h2 = h1 * big.d * h1
    return Contraction(big, small, pi, nabla, h2)
