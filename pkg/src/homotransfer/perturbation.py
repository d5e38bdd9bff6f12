"""The ordinary perturbation lemma on lazy word operators.

Given a filtered contraction (M <=> N, h) and a filtration-lowering
perturbation del of the differential on N, the perturbed data are the four
series

    D       = sum pi del (-h del)^n nabla  =  sum pi (-del h)^n del nabla
    nabla'  = sum (-h del)^n nabla
    pi'     = sum pi (-del h)^n
    h'      = sum (-h del)^n h

truncated when the iterate dies (the filtration drop guarantees nilpotence up
to the cap).  Both forms of the first series are computed and compared on
every column; disagreement aborts.
"""

from .complexes import AxiomError
from .graded import vec_add_into, vec_scale, vec_sub
from .words import WordOp, WordSpace


class PerturbationError(AxiomError):
    """The proposed perturbation fails (d + del)^2 = 0."""


class DivergenceError(ValueError):
    """The perturbation does not lower the filtration; series would diverge."""


class Filtration:
    """Non-negative level function on words; default is word length."""

    def __init__(self, level=None):
        self._level = level or (lambda word: len(word))

    def level(self, word):
        return self._level(word)

    def max_level(self, vec):
        return max((self.level(w) for w in vec), default=0)


class Perturbation:
    """A degree -1 operator together with its minimal filtration drop."""

    def __init__(self, op, drop=1):
        if op.degree != -1:
            raise PerturbationError("perturbation must have degree -1")
        if drop < 1:
            raise DivergenceError(
                "perturbation must lower filtration by at least 1")
        self.op = op
        self.drop = drop
        self.field = op.field

    def column(self, word):
        return self.op.column(word)

    def apply(self, vec):
        return self.op.apply(vec)


class OpContraction:
    """Contraction data at the word-operator level (duck-types Contraction)."""

    requires_co0 = True

    def __init__(self, big_space, small_space, d_big, d_small, pi, nabla, h):
        self.big_space = big_space
        self.small_space = small_space
        self.d_big = d_big
        self.d_small = d_small
        self.pi = pi
        self.nabla = nabla
        self.h = h
        self.field = big_space.field


def validate_perturbation(d_big, pert, filtration, probe_words, cap):
    """Check (d + del)^2 = 0 and the filtration drop on the given words."""
    f = pert.field
    dd = pert.op

    def total(vec):
        out = d_big.apply(vec)
        return vec_add_into(f, out, dd.apply(vec))

    for w in probe_words:
        if filtration.level(w) > cap:
            continue
        col = dd.column(w)
        if col and filtration.max_level(col) > filtration.level(w) - pert.drop:
            raise DivergenceError(
                "perturbation does not drop filtration by %d at %r"
                % (pert.drop, w))
        one = {w: f.one}
        if total(total(one)):
            raise PerturbationError("(d + del)^2 != 0 at %r" % (w,))


def perturb(c, pert, filtration=None, cap=None, probe_words=(), check=True):
    """Apply the perturbation lemma; returns (D op on M, OpContraction).

    ``cap`` bounds the filtration level in play (default: max arity of the
    big word space); the series for any one column has at most
    cap // drop + 1 terms, enforced as a hard stop.
    """
    f = c.field
    filtration = filtration or Filtration()
    cap = cap if cap is not None else c.big_space.max_arity
    if check and probe_words:
        validate_perturbation(c.d_big, pert, filtration, probe_words, cap)
    max_terms = cap // pert.drop + 1
    dd = pert.op

    def series(vec, head, tail_first=False):
        """sum head((-h del)^n x) with x = vec, or the (-del h)^n mirror."""
        out = {}
        term = vec
        for n in range(max_terms + 1):
            vec_add_into(f, out, head(term))
            if tail_first:
                term = vec_scale(f, dd.apply(c.h.apply(term)), f.neg(f.one))
            else:
                term = vec_scale(f, c.h.apply(dd.apply(term)), f.neg(f.one))
            if not term:
                return out
        raise DivergenceError(
            "series exceeded %d terms; filtration not bounded by cap %d"
            % (max_terms, cap))

    def D_col(word):
        base = c.nabla.column(word)
        # form A: sum pi del (-h del)^n nabla
        a = series(base, lambda v: c.pi.apply(dd.apply(v)))
        # form B: sum pi (-del h)^n del nabla
        b = series(dd.apply(base), c.pi.apply, tail_first=True)
        if vec_sub(f, a, b):
            raise AxiomError(
                "the two forms of the perturbed differential disagree at %r"
                % (word,))
        return a

    small, big = c.small_space, c.big_space
    D = WordOp(small, small, -1, D_col)
    nabla_new = WordOp(small, big, 0,
                       lambda w: series(c.nabla.column(w), lambda v: v))
    h_new = WordOp(big, big, 1,
                   lambda w: series({w: f.one}, c.h.apply, tail_first=True))

    def pi_col(word):
        return series({word: f.one}, c.pi.apply, tail_first=True)

    pi_new = WordOp(big, small, 0, pi_col)

    def d_big_col(word):
        out = c.d_big.column(word)
        return vec_add_into(f, dict(out), dd.column(word))

    d_big_new = WordOp(big, big, -1, d_big_col)

    def d_small_col(word):
        out = c.d_small.column(word)
        return vec_add_into(f, dict(out), D.column(word))

    d_small_new = WordOp(small, small, -1, d_small_col)

    out = OpContraction(big, small, d_big_new, d_small_new,
                        pi_new, nabla_new, h_new)
    return D, out


def verify_op_contraction(c, big_words, small_words):
    """Contraction axioms for an OpContraction on explicit word lists.

    Returns a list of (label, ok, offending word or None), mirroring
    verify_contraction.
    """
    f = c.field
    one = f.one

    def probe(fn, words):
        for w in words:
            if fn({w: one}):
                return False, w
        return True, None

    results = []
    ok, bad = probe(
        lambda v: vec_sub(f, c.pi.apply(c.nabla.apply(v)), v), small_words)
    results.append(("(co0)", ok, bad))

    def co1(v):
        lhs = vec_add_into(f, c.d_big.apply(c.h.apply(v)),
                           c.h.apply(c.d_big.apply(v)))
        rhs = vec_sub(f, v, c.nabla.apply(c.pi.apply(v)))
        return vec_sub(f, lhs, rhs)

    ok, bad = probe(co1, big_words)
    results.append(("(co1)", ok, bad))
    ok, bad = probe(lambda v: c.pi.apply(c.h.apply(v)), big_words)
    results.append(("pi h = 0", ok, bad))
    ok, bad = probe(lambda v: c.h.apply(c.nabla.apply(v)), small_words)
    results.append(("h nabla = 0", ok, bad))
    ok, bad = probe(lambda v: c.h.apply(c.h.apply(v)), big_words)
    results.append(("h h = 0", ok, bad))
    ok, bad = probe(
        lambda v: vec_sub(f, c.pi.apply(c.d_big.apply(v)),
                          c.d_small.apply(c.pi.apply(v))), big_words)
    results.append(("pi chain", ok, bad))
    ok, bad = probe(
        lambda v: vec_sub(f, c.nabla.apply(c.d_small.apply(v)),
                          c.d_big.apply(c.nabla.apply(v))), small_words)
    results.append(("nabla chain", ok, bad))
    ok, bad = probe(
        lambda v: c.d_small.apply(c.d_small.apply(v)), small_words)
    results.append(("(d+D)^2 = 0", ok, bad))
    return results
