"""Structure files: a canonical JSON interchange format for DG structures.

A structure file declares a field, a kind (dga, dgc, dgla, ainf, linf), an
ordered generator list, and sparse structure-constant entries with exact
coefficient strings ("3", "-1", "2/7"; never floats).  Emission is canonical
(fixed key order, entries sorted by basis index), so emit . parse is the
identity on its own output byte for byte.

Contraction files use the same conventions for the (pi, nabla, h) data of a
(weak) system, as produced by the homology and normalize commands.
"""

import json

from .field import Field, FieldError
from .graded import GradedBasis, GradedMap, StructureError
from .complexes import ChainComplex, Contraction, WeakSystem
from .linfty import DGLieAlgebra, LInfinityStructure, SymWordSpace
from .transfer import AInfinityStructure, MultiMap
from .words import DGAlgebra, DGCoalgebra


KINDS = ("dga", "dgc", "dgla", "ainf", "linf")


class ParseError(ValueError):
    """The input file is not a well-formed structure file."""


class StructureFile:
    """A parsed structure file: field, kind, and the built library object."""

    def __init__(self, kind, field, obj, max_arity=None):
        self.kind = kind
        self.field = field
        self.obj = obj
        self.max_arity = max_arity

    @property
    def basis(self):
        if self.kind in ("ainf", "linf"):
            return self.obj.carrier
        return self.obj.basis

    def complex(self):
        """The underlying chain complex, for the homology pipeline."""
        if self.kind == "ainf":
            m1 = self.obj.ops.get(1)
            mat = {w[0]: col for w, col in m1.columns.items()} if m1 else {}
            d = GradedMap(self.basis, self.basis, -1, mat)
            return ChainComplex(self.basis, d)
        if self.kind == "linf":
            d = self.obj.d1 or GradedMap(self.basis, self.basis, -1, {})
            return ChainComplex(self.basis, d)
        return self.obj.cx


def _coeffs(field, entries, width, what):
    out = []
    for e in entries:
        if len(e) != width:
            raise ParseError("%s entry %r must have %d fields" % (what, e, width))
        try:
            c = field.of(e[-1])
        except (ValueError, FieldError) as exc:
            raise ParseError("bad coefficient %r in %s: %s" % (e[-1], what, exc))
        if not c:
            raise ParseError("explicit zero coefficient in %s at %r" % (what, e))
        out.append(tuple(e[:-1]) + (c,))
    return out


def _check_names(basis, names, what):
    for n in names:
        if n not in basis.index:
            raise ParseError("unknown generator %r in %s" % (n, what))


def _matrix(field, basis_in, basis_out, entries, what):
    mat = {}
    for (src, tgt, c) in _coeffs(field, entries, 3, what):
        _check_names(basis_in, [src], what)
        _check_names(basis_out, [tgt], what)
        if tgt in mat.setdefault(src, {}):
            raise ParseError("duplicate %s entry (%s, %s)" % (what, src, tgt))
        mat[src][tgt] = c
    return mat


def parse_structure(data, field=None):
    """Build a StructureFile from a parsed JSON dict (or a JSON string).

    ``field`` overrides the declared field; coefficient strings are
    reinterpreted there (a modular reduction for Fp).
    """
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError("not valid JSON: %s" % exc)
    if not isinstance(data, dict):
        raise ParseError("structure file must be a JSON object")
    kind = data.get("kind")
    if kind not in KINDS:
        raise ParseError("kind must be one of %s, got %r" % (KINDS, kind))
    try:
        f = field or Field.from_tag(data.get("field", "Q"))
    except FieldError as exc:
        raise ParseError(str(exc))
    gens = data.get("generators")
    if not isinstance(gens, list) or not gens:
        raise ParseError("generators must be a non-empty list")
    try:
        basis = GradedBasis([(str(n), int(d)) for n, d in gens], f)
    except (TypeError, ValueError, StructureError) as exc:
        raise ParseError("bad generator list: %s" % exc)
    N = data.get("max_arity")
    N = int(N) if N is not None else None

    dmat = _matrix(f, basis, basis, data.get("differential", []),
                   "differential")
    try:
        d = GradedMap(basis, basis, -1, dmat)
    except StructureError as exc:
        raise ParseError(str(exc))

    try:
        if kind == "dga":
            mu = {}
            for (a, b, t, c) in _coeffs(f, data.get("product", []), 4,
                                        "product"):
                _check_names(basis, [a, b, t], "product")
                mu.setdefault((a, b), {})[t] = c
            return StructureFile(kind, f, DGAlgebra(basis, d, mu), N)
        if kind == "dgc":
            delta = {}
            for (a, x, y, c) in _coeffs(f, data.get("diagonal", []), 4,
                                        "diagonal"):
                _check_names(basis, [a, x, y], "diagonal")
                delta.setdefault(a, {})[(x, y)] = c
            return StructureFile(kind, f, DGCoalgebra(basis, d, delta), N)
        if kind == "dgla":
            table = {}
            for (x, y, t, c) in _coeffs(f, data.get("bracket", []), 4,
                                        "bracket"):
                _check_names(basis, [x, y, t], "bracket")
                table.setdefault((x, y), {})[t] = c
            # skewness and Leibniz verified on load; Jacobi is judged by the
            # CCE square-zero checker, so files violating it still parse
            g = DGLieAlgebra(basis, d, table, jacobi=False)
            return StructureFile(kind, f, g, N)
        if kind == "ainf":
            N = N or 5
            tabs = {}
            for e in data.get("ops", []):
                if len(e) != 4:
                    raise ParseError("ops entry %r must be [n, word, target, "
                                     "coeff]" % (e,))
                n, word, t, cs = e
                word = tuple(str(l) for l in word)
                if len(word) != int(n):
                    raise ParseError("ops entry %r word length != arity" % (e,))
                _check_names(basis, word + (t,), "ops")
                c = f.of(cs)
                if not c:
                    raise ParseError("explicit zero coefficient in ops")
                tabs.setdefault(int(n), {}).setdefault(word, {})[t] = c
            ops = {n: MultiMap(basis, basis, n, n - 2, cols)
                   for n, cols in tabs.items()}
            return StructureFile(kind, f, AInfinityStructure(basis, ops, N), N)
        # linf: components on canonical suspended words over the carrier
        N = N or 5
        space = SymWordSpace(basis.shifted(1), N)
        comps = {}
        for e in data.get("ops", []):
            if len(e) != 4:
                raise ParseError("ops entry %r must be [n, word, target, "
                                 "coeff]" % (e,))
            n, word, t, cs = e
            word = tuple(str(l) for l in word)
            if len(word) != int(n) or int(n) < 2:
                raise ParseError("linf ops entry %r has bad arity" % (e,))
            _check_names(basis, word + (t,), "ops")
            cw, exp = space.canon(word)
            if cw != word or exp:
                raise ParseError("linf ops word %r is not canonical" % (word,))
            c = f.of(cs)
            if not c:
                raise ParseError("explicit zero coefficient in ops")
            comps.setdefault(int(n), {}).setdefault(word, {})[t] = c
        d1 = d if dmat else None
        obj = LInfinityStructure(basis, space, comps, N, d1=d1)
        return StructureFile(kind, f, obj, N)
    except ParseError:
        raise
    except (StructureError, FieldError) as exc:
        raise ParseError(str(exc))


def load_structure(path, field=None):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc))
    return parse_structure(text, field=field)


# ---------------------------------------------------------------------------
# emission


def _sorted_matrix(field, basis_in, basis_out, mat):
    out = []
    for src, col in mat.items():
        for tgt, c in col.items():
            out.append((basis_in.index[src], basis_out.index[tgt],
                        [src, tgt, field.to_str(c)]))
    return [e for _, _, e in sorted(out, key=lambda x: (x[0], x[1]))]


def structure_to_dict(sf):
    f = sf.field
    basis = sf.basis
    idx = basis.index
    out = {"field": f.tag(), "kind": sf.kind,
           "generators": [[n, d] for n, d in basis.elements]}
    if sf.max_arity is not None:
        out["max_arity"] = sf.max_arity
    obj = sf.obj
    if sf.kind in ("dga", "dgc", "dgla"):
        out["differential"] = _sorted_matrix(f, basis, basis, obj.d.matrix)
    if sf.kind == "dga":
        rows = []
        for (a, b), col in obj.mu.items():
            for t, c in col.items():
                rows.append((idx[a], idx[b], idx[t],
                             [a, b, t, f.to_str(c)]))
        out["product"] = [e for *_, e in sorted(rows, key=lambda x: x[:3])]
    elif sf.kind == "dgc":
        rows = []
        for a, col in obj.delta.items():
            for (x, y), c in col.items():
                rows.append((idx[a], idx[x], idx[y],
                             [a, x, y, f.to_str(c)]))
        out["diagonal"] = [e for *_, e in sorted(rows, key=lambda x: x[:3])]
    elif sf.kind == "dgla":
        rows = []
        for (x, y), col in obj.table.items():
            for t, c in col.items():
                rows.append((idx[x], idx[y], idx[t],
                             [x, y, t, f.to_str(c)]))
        out["bracket"] = [e for *_, e in sorted(rows, key=lambda x: x[:3])]
    elif sf.kind == "ainf":
        rows = []
        for n, m in obj.ops.items():
            for word, col in m.columns.items():
                for t, c in col.items():
                    rows.append(((n,) + tuple(idx[l] for l in word)
                                 + (idx[t],),
                                 [n, list(word), t, f.to_str(c)]))
        out["ops"] = [e for _, e in sorted(rows, key=lambda x: x[0])]
    else:  # linf
        if obj.d1 is not None:
            out["differential"] = _sorted_matrix(f, basis, basis,
                                                 obj.d1.matrix)
        rows = []
        for n, tab in obj.comps.items():
            for word, col in tab.items():
                for t, c in col.items():
                    rows.append(((n,) + tuple(idx[l] for l in word)
                                 + (idx[t],),
                                 [n, list(word), t, f.to_str(c)]))
        out["ops"] = [e for _, e in sorted(rows, key=lambda x: x[0])]
    return out


def emit_structure(sf):
    """Canonical JSON text, newline-terminated."""
    return json.dumps(structure_to_dict(sf), indent=2) + "\n"


# ---------------------------------------------------------------------------
# contraction files


def contraction_to_dict(c, field=None, weak=False):
    f = field or c.big.basis.field
    big, small = c.big.basis, c.small.basis
    return {
        "field": f.tag(),
        "kind": "weak-system" if weak else "contraction",
        "big": [[n, d] for n, d in big.elements],
        "small": [[n, d] for n, d in small.elements],
        "differential": _sorted_matrix(f, big, big, c.big.d.matrix),
        "small_differential": _sorted_matrix(f, small, small,
                                             c.small.d.matrix),
        "pi": _sorted_matrix(f, big, small, c.pi.matrix),
        "nabla": _sorted_matrix(f, small, big, c.nabla.matrix),
        "h": _sorted_matrix(f, big, big, c.h.matrix),
    }


def emit_contraction(c, field=None, weak=False):
    return json.dumps(contraction_to_dict(c, field, weak), indent=2) + "\n"


def parse_contraction(data, field=None):
    """Parse a contraction (or weak-system) file back into the library type."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError("not valid JSON: %s" % exc)
    kind = data.get("kind")
    if kind not in ("contraction", "weak-system"):
        raise ParseError("kind must be contraction or weak-system, got %r"
                         % (kind,))
    try:
        f = field or Field.from_tag(data.get("field", "Q"))
        big_b = GradedBasis([(str(n), int(d)) for n, d in data["big"]], f)
        small_b = GradedBasis([(str(n), int(d)) for n, d in data["small"]], f)
    except (KeyError, TypeError, ValueError, FieldError,
            StructureError) as exc:
        raise ParseError("bad contraction file: %s" % exc)
    d_big = GradedMap(big_b, big_b, -1, _matrix(
        f, big_b, big_b, data.get("differential", []), "differential"))
    d_small = GradedMap(small_b, small_b, -1, _matrix(
        f, small_b, small_b, data.get("small_differential", []),
        "small_differential"))
    pi = GradedMap(big_b, small_b, 0, _matrix(
        f, big_b, small_b, data.get("pi", []), "pi"))
    nabla = GradedMap(small_b, big_b, 0, _matrix(
        f, small_b, big_b, data.get("nabla", []), "nabla"))
    h = GradedMap(big_b, big_b, 1, _matrix(
        f, big_b, big_b, data.get("h", []), "h"))
    big = ChainComplex(big_b, d_big)
    small = ChainComplex(small_b, d_small)
    cls = WeakSystem if kind == "weak-system" else Contraction
    return cls(big, small, pi, nabla, h)


def load_contraction(path, field=None):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc))
    return parse_contraction(text, field=field)
