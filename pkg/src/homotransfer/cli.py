"""Command-line front end.

    homotransfer homology  <input> [--field F] [--out PATH]
    homotransfer transfer  <input> [--field F] [--max-arity N] [--method M]
                           [--out PATH] [--seed S] [--figures] [--budget B]
                           [--check-cinfinity]
    homotransfer check     <input> --which W [--field F] [--max-arity N]
    homotransfer normalize <input> [--field F] [--out PATH]

Exit codes: 0 success, 2 parse error, 3 axiom/check failure, 4 cross-method
divergence, 5 resource budget exceeded.  HOMOTRANSFER_THREADS caps the number
of worker threads used to run independent transfer methods.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .complexes import (
    AxiomError,
    homology_contraction,
    normalize_weak_system,
    verify_contraction,
)
from .field import Field, FieldError
from .io import (
    ParseError,
    StructureFile,
    emit_contraction,
    emit_structure,
    load_contraction,
    load_structure,
)
from .linfty import cce_coalgebra, check_master, transfer_linf, \
    UnsupportedFieldError
from .perturbation import DivergenceError, verify_op_contraction
from .graded import StructureError
from .report import TransferReport, render_figures
from .transfer import (
    CheckReport,
    TreeBudgetError,
    check_cinfinity,
    check_morphism,
    check_stasheff,
    transfer_hpt,
    transfer_kadeishvili,
    transfer_recursive,
    transfer_trees,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_AXIOM = 3
EXIT_DIVERGENCE = 4
EXIT_BUDGET = 5


def thread_cap():
    try:
        n = int(os.environ.get("HOMOTRANSFER_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def _write(text, out):
    if out:
        tmp = out + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, out)
    else:
        sys.stdout.write(text)


def _field_arg(args):
    if args.field is None:
        return None
    try:
        return Field.from_tag(args.field)
    except FieldError as exc:
        raise ParseError(str(exc))


def cmd_homology(args):
    sf = load_structure(args.input, field=_field_arg(args))
    c = homology_contraction(sf.complex())
    rep = verify_contraction(c)
    if not rep.ok:
        for line in rep.lines():
            print(line, file=sys.stderr)
        return EXIT_AXIOM
    _write(emit_contraction(c, field=sf.field), args.out)
    return EXIT_OK


def _first_divergence(structures, morphisms):
    """Compare the per-method outputs; returns a description or None."""
    ref_name, ref = structures[0]
    for name, st in structures[1:]:
        for n in set(ref.ops) | set(st.ops):
            if ref.op(n) != st.op(n):
                return "m_%d differs between %s and %s" % (n, ref_name, name)
    if morphisms:
        mref_name, mref = morphisms[0]
        for name, phi in morphisms[1:]:
            for n in set(mref.comps) | set(phi.comps):
                if mref.comp(n) != phi.comp(n):
                    return "f_%d differs between %s and %s" % (
                        n, mref_name, name)
    return None


def cmd_transfer(args):
    sf = load_structure(args.input, field=_field_arg(args))
    N = args.max_arity
    report = TransferReport({
        "input": args.input, "field": sf.field.tag(), "max_arity": N,
        "method": args.method, "seed": args.seed,
        "threads": thread_cap(),
    })
    if N < 2:
        raise ParseError("--max-arity must be at least 2")

    if sf.kind == "dgla":
        return _transfer_dgla(args, sf, N, report)
    if sf.kind == "dgc":
        return _transfer_dgc(args, sf, N, report)

    A = sf.obj  # DGAlgebra or AInfinityStructure
    c = homology_contraction(sf.complex())
    if sf.kind == "dga":
        runners = {
            "hpt": lambda: transfer_hpt(A, c, N)[:2],
            "recursive": lambda: transfer_recursive(A, c, N)[:2],
            "kadeishvili": lambda: transfer_kadeishvili(A, c, N)[:2],
            "trees": lambda: transfer_trees(A, c, N, budget=args.budget)[:2],
        }
    else:
        runners = {
            "hpt": lambda: transfer_hpt(A, c, N)[:2],
            "trees": lambda: transfer_trees(A, c, N, budget=args.budget)[:2],
        }
    wanted = list(runners) if args.method == "all" else [args.method]
    for m in wanted:
        if m not in runners:
            raise ParseError("method %r is not available for kind %s"
                             % (m, sf.kind))

    results = {}
    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        futures = {m: pool.submit(runners[m]) for m in wanted}
        for m in wanted:
            with report.time_method(m):
                results[m] = futures[m].result()
    for m in wanted:
        report.record_ops(m, results[m][0])

    if len(wanted) > 1:
        div = _first_divergence([(m, results[m][0]) for m in wanted],
                                [(m, results[m][1]) for m in wanted])
        if div:
            report.note("DIVERGENCE: %s" % div)
            print("cross-method divergence: %s" % div, file=sys.stderr)
            print(report.to_json(), file=sys.stderr)
            return EXIT_DIVERGENCE

    structure, morphism = results[wanted[0]]
    report.record_check(check_stasheff(structure, min(N, 6)))
    report.record_check(check_morphism(morphism, N))
    if args.check_cinfinity:
        report.record_check(check_cinfinity(structure, N))

    out_sf = StructureFile("ainf", sf.field, structure, N)
    payload = emit_structure(out_sf)
    _write(payload, args.out)
    _finish_report(args, report, structure.carrier)
    return EXIT_OK if report.all_ok else EXIT_AXIOM


def _transfer_dgla(args, sf, N, report):
    g = sf.obj
    _space, _dl, cce_rep = cce_coalgebra(g, min(N, 3))
    if not cce_rep.ok:
        raise AxiomError("input bracket fails Jacobi: CCE coderivation does "
                         "not square to zero")
    c = homology_contraction(g.cx)
    with report.time_method("linf"):
        structure, tau, pc = transfer_linf(g, c, N)
    report.record_ops("linf", structure)
    report.record_check(check_master(tau, structure.coderivation()))
    axioms = verify_op_contraction(
        pc, list(pc.big_space.all_words(N)), list(pc.small_space.all_words(N)))
    bad = [label for label, ok, _ in axioms if not ok]
    report.record_check(CheckReport(
        "cce-contraction", [((label,), {} if ok else {"failed": 1})
                            for label, ok, _ in axioms]))
    out_sf = StructureFile("linf", sf.field, structure, N)
    _write(emit_structure(out_sf), args.out)
    _finish_report(args, report, structure.carrier)
    return EXIT_OK if report.all_ok and not bad else EXIT_AXIOM


def _transfer_dgc(args, sf, N, report):
    from .transfer import transfer_coalgebra, check_cotwisting_cochain
    C = sf.obj
    c = homology_contraction(C.cx)
    with report.time_method("coalgebra"):
        structure, tau, extras = transfer_coalgebra(C, c, N)
    tab = {n: len(structure.cops[n].columns) for n in structure.cops}
    report.methods.append("coalgebra")
    report.op_tables["coalgebra"] = tab
    report.record_check(check_cotwisting_cochain(tau, structure, extras, N))
    report.note("coalgebra transfer: higher diagonals reported only; "
                "dualize for a re-loadable ainf file")
    _write(report.to_json(), args.out)
    _finish_report(args, report, structure.carrier, emit_json=False)
    return EXIT_OK if report.all_ok else EXIT_AXIOM


def _finish_report(args, report, basis, emit_json=True):
    if args.out and emit_json:
        stem = os.path.splitext(args.out)[0]
        _write(report.to_json(), stem + ".report.json")
        if args.figures:
            render_figures(report, stem, basis)
    elif args.figures:
        stem = os.path.splitext(args.input)[0]
        render_figures(report, stem, basis)
    if not args.out:
        for line in report.lines():
            print(line, file=sys.stderr)


def cmd_check(args):
    which = args.which
    N = args.max_arity
    if which == "contraction":
        try:
            c = load_contraction(args.input, field=_field_arg(args))
        except ParseError:
            sf = load_structure(args.input, field=_field_arg(args))
            c = homology_contraction(sf.complex())
        rep = verify_contraction(c)
        for line in rep.lines():
            print(line)
        return EXIT_OK if rep.ok else EXIT_AXIOM

    sf = load_structure(args.input, field=_field_arg(args))
    if which == "stasheff":
        if sf.kind not in ("ainf", "dga"):
            raise ParseError("--which stasheff expects an ainf or dga file")
        from .transfer import AInfinityStructure
        st = sf.obj if sf.kind == "ainf" else \
            AInfinityStructure.from_dga(sf.obj, N)
        rep = check_stasheff(st, min(N, sf.max_arity or N))
    elif which == "morphism":
        if sf.kind != "dga":
            raise ParseError("--which morphism expects a dga file")
        c = homology_contraction(sf.complex())
        _st, phi, _ = transfer_hpt(sf.obj, c, N)
        rep = check_morphism(phi, N)
    elif which == "cinfinity":
        if sf.kind != "dga":
            raise ParseError("--which cinfinity expects a dga file")
        c = homology_contraction(sf.complex())
        st, _phi, _ = transfer_hpt(sf.obj, c, N)
        rep = check_cinfinity(st, N)
    elif which == "master":
        if sf.kind != "dgla":
            raise ParseError("--which master expects a dgla file")
        _space, _dl, rep = cce_coalgebra(sf.obj, N)
        if rep.ok:
            c = homology_contraction(sf.obj.cx)
            st, tau, _pc = transfer_linf(sf.obj, c, N)
            rep = check_master(tau, st.coderivation())
    else:
        raise ParseError("unknown checker %r" % (which,))
    for line in rep.lines():
        print(line)
    return EXIT_OK if rep.ok else EXIT_AXIOM


def cmd_normalize(args):
    w = load_contraction(args.input, field=_field_arg(args))
    contraction, complement, blocks = normalize_weak_system(w)
    rep = verify_contraction(contraction)
    if not rep.ok:
        for line in rep.lines():
            print(line, file=sys.stderr)
        return EXIT_AXIOM
    print("pi nabla rank %d, complement dimension %d"
          % (blocks["pi_nabla_rank"], blocks["complement_dim"]),
          file=sys.stderr)
    _write(emit_contraction(contraction), args.out)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="homotransfer",
        description="Exact homotopy transfer of A-infinity and L-infinity "
                    "structures")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("input")
        sp.add_argument("--field", default=None,
                        help="override the declared field (Q or Fp:<p>)")
        sp.add_argument("--out", default=None)

    sp = sub.add_parser("homology", help="contraction onto homology")
    common(sp)
    sp.set_defaults(fn=cmd_homology)

    sp = sub.add_parser("transfer", help="transfer structure to homology")
    common(sp)
    sp.add_argument("--max-arity", type=int, default=5)
    sp.add_argument("--method", default="all",
                    choices=["all", "hpt", "recursive", "kadeishvili",
                             "trees"])
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--figures", action="store_true",
                    help="render report figures next to the output")
    sp.add_argument("--budget", type=int, default=20000,
                    help="planar-tree enumeration budget")
    sp.add_argument("--check-cinfinity", action="store_true")
    sp.set_defaults(fn=cmd_transfer)

    sp = sub.add_parser("check", help="run an identity checker")
    common(sp)
    sp.add_argument("--which", required=True,
                    choices=["stasheff", "morphism", "master", "contraction",
                             "cinfinity"])
    sp.add_argument("--max-arity", type=int, default=5)
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("normalize", help="normalize a weak system")
    common(sp)
    sp.set_defaults(fn=cmd_normalize)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE
    except (TreeBudgetError, DivergenceError) as exc:
        print("resource budget exceeded: %s" % exc, file=sys.stderr)
        return EXIT_BUDGET
    except (AxiomError, UnsupportedFieldError) as exc:
        print("axiom violation: %s" % exc, file=sys.stderr)
        return EXIT_AXIOM
    except StructureError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
