"""Transfer reports: the machine-readable summary emitted next to structure
files, and the optional figure rendering (operation-density bars and
homology dimension profile) written alongside the JSON output."""

import json
import time


class TransferReport:
    """Summary of one transfer run: methods used, per-arity operation tables,
    residual summaries of the identity checkers, timing, and the config echo
    (field, max arity, seed, input path)."""

    def __init__(self, config):
        self.config = dict(config)
        self.methods = []
        self.op_tables = {}      # method -> {arity: nonzero column count}
        self.residuals = {}      # checker name -> {"ok": bool, "failures": n}
        self.timings = {}        # label -> seconds
        self.notes = []
        self._t0 = time.time()

    def time_method(self, name):
        return _Timer(self, name)

    def record_ops(self, method, structure):
        self.methods.append(method)
        tab = {}
        for n in range(1, structure.N + 1):
            cols = getattr(structure, "ops", None)
            if cols is not None:
                m = structure.ops.get(n)
                tab[n] = len(m.columns) if m is not None else 0
            else:
                tab[n] = len(structure.comp(n))
        self.op_tables[method] = tab

    def record_check(self, report):
        self.residuals[report.name] = {
            "ok": report.ok, "failures": len(report.failures())}

    def note(self, text):
        self.notes.append(text)

    @property
    def all_ok(self):
        return all(r["ok"] for r in self.residuals.values())

    def to_dict(self):
        return {
            "config": self.config,
            "methods": self.methods,
            "operations": {m: {str(n): k for n, k in tab.items()}
                           for m, tab in self.op_tables.items()},
            "residuals": self.residuals,
            "all_residuals_zero": self.all_ok,
            "timings": {k: round(v, 6) for k, v in self.timings.items()},
            "total_seconds": round(time.time() - self._t0, 6),
            "notes": self.notes,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def lines(self):
        out = ["methods: %s" % ", ".join(self.methods or ["-"])]
        for m, tab in self.op_tables.items():
            nz = {n: k for n, k in tab.items() if k}
            out.append("  %s: nonzero columns per arity %s" % (m, nz or "{}"))
        for name, r in self.residuals.items():
            out.append("  check %s: %s" % (
                name, "ok" if r["ok"] else "%d failures" % r["failures"]))
        return out


class _Timer:
    def __init__(self, report, name):
        self.report = report
        self.name = name

    def __enter__(self):
        self.start = time.time()
        return self

    def __exit__(self, *exc):
        self.report.timings[self.name] = time.time() - self.start
        return False


def render_figures(report, stem, basis=None):
    """Write the report's figures next to the JSON output.

    ``stem`` is the output path without extension; produces
    ``<stem>_ops.png`` (nonzero operation columns per arity and method) and,
    when a carrier basis is given, ``<stem>_degrees.png`` (dimension per
    degree).  Returns the list of files written.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    if report.op_tables:
        fig, ax = plt.subplots(figsize=(6, 4))
        methods = sorted(report.op_tables)
        arities = sorted({n for tab in report.op_tables.values()
                          for n in tab})
        width = 0.8 / max(1, len(methods))
        for i, m in enumerate(methods):
            tab = report.op_tables[m]
            xs = [n + i * width for n in arities]
            ax.bar(xs, [tab.get(n, 0) for n in arities], width=width,
                   label=m)
        ax.set_xticks([n + 0.4 - width / 2 for n in arities])
        ax.set_xticklabels([str(n) for n in arities])
        ax.set_xlabel("arity")
        ax.set_ylabel("nonzero columns")
        ax.set_title("transferred operations")
        ax.legend()
        fig.tight_layout()
        path = stem + "_ops.png"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    if basis is not None and len(basis):
        degs = basis.occupied_degrees()
        fig, ax = plt.subplots(figsize=(6, 3))
        ax.bar(degs, [basis.dim(d) for d in degs], color="#557799")
        ax.set_xlabel("degree")
        ax.set_ylabel("dimension")
        ax.set_title("carrier dimensions")
        fig.tight_layout()
        path = stem + "_degrees.png"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written
