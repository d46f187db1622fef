"""Command-line front end: ``blaschke-lab <command> [flags]``.

Every command produces one table.  ``--format csv`` writes it as CSV,
``json`` writes ``{"metadata": ..., "columns": ..., "rows": ...}`` and
``svg`` writes a polyline chart to ``--out`` plus the table as CSV next to
it (same stem, ``.csv`` suffix).  Output bytes depend only on the config.

Exit codes: 0 success, 2 certification failure, 3 capacity exceeded,
64 configuration error, 1 any other numerical error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import __version__
from .errors import CapacityExceeded, CertificationFailure, ConfigError, LabError

__all__ = ["RunConfig", "parse_n", "parse_lambdas", "parse_k_range", "run", "main", "COMMANDS"]

COMMANDS = ("coeffs", "norms", "asymptotics", "equidist", "sweep", "beta", "certify")
FORMATS = ("csv", "json", "svg")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CERTIFICATION = 2
EXIT_CAPACITY = 3
EXIT_CONFIG = 64


@dataclass
class RunConfig:
    """Fully resolved run configuration; round-trips through :meth:`to_dict`."""

    command: str
    lam: str = "0.5"
    n: str = "256"
    k_range: str | None = None
    beta: float | None = None
    precision_bits: int = 53
    tol_l1: float | None = None
    threads: int = 1
    format: str | None = None
    out: str | None = None
    engine: str = "auto"
    family: str = "BlaschkePower"
    j: str = "1,2,3"
    table: str = "xm"
    small_grid: bool = False

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format is None:
            self.format = "json" if self.command == "beta" else "csv"
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        if self.format == "svg" and self.out is None:
            raise ConfigError("--format svg needs --out")
        if self.table not in ("xm", "weyl"):
            raise ConfigError("--table must be xm or weyl")
        if self.engine not in ("auto", "Recurrence", "ClosedForm", "FFT"):
            raise ConfigError(f"unknown engine {self.engine!r}")
        if self.family not in ("BlaschkePower", "Dirichlet"):
            raise ConfigError(f"unknown family {self.family!r}")
        if int(self.threads) < 1:
            raise ConfigError("--threads must be at least 1")
        if int(self.precision_bits) < 53:
            raise ConfigError("--precision-bits must be at least 53")
        if self.tol_l1 is not None and not float(self.tol_l1) > 0.0:
            raise ConfigError("--tol-l1 must be positive")
        # validate eagerly so bad configs fail before any work
        parse_lambdas(self.lam)
        parse_n(self.n)
        parse_k_range(self.k_range)
        parse_js(self.j)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        if "command" not in d:
            raise ConfigError("config needs a command")
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(d)


# --------------------------------------------------------------------------
# value parsers
# --------------------------------------------------------------------------

def parse_lambdas(text: str) -> list[str]:
    """Comma-separated decimal strings, each checked to lie in ``[0, 1)``."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        try:
            val = float(part)
        except ValueError as exc:
            raise ConfigError(f"bad lambda {part!r}") from exc
        if not 0.0 <= val < 1.0:
            raise ConfigError(f"lambda must lie in [0, 1), got {part}")
        out.append(part)
    return out


def parse_n(text) -> list[int]:
    """Comma-separated items ``n``, ``a:b`` (step 1), ``a:b:s`` or ``a:b:xm``.

    ``a:b:x2`` is the dyadic range ``a, 2a, 4a, ... <= b``.
    """
    out: list[int] = []
    for item in str(text).split(","):
        item = item.strip()
        try:
            bits = item.split(":")
            if len(bits) == 1:
                out.append(int(bits[0]))
                continue
            if len(bits) not in (2, 3):
                raise ValueError(item)
            a, b = int(bits[0]), int(bits[1])
            step = bits[2] if len(bits) == 3 else "1"
            if step.startswith("x"):
                mult = int(step[1:])
                if mult < 2 or a < 1:
                    raise ValueError(item)
                v = a
                while v <= b:
                    out.append(v)
                    v *= mult
            else:
                s = int(step)
                if s < 1:
                    raise ValueError(item)
                out.extend(range(a, b + 1, s))
        except ValueError as exc:
            raise ConfigError(f"bad n specification {item!r}") from exc
    if not out or min(out) < 0:
        raise ConfigError(f"n specification {text!r} is empty or negative")
    return sorted(set(out))


def parse_k_range(text) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        a, b = (int(x) for x in str(text).split(":"))
    except ValueError as exc:
        raise ConfigError(f"bad k range {text!r}; expected a:b") from exc
    if a < 0 or b < a:
        raise ConfigError(f"bad k range {text!r}")
    return a, b


def parse_js(text) -> list[int]:
    try:
        js = sorted({int(x) for x in str(text).split(",")})
    except ValueError as exc:
        raise ConfigError(f"bad j list {text!r}") from exc
    if not js or js[0] < 1:
        raise ConfigError("j values must be positive")
    return js


# --------------------------------------------------------------------------
# tables
# --------------------------------------------------------------------------

@dataclass
class Table:
    columns: tuple
    rows: list
    metadata: dict
    plot: dict | None = None


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def _json_value(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, float):
        return float(v) if math.isfinite(v) else None
    return int(v)


def table_csv(t: Table) -> str:
    buf = io.StringIO()
    buf.write(",".join(t.columns) + "\n")
    for row in t.rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def table_json(t: Table) -> str:
    doc = {
        "metadata": {k: _json_value(v) for k, v in t.metadata.items()},
        "columns": list(t.columns),
        "rows": [{c: _json_value(v) for c, v in zip(t.columns, row)} for row in t.rows],
    }
    return json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n"


def _metadata(engine, precision_bits, tail_bound) -> dict:
    return {
        "engine": engine,
        "precision_bits": precision_bits,
        "tail_bound": tail_bound,
        "version": __version__,
    }


def _engine_label(engines) -> str:
    return "+".join(sorted({e.value for e in engines}))


def _beta_override(cfg: RunConfig, p):
    from .equidist import beta_solve, window_from_beta

    if cfg.beta is not None:
        return window_from_beta(p, float(cfg.beta))
    return beta_solve(p)


def _cmd_coeffs(cfg: RunConfig) -> Table:
    from .coeffs import Family, TestFunction, compute_spectrum

    lams, ns = parse_lambdas(cfg.lam), parse_n(cfg.n)
    if len(lams) != 1 or len(ns) != 1:
        raise ConfigError("coeffs takes a single lambda and a single n")
    family = Family(cfg.family)
    if family is Family.DIRICHLET:
        tf = TestFunction.dirichlet(ns[0], lams[0])
    else:
        tf = TestFunction.blaschke(lams[0], ns[0])
    kr = parse_k_range(cfg.k_range)
    N = None if kr is None else kr[1]
    spec = compute_spectrum(tf, N, cfg.engine, cfg.tol_l1)
    lo = 0 if kr is None else kr[0]
    rows = [(k, float(spec.coeffs[k])) for k in range(lo, spec.truncation_n + 1)]
    plot = {
        "series": {f"n={tf.n}": ([r[0] for r in rows], [r[1] for r in rows])},
        "title": f"Taylor coefficients, lambda={lams[0]}, n={tf.n}",
        "xlabel": "k",
        "ylabel": "c_k",
    }
    return Table(("k", "coeff"), rows, _metadata(spec.engine.value, spec.precision_bits, spec.tail_bound), plot)


def _sweep_table(cfg: RunConfig, title: str) -> Table:
    from .norms import SWEEP_COLUMNS, sharpness_sweep

    lams, ns = parse_lambdas(cfg.lam), parse_n(cfg.n)
    betas = None
    if cfg.beta is not None:
        betas = {lam: float(cfg.beta) for lam in lams}
    recs = sharpness_sweep(lams, ns, cfg.family, cfg.engine, int(cfg.threads), cfg.tol_l1, betas)
    rows = [r.row() for r in recs]
    series = {}
    for lam in sorted({r.lam for r in recs}):
        sub = [r for r in recs if r.lam == lam]
        series[f"lambda={lam}"] = ([r.n for r in sub], [r.constant_low for r in sub])
    plot = {
        "series": series,
        "title": title,
        "xlabel": "n",
        "ylabel": "ratio / sqrt(n/(1-lambda))",
        "logx": True,
    }
    engine = cfg.engine if cfg.engine != "auto" else "auto"
    return Table(SWEEP_COLUMNS, rows, _metadata(engine, 53, None), plot)


def _cmd_norms(cfg: RunConfig) -> Table:
    from .coeffs import Family, TestFunction, compute_spectrum
    from .norms import report_from_spectrum

    lams, ns = parse_lambdas(cfg.lam), parse_n(cfg.n)
    if len(lams) == 1 and len(ns) == 1:
        family = Family(cfg.family)
        if family is Family.DIRICHLET:
            tf = TestFunction.dirichlet(ns[0], lams[0])
        else:
            tf = TestFunction.blaschke(lams[0], ns[0])
        spec = compute_spectrum(tf, None, cfg.engine, cfg.tol_l1)
        rep = report_from_spectrum(tf, spec)
        t = _sweep_table(cfg, "Sharpness constant")
        t.metadata = _metadata(rep.engine.value, spec.precision_bits, rep.tail_bound)
        return t
    return _sweep_table(cfg, "Sharpness constant")


def _cmd_sweep(cfg: RunConfig) -> Table:
    return _sweep_table(cfg, "Sharpness constant vs n")


def _cmd_asymptotics(cfg: RunConfig) -> Table:
    from concurrent.futures import ThreadPoolExecutor

    from .asymptotics import PROFILE_COLUMNS, error_profile
    from .phase import LambdaParam

    lams, ns = parse_lambdas(cfg.lam), parse_n(cfg.n)
    kr = parse_k_range(cfg.k_range)
    jobs = []
    for lam in lams:
        p = LambdaParam.parse(lam)
        w = _beta_override(cfg, p)
        jobs.extend((p, w, n) for n in ns)

    def one(job):
        p, w, n = job
        return error_profile(p, n, window=w)

    if int(cfg.threads) > 1:
        with ThreadPoolExecutor(max_workers=int(cfg.threads)) as pool:
            profiles = list(pool.map(one, jobs))
    else:
        profiles = [one(job) for job in jobs]
    rows, series = [], {}
    for prof in profiles:
        recs = [r for r in prof.records if kr is None or kr[0] <= r.k <= kr[1]]
        for r in recs:
            rows.append((
                prof.lam, r.n, r.k, r.t, r.predicted, r.exact, r.abs_err,
                r.scaled_err, r.amplitude, r.phase_mod_2pi,
            ))
        series[f"lambda={prof.lam}, n={prof.n}"] = ([r.t for r in recs], [r.abs_err for r in recs])
    plot = {
        "series": series,
        "title": "Error of the leading asymptotic term",
        "xlabel": "t = k/n",
        "ylabel": "|exact - predicted|",
        "logy": True,
    }
    return Table(PROFILE_COLUMNS, rows, _metadata("Recurrence", 53, None), plot)


def _cmd_equidist(cfg: RunConfig) -> Table:
    from .equidist import WEYL_J_CAP, equidist_report
    from .phase import LambdaParam

    lams, ns = parse_lambdas(cfg.lam), parse_n(cfg.n)
    js = parse_js(cfg.j)
    if js[-1] > WEYL_J_CAP:
        raise ConfigError(f"j values are capped at {WEYL_J_CAP}")
    prec = int(cfg.precision_bits)
    rows, series = [], {}
    for lam in lams:
        p = LambdaParam.parse(lam)
        w = _beta_override(cfg, p)
        reps = [equidist_report(w, n, js, prec if prec > 53 else None) for n in ns]
        if cfg.table == "xm":
            rows.extend((p.lam, r.n, r.M, r.X, r.ratio_xm) for r in reps)
            series[f"lambda={p.lam}"] = ([r.n for r in reps], [r.ratio_xm for r in reps])
        else:
            for r in reps:
                rows.extend((p.lam, r.n, j, r.weyl[j], r.y_over_m[j]) for j in js)
            for j in js:
                series[f"lambda={p.lam}, j={j}"] = ([r.n for r in reps], [r.y_over_m[j] for r in reps])
    if cfg.table == "xm":
        cols = ("lambda", "n", "M", "X", "ratio_xm")
        plot = {"series": series, "title": "X/M vs n", "xlabel": "n", "ylabel": "X/M", "logx": True}
    else:
        cols = ("lambda", "n", "j", "max_weyl_over_sqrt_n", "y_over_m")
        plot = {
            "series": series, "title": "|Y_j|/M vs n", "xlabel": "n", "ylabel": "|Y_j|/M",
            "logx": True, "logy": True,
        }
    return Table(cols, rows, _metadata("phase", prec, None), plot)


def _cmd_beta(cfg: RunConfig) -> Table:
    from .phase import LambdaParam

    rows = []
    for lam in parse_lambdas(cfg.lam):
        p = LambdaParam.parse(lam)
        w = _beta_override(cfg, p)
        rows.append((p.lam, w.alpha, w.beta, w.beta_inv, w.target, w.residual))
    cols = ("lambda", "alpha", "beta", "beta_inv", "target", "residual")
    return Table(cols, rows, _metadata("brentq", 53, None))


def _cmd_certify(cfg: RunConfig) -> Table:
    from .certify import run_all

    results = run_all(small=bool(cfg.small_grid))
    rows = [(r.suite, r.cases, r.worst, r.passed) for r in results]
    return Table(("suite", "cases", "worst_ratio", "passed"), rows, _metadata("all", 53, None))


_DISPATCH = {
    "coeffs": _cmd_coeffs,
    "norms": _cmd_norms,
    "asymptotics": _cmd_asymptotics,
    "equidist": _cmd_equidist,
    "sweep": _cmd_sweep,
    "beta": _cmd_beta,
    "certify": _cmd_certify,
}


def _emit(cfg: RunConfig, t: Table, stdout) -> None:
    if cfg.format == "svg":
        from .svg import line_chart

        out = Path(cfg.out)
        if t.plot is None:
            raise ConfigError(f"{cfg.command} has no plot; use csv or json")
        out.write_text(line_chart(**t.plot), encoding="utf-8")
        out.with_suffix(".csv").write_text(table_csv(t), encoding="utf-8")
        return
    text = table_csv(t) if cfg.format == "csv" else table_json(t)
    if cfg.out is None:
        stdout.write(text)
    else:
        Path(cfg.out).write_text(text, encoding="utf-8")


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute ``cfg`` and return the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    table = _DISPATCH[cfg.command](cfg)
    _emit(cfg, table, stdout)
    if cfg.command == "certify" and not all(row[3] for row in table.rows):
        failed = ", ".join(row[0] for row in table.rows if not row[3])
        raise CertificationFailure(f"suites failed: {failed}")
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

_FLAG_KEYS = (
    "lam", "n", "k_range", "beta", "precision_bits", "tol_l1", "threads", "format",
    "out", "engine", "family", "j", "table", "small_grid",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blaschke-lab", description="Nikolskii ratio experiments for Blaschke powers.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("command", choices=COMMANDS)
    s = argparse.SUPPRESS
    parser.add_argument("--lambda", dest="lam", default=s, help="decimal lambda, or comma list")
    parser.add_argument("--n", default=s, help="n, comma list, a:b, a:b:step or a:b:x2")
    parser.add_argument("--k-range", dest="k_range", default=s, help="inclusive a:b")
    parser.add_argument("--beta", type=float, default=s, help="override the solved window parameter")
    parser.add_argument("--precision-bits", dest="precision_bits", type=int, default=s)
    parser.add_argument("--tol-l1", dest="tol_l1", type=float, default=s, help="relative l1 tail tolerance")
    parser.add_argument("--threads", type=int, default=s)
    parser.add_argument("--format", choices=FORMATS, default=s)
    parser.add_argument("--out", default=s, help="output path (stdout if omitted)")
    parser.add_argument("--engine", choices=("auto", "Recurrence", "ClosedForm", "FFT"), default=s)
    parser.add_argument("--family", choices=("BlaschkePower", "Dirichlet"), default=s)
    parser.add_argument("--j", default=s, help="comma list of Weyl frequencies")
    parser.add_argument("--table", choices=("xm", "weyl"), default=s, help="equidist table")
    parser.add_argument("--small-grid", dest="small_grid", action="store_true", default=s)
    parser.add_argument("--config", default=s, help="JSON config file; flags win")
    return parser


def config_from_args(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    merged: dict = {}
    if "config" in ns:
        try:
            text = Path(ns.pop("config")).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        merged.update(RunConfig.from_json(text).to_dict())
        merged["lam"] = merged.pop("lambda")
    merged.update({k: v for k, v in ns.items() if k in _FLAG_KEYS or k == "command"})
    return RunConfig(**merged)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        return run(config_from_args(argv))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CertificationFailure as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    except CapacityExceeded as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except LabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
