"""Command-line front end.

Commands::

    periodlab eval   --object OBJ (--s S | --nu NU | --coeffs FILE) (--grid G | --points P)
    periodlab verify --suite NAME[,NAME...] [--s S] [--seed K] [--tol T]
    periodlab scan   --t-range A..B --step H --sign {+1,-1} [--basis-size N]
    periodlab coeffs check --coeffs FILE

Output goes to ``--out`` (written atomically) or to stdout, as CSV or JSON.
Floats are printed with 17 significant digits so reruns are byte-identical.

Exit codes: 0 success, 1 a verification suite failed, 2 bad arguments or
input file, 3 domain error, pole or pole-guard saturation.
"""

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import tempfile
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import autoforms, periodmap, transfer
from .autoforms import CoefficientSet, SpectralParam
from .errors import CoefficientError, CoefficientFileError, NoConvergence, PeriodlabError, PoleError

__all__ = [
    "RunConfig",
    "ResidualReport",
    "SUITES",
    "parse_complex",
    "parse_grid",
    "parse_points",
    "load_coefficients",
    "write_report",
    "cmd_eval",
    "cmd_verify",
    "cmd_scan",
    "cmd_coeffs_check",
    "main",
]

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3

OBJECTS = ("eisenstein", "eisenstein-lattice", "maass", "psi-eisenstein", "f", "psi")


class UsageError(ValueError):
    """Bad command-line value; maps to exit code 2."""


# ---------------------------------------------------------------------------
# parsing

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(
    rf"^\s*(?:(?P<re>[+-]?{_NUM})(?:(?P<isign>[+-])(?P<im>{_NUM})?[ij])?"
    rf"|(?P<pure>[+-]?(?:{_NUM})?)[ij])\s*$"
)


def parse_complex(text):
    """Parse ``a+bi``, ``a``, ``bi``, ``-i`` and the like (``j`` also accepted).

    >>> parse_complex("2-0.5i")
    (2-0.5j)
    """
    m = _COMPLEX_RE.match(str(text))
    if not m:
        raise UsageError(f"cannot parse complex number {text!r}")
    if m.group("pure") is not None:
        p = m.group("pure")
        im = float(p + "1") if p in ("", "+", "-") else float(p)
        return complex(0.0, im)
    re_part = float(m.group("re"))
    if m.group("isign") is None:
        return complex(re_part, 0.0)
    im = float(m.group("im")) if m.group("im") is not None else 1.0
    return complex(re_part, im if m.group("isign") == "+" else -im)


def _parse_range(text, what):
    m = re.match(rf"^\s*([+-]?{_NUM})\.\.([+-]?{_NUM})\s*$", text)
    if not m:
        raise UsageError(f"cannot parse {what} range {text!r}; expected a..b")
    return float(m.group(1)), float(m.group(2))


def parse_grid(text):
    """Parse ``x=a..b:n,y=c..d:m`` into points ``x + iy``, x-major order."""
    axes = {}
    for part in str(text).split(","):
        m = re.match(rf"^\s*([xy])=(.+):(\d+)\s*$", part)
        if not m:
            raise UsageError(f"cannot parse grid component {part!r}; expected x=a..b:n")
        name, rng, n = m.group(1), m.group(2), int(m.group(3))
        if name in axes:
            raise UsageError(f"grid axis {name} given twice")
        if n < 1:
            raise UsageError(f"grid axis {name} needs at least one point")
        lo, hi = _parse_range(rng, f"grid axis {name}")
        axes[name] = np.linspace(lo, hi, n)
    if set(axes) != {"x", "y"}:
        raise UsageError("grid needs both an x and a y axis")
    return [complex(x, y) for x in axes["x"] for y in axes["y"]]


def parse_points(text):
    """Parse a comma-separated list of complex numbers."""
    parts = [p for p in str(text).split(",") if p.strip()]
    if not parts:
        raise UsageError("empty point list")
    return [parse_complex(p) for p in parts]


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _complex_arg(text):
    try:
        return parse_complex(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc))


# ---------------------------------------------------------------------------
# coefficient files

_TOP_KEYS = {"type", "s", "k", "parity", "coefficients"}
_ENTRY_KEYS = {"n", "re", "im"}


def _fail(path, where, msg):
    raise CoefficientFileError(f"{path}: {where}: {msg}")


def _number(value, path, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, where, f"expected a number, got {value!r}")
    return float(value)


def load_coefficients(path, n_max=30):
    """Read a coefficient JSON file and convert it to a :class:`CoefficientSet`.

    The file holds one object with keys ``type`` (``maass``,
    ``holomorphic`` or ``eisenstein``), ``s`` as ``[re, im]`` (maass,
    eisenstein) or ``k`` (holomorphic), optional ``parity`` and, except for
    eisenstein, ``coefficients``: a list of ``{"n", "re", "im"}`` entries
    with the classical ``a_n`` or ``c_n``. Unknown keys are rejected.

    `n_max` is the window used for the generated Eisenstein coefficients.

    Raises
    ------
    FileNotFoundError
    CoefficientFileError
        With the file name and the offending line or field.
    """
    path = os.fspath(path)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        _fail(path, f"line {exc.lineno} column {exc.colno}", exc.msg)
    if not isinstance(data, dict):
        _fail(path, "top level", "expected a JSON object")
    unknown = sorted(set(data) - _TOP_KEYS)
    if unknown:
        _fail(path, f"field {unknown[0]!r}", "unknown key")
    kind = data.get("type")
    if kind not in ("maass", "holomorphic", "eisenstein"):
        _fail(path, "field 'type'", f"expected maass, holomorphic or eisenstein, got {kind!r}")
    parity = data.get("parity", "even" if kind == "eisenstein" else "none")
    if parity not in ("even", "odd", "none"):
        _fail(path, "field 'parity'", f"expected even, odd or none, got {parity!r}")

    s = None
    if kind in ("maass", "eisenstein"):
        if "k" in data:
            _fail(path, "field 'k'", f"not allowed for type {kind}")
        raw = data.get("s")
        if not isinstance(raw, list) or len(raw) != 2:
            _fail(path, "field 's'", "expected [re, im]")
        s = complex(_number(raw[0], path, "field 's[0]'"), _number(raw[1], path, "field 's[1]'"))
    else:
        if "s" in data:
            _fail(path, "field 's'", "not allowed for type holomorphic; use 'k'")
        k = data.get("k")
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            _fail(path, "field 'k'", f"expected a positive integer, got {k!r}")

    coeffs = {}
    if kind == "eisenstein":
        if "coefficients" in data:
            _fail(path, "field 'coefficients'", "eisenstein coefficients are generated, not read")
        if parity != "even":
            _fail(path, "field 'parity'", "the Eisenstein series is even")
    else:
        entries = data.get("coefficients")
        if not isinstance(entries, list):
            _fail(path, "field 'coefficients'", "expected a list")
        for i, entry in enumerate(entries):
            where = f"coefficients[{i}]"
            if not isinstance(entry, dict):
                _fail(path, where, "expected an object")
            extra = sorted(set(entry) - _ENTRY_KEYS)
            if extra:
                _fail(path, f"{where}.{extra[0]}", "unknown key")
            n = entry.get("n")
            if isinstance(n, bool) or not isinstance(n, int) or n == 0:
                _fail(path, f"{where}.n", f"expected a nonzero integer, got {n!r}")
            if n in coeffs:
                _fail(path, f"{where}.n", f"duplicate index {n}")
            re_ = _number(entry.get("re", 0.0), path, f"{where}.re")
            im_ = _number(entry.get("im", 0.0), path, f"{where}.im")
            coeffs[n] = complex(re_, im_)

    try:
        if kind == "maass":
            return autoforms.maass_coefficients(coeffs, s, parity)
        if kind == "holomorphic":
            if parity != "none":
                _fail(path, "field 'parity'", "holomorphic cusp forms carry no parity")
            return autoforms.holomorphic_coefficients(coeffs, data["k"])
        return autoforms.eisenstein_coefficients(s, n_max, "family")
    except CoefficientError as exc:
        _fail(path, "coefficients", str(exc))


# ---------------------------------------------------------------------------
# reports and output


@dataclass
class RunConfig:
    """Everything a command needs; built from the parsed arguments."""

    command: str
    object: str = None
    s: complex = None
    k: int = None
    points: list = None
    suites: tuple = ()
    coeffs: str = None
    out: str = None
    format: str = "csv"
    N: int = None
    basis_size: int = 28
    tol: float = None
    threads: int = 1
    seed: int = 0
    t_range: tuple = None
    step: float = 0.05
    sign: int = 1


@dataclass
class ResidualReport:
    """Outcome of one verification suite.

    ``samples`` is a list of ``(label, residual)`` pairs in evaluation
    order; a third entry overrides `tol` for that sample. ``runtime`` is
    kept for display and left out of written files so that they stay
    byte-identical across reruns.
    """

    name: str
    params: dict
    samples: list
    tol: float
    runtime: float = field(default=0.0, compare=False)

    @property
    def max_residual(self):
        return max((s[1] for s in self.samples), default=0.0)

    def sample_tol(self, sample):
        return sample[2] if len(sample) > 2 else self.tol

    @property
    def passed(self):
        return all(s[1] <= self.sample_tol(s) for s in self.samples)


def _fmt(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return format(x, ".17g")


def _json_value(v, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(x, indent, level + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        items = [pad + _json_value(x, indent, level + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if v is None:
        return "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (complex, np.complexfloating)):
        return _json_value({"re": v.real, "im": v.imag}, indent, level)
    x = float(v)
    return format(x, ".17g") if math.isfinite(x) else "null"


def dumps_json(obj, indent=2):
    """JSON text with insertion-ordered keys and 17-digit floats."""
    return _json_value(obj, indent, 0) + "\n"


def _atomic_write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(prefix=".periodlab-", dir=directory)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
    return buf.getvalue()


def _param_text(params):
    parts = []
    for k, v in params.items():
        if isinstance(v, complex):
            v = f"{_fmt(v.real)}{'+' if v.imag >= 0 else '-'}{_fmt(abs(v.imag))}i"
        elif isinstance(v, float):
            v = _fmt(v)
        parts.append(f"{k}={v}")
    return ";".join(parts)


def _report_dict(r):
    return {
        "suite": r.name,
        "params": r.params,
        "tol": r.tol,
        "max_residual": r.max_residual,
        "passed": r.passed,
        "samples": [{"label": s[0], "residual": s[1], "tol": r.sample_tol(s)} for s in r.samples],
    }


REPORT_COLUMNS = ("suite", "params", "sample", "residual", "max_residual", "tol", "passed")


def write_report(reports, path, format="csv"):
    """Write residual reports as CSV (one row per sample) or JSON.

    An empty list gives a header-only CSV or ``{"reports": []}``.
    """
    if format == "json":
        text = dumps_json({"reports": [_report_dict(r) for r in reports]})
    elif format == "csv":
        rows = []
        for r in reports:
            for smp in r.samples:
                rows.append([r.name, _param_text(r.params), smp[0], smp[1], r.max_residual,
                             r.sample_tol(smp), r.passed])
        text = _csv_text(REPORT_COLUMNS, rows)
    else:
        raise UsageError(f"unknown output format {format!r}")
    _atomic_write(path, text)


# ---------------------------------------------------------------------------
# eval


def _require_s(cfg):
    if cfg.s is None:
        raise UsageError(f"--s or --nu is required for object {cfg.object}")
    return cfg.s


def _require_coeffs(cfg):
    if not cfg.coeffs:
        raise UsageError(f"--coeffs is required for object {cfg.object}")
    c = load_coefficients(cfg.coeffs, n_max=cfg.N or 30)
    if cfg.k is not None and c.kind == "holomorphic" and abs(c.param.nu - (2 * cfg.k - 1)) > 0:
        raise UsageError(f"--k {cfg.k} does not match the weight in {cfg.coeffs}")
    return c


def _evaluator(cfg):
    obj = cfg.object
    if obj == "eisenstein":
        s = _require_s(cfg)
        return lambda z: autoforms.eval_eisenstein_fourier(s, z, cfg.N)
    if obj == "eisenstein-lattice":
        s = _require_s(cfg)
        return lambda z: autoforms.eval_eisenstein_lattice(s, z, cfg.N)
    if obj == "psi-eisenstein":
        return periodmap.eisenstein_psi(_require_s(cfg))
    c = _require_coeffs(cfg)
    if obj == "maass":
        if c.kind != "maass":
            raise UsageError(f"object maass needs a maass coefficient file, got {c.kind}")
        return lambda z: autoforms.eval_maass(c, z, full_output=False)
    f = periodmap.f_from_coefficients(c)
    if obj == "f":
        return lambda z: periodmap.eval_f(f, z)
    if obj == "psi":
        return periodmap.psi_evaluator_from_f(f)
    raise UsageError(f"unknown object {obj!r}")


def cmd_eval(cfg):
    """Evaluate the requested object at each point; write ``(z, value)`` rows."""
    if not cfg.points:
        raise UsageError("eval needs --grid or --points")
    fn = _evaluator(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        values = [complex(fn(z)) for z in cfg.points]
    if cfg.format == "json":
        text = dumps_json({
            "object": cfg.object,
            "rows": [{"z": z, "value": v} for z, v in zip(cfg.points, values)],
        })
    else:
        text = _csv_text(
            ("z_re", "z_im", "value_re", "value_im"),
            [(z.real, z.imag, v.real, v.imag) for z, v in zip(cfg.points, values)],
        )
    _atomic_write(cfg.out, text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify suites: each maps onto one library residual operation

_PSI_POINTS = (0.6, 1.0, 2.5, 0.7 + 0.4j, 1.3 - 0.8j, -0.4 + 0.5j,
               -0.9 + 1.5j, 2 + 2j, 0.5 - 2.2j, 0.3 - 0.6j)
_F_POINTS = (0.1 + 0.3j, 0.4 + 0.8j, -0.3 + 1.2j, 0.45 + 0.5j, 0.2 + 2j,
             0.1 - 0.3j, -0.4 - 0.8j, 0.3 - 1.2j, -0.45 - 0.5j, 0.25 - 2j)
_FE_S = (0.3 + 0.4j, 0.7 - 1.2j, 1.3 + 0.2j, 1.8 + 2.5j, 2.4 - 0.7j,
         0.15 + 3j, -0.4 + 0.6j, 1.1 - 2j, 2.9 + 1.5j, 0.55 + 0.05j)


def _clabel(z):
    z = complex(z)
    return f"{_fmt(z.real)}{'+' if z.imag >= 0 else '-'}{_fmt(abs(z.imag))}i"


def _random_nu(rng):
    return complex(rng.uniform(-1.8, 1.8), rng.uniform(-3.0, 3.0))


def random_periodic_f(rng, n_terms=12, decay=0.3):
    """A :class:`PeriodicF` with Gaussian coefficients damped by ``e^(-decay n)``."""
    nu = _random_nu(rng)
    damp = np.exp(-decay * np.arange(1, n_terms + 1))
    plus = (rng.standard_normal(n_terms) + 1j * rng.standard_normal(n_terms)) * damp
    minus = (rng.standard_normal(n_terms) + 1j * rng.standard_normal(n_terms)) * damp
    A0 = complex(rng.standard_normal(), rng.standard_normal())
    return periodmap.PeriodicF(SpectralParam(nu=nu), A0, plus, minus)


def random_coefficient_set(rng, n_terms=12, decay=0.3, nu=None):
    f = random_periodic_f(rng, n_terms, decay)
    nu = f.param.nu if nu is None else nu
    return CoefficientSet(SpectralParam(nu=nu), f.plus, f.minus, f.A0,
                          complex(rng.standard_normal(), rng.standard_normal()))


def _s_list(cfg, default):
    return [cfg.s] if cfg.s is not None else list(default)


def _suite_eisenstein_invariance(cfg, rng):
    theta = np.linspace(0.5, math.pi - 0.5, 10)
    radius = np.where(np.arange(10) % 2 == 0, 0.97, 1.03)
    zs = radius * np.exp(1j * theta)
    samples = []
    for s in _s_list(cfg, (1.7, 1.5 + 0.5j)):
        paths = [("fourier", lambda z, s=s: autoforms.eval_eisenstein_fourier(s, z))]
        if s.real > 1:
            paths.append(("lattice", lambda z, s=s: autoforms.eval_eisenstein_lattice(s, z)))
        for name, fn in paths:
            table = autoforms.modular_invariance_residual(fn, zs)
            samples += [(f"s={_clabel(s)};path={name};z={_clabel(r['z'])}", r["rel"]) for r in table["rows"]]
    return {"zs": "10 points near |z|=1"}, samples, 1e-8


def _suite_three_term(cfg, rng):
    samples = []
    for s in _s_list(cfg, (1.5, 2.0, 2 + 1j, 0.75)):
        psi = periodmap.eisenstein_psi(s)
        tol = 1e-7 if psi.kind == "eisenstein_continued" else 1e-10
        if cfg.tol is not None:
            tol = cfg.tol
        for z in _PSI_POINTS:
            res = abs(periodmap.three_term_residual(psi, z)) / max(1.0, abs(psi(z)))
            samples.append((f"s={_clabel(s)};{psi.kind};z={_clabel(z)}", res, tol))
    return {}, samples, 1e-10


def _suite_parity(cfg, rng):
    samples = []
    for s in _s_list(cfg, (1.5, 2.0, 2 + 1j, 0.75)):
        psi = periodmap.eisenstein_psi(s)
        for z in _PSI_POINTS:
            res = abs(periodmap.parity_residual(psi, z, +1)) / max(1.0, abs(psi(z)))
            samples.append((f"s={_clabel(s)};z={_clabel(z)}", res))
    return {"sign": 1}, samples, 1e-9


def _suite_round_trip(cfg, rng):
    samples = []
    for i in range(20):
        f = random_periodic_f(rng)
        psi = periodmap.psi_evaluator_from_f(f)
        taus = np.array(_F_POINTS)
        back = periodmap.f_from_psi(psi, taus)
        direct = periodmap.eval_f(f, taus)
        res = float(np.max(np.abs(back - direct) / np.maximum(1.0, np.abs(direct))))
        samples.append((f"draw={i};nu={_clabel(f.param.nu)}", res))
    return {"seed": cfg.seed}, samples, 1e-12


def _suite_iota_involution(cfg, rng):
    samples = []
    for i in range(20):
        c = random_coefficient_set(rng)
        back = autoforms.iota_map(autoforms.iota_map(c))
        res = max(autoforms._componentwise_residual(back, c).values())
        samples.append((f"draw={i};nu={_clabel(c.param.nu)}", res))
    return {"seed": cfg.seed}, samples, 1e-12


def _suite_family_fe(cfg, rng):
    samples = []
    for s in _s_list(cfg, _FE_S):
        samples.append((f"s={_clabel(s)}", autoforms.eisenstein_family_fe_residual(s)["max"]))
    return {}, samples, 1e-9


def _suite_psiiotaalpha(cfg, rng):
    samples = []
    for i in range(10):
        c = random_coefficient_set(rng)
        res = periodmap.psiiotaalpha_identity_residual(c, _F_POINTS)
        samples.append((f"draw={i};nu={_clabel(c.param.nu)}", res))
    return {"seed": cfg.seed}, samples, 1e-10


def _suite_limit_condition(cfg, rng):
    samples = []
    for i in range(10):
        f = random_periodic_f(rng)
        psi = periodmap.psi_evaluator_from_f(f)
        res = periodmap.limit_condition_residual(psi)
        samples.append((f"draw={i};nu={_clabel(f.param.nu)}", abs(res) / max(1.0, abs(f.A0))))
    return {"seed": cfg.seed}, samples, 1e-8


def _suite_fixed_point(cfg, rng):
    return {"s": 1.0}, [("1/z on [1.2, 2.8]", transfer.fixed_point_check())], 1e-10


SUITES = {
    "eisenstein-invariance": _suite_eisenstein_invariance,
    "three-term": _suite_three_term,
    "parity": _suite_parity,
    "round-trip": _suite_round_trip,
    "iota-involution": _suite_iota_involution,
    "family-fe": _suite_family_fe,
    "psiiotaalpha": _suite_psiiotaalpha,
    "limit-condition": _suite_limit_condition,
    "fixed-point": _suite_fixed_point,
}


def run_suite(name, cfg):
    """Run one suite and return its :class:`ResidualReport`."""
    if name not in SUITES:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    rng = np.random.default_rng(cfg.seed)
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        params, samples, tol = SUITES[name](cfg, rng)
    if cfg.s is not None:
        params = {"s": cfg.s, **params}
    return ResidualReport(name, params, samples, cfg.tol if cfg.tol is not None else tol,
                          time.perf_counter() - start)


def cmd_verify(cfg):
    """Run the requested suites; exit 0 iff every one passes."""
    names = list(cfg.suites) or list(SUITES)
    for n in names:
        if n not in SUITES:
            raise UsageError(f"unknown suite {n!r}; choose from {', '.join(SUITES)}")
    reports = [run_suite(n, cfg) for n in names]
    write_report(reports, cfg.out, cfg.format)
    for r in reports:
        print(f"{r.name:24s} {'PASS' if r.passed else 'FAIL'}  max={r.max_residual:.3e}  "
              f"tol={max(r.sample_tol(s) for s in r.samples) if r.samples else r.tol:.0e}  ({r.runtime:.2f} s)", file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# ---------------------------------------------------------------------------
# scan

SCAN_COLUMNS = ("t", "nearest_eig_re", "nearest_eig_im", "dist_to_plus1", "dist_to_minus1",
                "detMinus_re", "detMinus_im", "detPlus_re", "detPlus_im")


def _crossing_record(bracket, N, tol):
    rec = {"t_lo": bracket.t_lo, "t_hi": bracket.t_hi, "sign": bracket.sign,
           "t_min": bracket.t_min, "dist_min": bracket.dist_min, "N": N}
    try:
        c = transfer.refine_crossing(bracket, N, tol=tol)
    except NoConvergence as exc:
        rec.update({"refined": False, "message": str(exc)})
        return rec
    rec.update({"refined": True, "t_star": c.t_star, "eigenvalue": c.eigenvalue_at_t_star,
                "residuals": c.residuals})
    return rec


def cmd_scan(cfg):
    """Tabulate the critical-line scan and refine every bracket.

    The table goes to ``--out`` (CSV or JSON); refined crossings go to a
    JSON sidecar ``<out>.crossings.json`` (or into the JSON document when
    writing to stdout).
    """
    if cfg.t_range is None:
        raise UsageError("scan needs --t-range a..b")
    t_lo, t_hi = cfg.t_range
    N = cfg.basis_size
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if t_hi < t_lo:
            brackets, rows = [], []
        else:
            brackets, rows = transfer.scan_critical_line(
                t_lo, t_hi, cfg.step, N, cfg.sign, threads=cfg.threads, full_output=True)
        tol = cfg.tol if cfg.tol is not None else 1e-9
        if cfg.threads > 1 and len(brackets) > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                crossings = list(pool.map(lambda b: _crossing_record(b, N, tol), brackets))
        else:
            crossings = [_crossing_record(b, N, tol) for b in brackets]
    table = [(r.t, r.nearest_eig.real, r.nearest_eig.imag, r.dist_to_plus1, r.dist_to_minus1,
              r.det_minus.real, r.det_minus.imag, r.det_plus.real, r.det_plus.imag) for r in rows]
    sidecar = {"N": N, "sign": cfg.sign, "t_range": list(cfg.t_range), "step": cfg.step,
               "perturbed_rows": sum(r.perturbed for r in rows), "crossings": crossings}
    if cfg.format == "json":
        doc = {"columns": list(SCAN_COLUMNS), "rows": [list(r) for r in table]}
        if cfg.out in (None, "-"):
            doc.update(sidecar)
        text = dumps_json(doc)
    else:
        text = _csv_text(SCAN_COLUMNS, table)
    if cfg.out not in (None, "-"):
        _atomic_write(cfg.out + ".crossings.json", dumps_json(sidecar))
    elif cfg.format == "csv":
        # table on stdout, crossings summary on stderr
        print(dumps_json(sidecar), file=sys.stderr, end="")
    _atomic_write(cfg.out, text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# coeffs check


def cmd_coeffs_check(cfg):
    """Validate a coefficient file and report its modular-invariance diagnostic."""
    if not cfg.coeffs:
        raise UsageError("coeffs check needs --coeffs")
    c = load_coefficients(cfg.coeffs, n_max=cfg.N or 30)
    summary = {"file": cfg.coeffs, "kind": c.kind, "s": c.param.s, "nu": c.param.nu,
               "parity": c.parity, "n_max": c.n_max}
    if c.kind == "maass" and c.n_max:
        zs = [0.5 * math.cos(th) + 1j * math.sin(th) for th in np.linspace(1.0, math.pi - 1.0, 6)]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            table = autoforms.modular_invariance_residual(
                lambda z: autoforms.eval_maass(c, z, full_output=False), zs)
        summary["modular_invariance_max_abs"] = table["max_abs"]
        summary["modular_invariance_max_rel"] = table["max_rel"]
    _atomic_write(cfg.out, dumps_json(summary))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p):
    p.add_argument("--s", type=_complex_arg, help="spectral parameter, e.g. 2+0i")
    p.add_argument("--nu", type=_complex_arg, help="alternative to --s: nu = 2s - 1")
    p.add_argument("--k", type=_positive_int, help="holomorphic weight parameter (weight 2k)")
    p.add_argument("--coeffs", help="coefficient JSON file")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--N", type=_positive_int, help="Fourier/lattice truncation")
    p.add_argument("--basis-size", type=_positive_int, default=28, help="transfer-matrix size")
    p.add_argument("--tol", type=_positive_float, help="override the default tolerance")
    p.add_argument("--threads", type=_positive_int, help="parallelism (env PERIODLAB_THREADS)")
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = _Parser(prog="periodlab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate an object on a grid or point list")
    _common(p)
    p.add_argument("--object", required=True, choices=OBJECTS)
    p.add_argument("--grid", help='"x=a..b:n,y=c..d:m"')
    p.add_argument("--points", help="comma-separated complex points")

    p = sub.add_parser("verify", help="run residual suites")
    _common(p)
    p.add_argument("--suite", default="", help="comma-separated suite names (default: all)")

    p = sub.add_parser("scan", help="scan the critical line for transfer eigenvalues +-1")
    _common(p)
    p.add_argument("--t-range", required=True, help="a..b")
    p.add_argument("--step", type=_positive_float, default=0.05)
    p.add_argument("--sign", type=int, choices=(1, -1), default=1)

    p = sub.add_parser("coeffs", help="coefficient-file utilities")
    csub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = csub.add_parser("check", help="validate a coefficient file")
    _common(c)
    return parser


def config_from_args(argv):
    args = build_parser().parse_args(argv)
    if args.s is not None and args.nu is not None:
        raise UsageError("give --s or --nu, not both")
    s = args.s if args.s is not None else (None if args.nu is None else (args.nu + 1) / 2)
    threads = args.threads
    if threads is None:
        env = os.environ.get("PERIODLAB_THREADS")
        try:
            threads = int(env) if env else 1
        except ValueError:
            raise UsageError(f"PERIODLAB_THREADS must be a positive integer, got {env!r}")
        if threads < 1:
            raise UsageError(f"PERIODLAB_THREADS must be a positive integer, got {env!r}")
    cfg = RunConfig(
        command=args.command, s=s, k=args.k, coeffs=args.coeffs, out=args.out,
        format=args.format, N=args.N, basis_size=args.basis_size, tol=args.tol,
        threads=threads, seed=args.seed,
    )
    if args.command == "eval":
        cfg.object = args.object
        if args.grid and args.points:
            raise UsageError("give --grid or --points, not both")
        if args.grid:
            cfg.points = parse_grid(args.grid)
        elif args.points:
            cfg.points = parse_points(args.points)
    elif args.command == "verify":
        cfg.suites = tuple(n.strip() for n in args.suite.split(",") if n.strip())
    elif args.command == "scan":
        cfg.t_range = _parse_range(args.t_range, "t")
        cfg.step, cfg.sign = args.step, args.sign
    elif args.command == "coeffs":
        cfg.command = "coeffs-check"
    return cfg


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "scan": cmd_scan, "coeffs-check": cmd_coeffs_check}


def main(argv=None):
    """Entry point of the ``periodlab`` script; returns the exit code."""
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, CoefficientFileError, FileNotFoundError) as exc:
        print(f"periodlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PeriodlabError, PoleError) as exc:
        print(f"periodlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
