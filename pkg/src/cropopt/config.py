"""Run configuration files: flat ``key = value`` lines with ``#`` comments.

Example::

    domain = disk          # rectangle, disk, lshape, cross, polygon, omega1..omega4
    domain.h = 0.05
    D = 0.01
    alpha = 1
    T = 1
    L = 0.4
    solver = both          # oracle, uzawa or both
    uzawa.eta = 0.1        # only allowed when the uzawa solver is selected
    seed = 0
    baselines = 20
    raster = 200          # symcheck cells per axis; mesh resolution by default
"""
from dataclasses import dataclass, field
import math
from pathlib import Path

from .exceptions import ConfigError, InvalidSpecError, ParameterError
from .mesh import DOMAIN_KINDS, DomainSpec, benchmark_domain
from .model import ProblemParams
from .uzawa import UzawaConfig

SOLVER_CHOICES = ("oracle", "uzawa", "both")
BENCHMARK_NAMES = {f"omega{i}": i for i in range(1, 5)}
REQUIRED_KEYS = ("domain", "D", "alpha", "T", "L", "solver")


@dataclass(frozen=True)
class SymcheckTolerances:
    """Pass thresholds for the ``symcheck`` command.

    ``axis`` is in cell areas of the raster, ``disk`` a fraction of ``L``.
    """

    axis: float = 2.0
    gap: int = 0
    star: float = 0.0
    disk: float = 0.05


@dataclass(frozen=True)
class RunConfig:
    domain: DomainSpec
    domain_name: str
    params: ProblemParams
    solver: str = "oracle"
    uzawa: UzawaConfig = None
    output_dir: Path = Path("out")
    seed: int = 0
    baselines: int = 20
    raster: tuple = None
    symcheck: SymcheckTolerances = field(default_factory=SymcheckTolerances)

    @property
    def solvers(self):
        return ("oracle", "uzawa") if self.solver == "both" else (self.solver,)


def _float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("value must be finite")
    return value


def _float_list(text):
    return tuple(_float(t) for t in text.replace(",", " ").split())


def _vertex_list(text):
    pts = []
    for chunk in text.split(";"):
        if chunk.strip():
            xy = _float_list(chunk)
            if len(xy) != 2:
                raise ValueError("polygon vertices are 'x y' pairs separated by ';'")
            pts.append(xy)
    return tuple(pts)


def _raster(text):
    dims = tuple(int(t) for t in text.replace("x", " ").replace(",", " ").split())
    if len(dims) == 1:
        dims = dims * 2
    if len(dims) != 2 or min(dims) < 1:
        raise ValueError("raster is one or two positive integers")
    return dims


_DOMAIN_KEYS = {"domain.h": _float, "domain.radius": _float, "domain.c": _float,
                "domain.extent": _float_list, "domain.vertices": _vertex_list}
_PARAM_KEYS = {"D": _float, "alpha": _float, "T": _float, "L": _float}
_UZAWA_KEYS = {"eta": _float, "mu": _float, "lambda0": _float, "max_iters": int,
               "check_period": int, "stop_tol": _float, "budget_tol": _float}
_SYMCHECK_KEYS = {"axis_tol": _float, "gap_tol": int, "star_tol": _float,
                  "disk_tol": _float}
_OTHER_KEYS = {"domain": str, "solver": str, "output_dir": str, "seed": int,
               "baselines": int, "raster": _raster}


def _converter(key, lineno):
    if key in _DOMAIN_KEYS:
        return _DOMAIN_KEYS[key]
    if key in _PARAM_KEYS:
        return _PARAM_KEYS[key]
    if key in _OTHER_KEYS:
        return _OTHER_KEYS[key]
    section, _, name = key.partition(".")
    if section == "uzawa" and name in _UZAWA_KEYS:
        return _UZAWA_KEYS[name]
    if section == "symcheck" and name in _SYMCHECK_KEYS:
        return _SYMCHECK_KEYS[name]
    if key in _UZAWA_KEYS:
        raise ConfigError(f"'{key}' is an uzawa setting; write 'uzawa.{key}' "
                          "together with 'solver = uzawa' or 'solver = both'", lineno)
    raise ConfigError(f"unknown key '{key}'", lineno)


def _tokenize(text):
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        if key in entries:
            raise ConfigError(f"duplicate key '{key}' (first on line {entries[key][1]})",
                              lineno)
        convert = _converter(key, lineno)
        if not value:
            raise ConfigError(f"'{key}' has no value", lineno)
        try:
            entries[key] = (convert(value), lineno)
        except ValueError as exc:
            raise ConfigError(f"bad value for '{key}': {value!r} ({exc})", lineno) from None
    return entries


def parse_config(text):
    """Parse and validate a run configuration.

    Raises
    ------
    ConfigError
        For unknown or duplicate keys, bad values, missing required keys or
        uzawa settings without the uzawa solver.  The message carries the
        offending line number where there is one.
    """
    entries = _tokenize(text)
    missing = [k for k in REQUIRED_KEYS if k not in entries]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")

    def get(key, default=None):
        return entries[key][0] if key in entries else default

    def line(key):
        return entries[key][1] if key in entries else None

    solver = get("solver")
    if solver not in SOLVER_CHOICES:
        raise ConfigError(f"solver must be one of {', '.join(SOLVER_CHOICES)}", line("solver"))
    uzawa_keys = [k for k in entries if k.startswith("uzawa.")]
    if uzawa_keys and solver == "oracle":
        first = min(uzawa_keys, key=line)
        raise ConfigError(f"section 'uzawa' ('{first}') needs solver = uzawa or both",
                          line(first))

    domain, domain_name = _domain(entries, get, line)

    for name in ("D", "alpha", "T"):
        if not get(name) > 0:
            raise ConfigError(f"{name} must be positive, got {get(name)}", line(name))
    L = get("L")
    if L < 0:
        raise ConfigError(f"L must be non-negative, got {L}", line("L"))
    area = domain.exact_area()
    if L > area:
        raise ConfigError(f"L = {L} exceeds the domain area {area}", line("L"))
    params = ProblemParams(get("D"), get("alpha"), get("T"), L)

    uzawa = None
    if solver in ("uzawa", "both"):
        kwargs = {k.split(".", 1)[1]: v for k, (v, _) in entries.items()
                  if k.startswith("uzawa.")}
        try:
            uzawa = UzawaConfig(**kwargs)
        except ParameterError as exc:
            first = min(uzawa_keys, key=line) if uzawa_keys else None
            raise ConfigError(f"uzawa: {exc}", line(first) if first else None) from None

    for key, low in (("seed", 0), ("baselines", 0)):
        if get(key, low) < low:
            raise ConfigError(f"{key} must be >= {low}", line(key))
    tol = SymcheckTolerances(get("symcheck.axis_tol", 2.0), get("symcheck.gap_tol", 0),
                             get("symcheck.star_tol", 0.0), get("symcheck.disk_tol", 0.05))
    for key in ("symcheck.axis_tol", "symcheck.gap_tol", "symcheck.star_tol",
                "symcheck.disk_tol"):
        if get(key, 0) < 0:
            raise ConfigError(f"{key} must be non-negative", line(key))
    return RunConfig(domain=domain, domain_name=domain_name, params=params, solver=solver,
                     uzawa=uzawa, output_dir=Path(get("output_dir", "out")),
                     seed=get("seed", 0), baselines=get("baselines", 20),
                     raster=get("raster"), symcheck=tol)


def _domain(entries, get, line):
    name = get("domain")
    if name in BENCHMARK_NAMES:
        kind = benchmark_domain(BENCHMARK_NAMES[name]).kind
    elif name in DOMAIN_KINDS:
        kind = name
    else:
        choices = ", ".join(DOMAIN_KINDS + tuple(BENCHMARK_NAMES))
        raise ConfigError(f"domain must be one of {choices}", line("domain"))
    kwargs = {k.split(".", 1)[1]: v for k, (v, _) in entries.items()
              if k.startswith("domain.")}
    if "extent" in kwargs and len(kwargs["extent"]) != 4:
        raise ConfigError("domain.extent needs xmin, xmax, ymin, ymax", line("domain.extent"))
    if kind == "polygon" and "vertices" not in kwargs:
        raise ConfigError("polygon domains need domain.vertices", line("domain"))
    try:
        return DomainSpec(kind, **kwargs), name
    except InvalidSpecError as exc:
        keys = [k for k in entries if k.startswith("domain")]
        raise ConfigError(f"domain: {exc}", max(line(k) for k in keys)) from None


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
