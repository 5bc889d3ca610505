"""Command-line front end: ``potcompose list|compose|verify``.

Jobs are described by a line-oriented config file::

    # comments start with '#'
    system0.family = radial_oscillator
    system0.g = 1.0
    system0.seed_kind = virtual
    system0.v = 0
    system1.family = infinite_well
    system1.width = 1.0
    outputs.modes = 1, 2

Every key is ``section.key = value``; unknown keys are errors.  Sections are
``system0`` (seeded system), ``system1`` (mapped system), the optional
``system2`` (second stage, seeded by ``system2.seed1.kind``/``.v`` of
System 1), ``numerics``, ``outputs`` and ``debug`` (fault injection).

Mode indices are the catalog's: eigenstate ``n`` counted from 0 for every
family except the infinite well, whose mode ``m = 1, 2, ...`` is
``sin(m pi y / width)``.

Exit codes: 0 success, 2 config or parse error, 3 construction failure,
4 verification failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .catalog import (
    CONSTRAINTS,
    FORMULAS,
    PARAMETERS,
    SEED_KINDS,
    Family,
    Interval,
    custom_nodeless,
    make_potential,
    overshoot_state,
    seed_bracket,
    virtual_state,
)
from .compose import Faults, compose, iterate, sample_grid
from .errors import ParamOutOfRange, PotComposeError
from .numerics import QuadSettings
from .verify import full_report

EXIT_OK, EXIT_CONFIG, EXIT_CONSTRUCTION, EXIT_VERIFY = 0, 2, 3, 4

PARAM_NAMES = ("g", "h", "mu", "kappa", "width")
CUSTOM_KEYS = ("phi", "energy", "lo", "hi")


class ConfigError(Exception):
    """Base class for config problems (exit code 2)."""


class ParseError(ConfigError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class ValidationError(ConfigError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


# ---------------------------------------------------------------------------
# config model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SystemConfig:
    family: str
    params: tuple[tuple[str, float], ...] = ()
    seed_kind: str | None = None
    v: int | None = None
    seed1_kind: str | None = None
    seed1_v: int | None = None
    phi: str | None = None
    energy: float | None = None
    lo: float | None = None
    hi: float | None = None


@dataclass(frozen=True)
class NumericsConfig:
    quad_rel_tol: float = 1e-10
    knots: int = 128
    margin: float = 1e-3
    grid_n: int = 64
    residual_tol: float = 1e-6
    orth_tol: float = 1e-8


@dataclass(frozen=True)
class OutputsConfig:
    csv_path: str | None = None
    report_path: str | None = None
    modes: tuple[int, ...] = ()


@dataclass(frozen=True)
class DebugConfig:
    corrupt_energy: float = 0.0
    weight_exponent: float = 4.0
    alpha_scale: float = 1.0


@dataclass(frozen=True)
class JobConfig:
    system0: SystemConfig
    system1: SystemConfig
    system2: SystemConfig | None = None
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    outputs: OutputsConfig = field(default_factory=OutputsConfig)
    debug: DebugConfig = field(default_factory=DebugConfig)

    @property
    def faults(self) -> Faults:
        return Faults(self.debug.corrupt_energy, self.debug.weight_exponent, self.debug.alpha_scale)


_SYSTEM_KEYS = {
    "system0": ("family", *PARAM_NAMES, "seed_kind", "v", *CUSTOM_KEYS),
    "system1": ("family", *PARAM_NAMES),
    "system2": ("family", *PARAM_NAMES, "seed1.kind", "seed1.v"),
}
_PLAIN_SECTIONS = {
    "numerics": NumericsConfig,
    "outputs": OutputsConfig,
    "debug": DebugConfig,
}


def _allowed(section: str) -> tuple[str, ...]:
    if section in _SYSTEM_KEYS:
        return _SYSTEM_KEYS[section]
    return tuple(f.name for f in fields(_PLAIN_SECTIONS[section]))


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _read_pairs(text: str) -> dict[str, tuple[int, str]]:
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(lineno, f"expected 'section.key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        section, _, name = key.partition(".")
        if not name or section not in _SYSTEM_KEYS and section not in _PLAIN_SECTIONS:
            raise ParseError(lineno, f"unknown key {key!r}")
        if name not in _allowed(section):
            raise ParseError(lineno, f"unknown key {key!r}; {section} accepts {', '.join(_allowed(section))}")
        if not value:
            raise ParseError(lineno, f"empty value for {key!r}")
        if key in pairs:
            raise ParseError(lineno, f"duplicate key {key!r} (first on line {pairs[key][0]})")
        pairs[key] = (lineno, value)
    return pairs


def _convert(key: str, lineno: int, value: str, kind):
    try:
        if kind is float:
            return float(value)
        if kind is int:
            out = float(value)
            if out != int(out):
                raise ValueError
            return int(out)
        if kind == "ints":
            return tuple(sorted({_convert(key, lineno, v.strip(), int) for v in value.split(",") if v.strip()}))
    except ValueError:
        raise ParseError(lineno, f"{key}: cannot read {value!r} as {getattr(kind, '__name__', kind)}") from None
    return value


_KINDS = {
    "v": int, "seed1.v": int, "energy": float, "lo": float, "hi": float,
    "quad_rel_tol": float, "knots": int, "margin": float, "grid_n": int,
    "residual_tol": float, "orth_tol": float, "modes": "ints",
    "corrupt_energy": float, "weight_exponent": float, "alpha_scale": float,
    **{p: float for p in PARAM_NAMES},
}


def _system(section: str, values: dict) -> SystemConfig | None:
    if not values:
        return None
    if "family" not in values:
        raise ValidationError(f"{section}.family", "missing")
    try:
        fam = Family.parse(values["family"])
    except ParamOutOfRange as exc:
        raise ValidationError(f"{section}.family", str(exc)) from None
    given = {p: values[p] for p in PARAM_NAMES if p in values}
    if fam is Family.CUSTOM:
        if section != "system0":
            raise ValidationError(f"{section}.family", "custom potentials are only available as system0")
        if given:
            raise ValidationError(f"{section}.{next(iter(given))}", "custom seeds take phi, energy, lo, hi")
        for key in CUSTOM_KEYS:
            if key not in values:
                raise ValidationError(f"{section}.{key}", "required for a custom seed")
        params = ()
    else:
        required = PARAMETERS[fam]
        for p in given:
            if p not in required:
                raise ValidationError(f"{section}.{p}", f"not a parameter of {fam.value} (takes {', '.join(required)})")
        for p in required:
            if p not in given:
                raise ValidationError(f"{section}.{p}", f"required for {fam.value}")
        for key in CUSTOM_KEYS:
            if key in values:
                raise ValidationError(f"{section}.{key}", "only valid for family = custom")
        params = tuple((p, given[p]) for p in required)
    return SystemConfig(
        family=fam.value,
        params=params,
        seed_kind=values.get("seed_kind"),
        v=values.get("v"),
        seed1_kind=values.get("seed1.kind"),
        seed1_v=values.get("seed1.v"),
        phi=values.get("phi"),
        energy=values.get("energy"),
        lo=values.get("lo"),
        hi=values.get("hi"),
    )


def _spec(section: str, sc: SystemConfig):
    try:
        return make_potential(sc.family, dict(sc.params))
    except ParamOutOfRange as exc:
        raise ValidationError(f"{section}.{sc.params[0][0]}" if sc.params else section, str(exc)) from None


def _check_seed(field_prefix: str, spec, kind: str | None, v: int | None):
    if kind is None:
        raise ValidationError(f"{field_prefix}kind" if "seed1" in field_prefix else f"{field_prefix}seed_kind",
                              "missing")
    kind_key = f"{field_prefix}kind" if "seed1" in field_prefix else f"{field_prefix}seed_kind"
    if kind not in SEED_KINDS[spec.family]:
        raise ValidationError(kind_key, f"{spec.family.value} admits seed kinds {SEED_KINDS[spec.family] or 'none'}")
    if v is None:
        raise ValidationError(f"{field_prefix}v", "missing")
    br = seed_bracket(spec, kind)
    if br.empty or not br.contains(v):
        raise ValidationError(f"{field_prefix}v", f"{kind} degree {v} not admissible for {spec}: v in {br.describe()}")


def _validate(cfg: JobConfig) -> JobConfig:
    s0 = cfg.system0
    if s0.family == Family.CUSTOM.value:
        if s0.seed_kind not in (None, "custom"):
            raise ValidationError("system0.seed_kind", "must be custom for a custom family")
        if not s0.lo < s0.hi:
            raise ValidationError("system0.hi", "need lo < hi")
        s0 = replace(s0, seed_kind="custom")
        cfg = replace(cfg, system0=s0)
    else:
        spec0 = _spec("system0", s0)
        if s0.seed_kind == "custom":
            raise ValidationError("system0.seed_kind", "custom seeds need family = custom")
        _check_seed("system0.", spec0, s0.seed_kind, s0.v)
    if cfg.system1 is None:
        raise ValidationError("system1.family", "missing")
    spec1 = _spec("system1", cfg.system1)
    if not spec1.domain.lo_finite:
        raise ValidationError("system1.family", f"{spec1} lives on {spec1.domain}; targets need a finite lower end")
    terminal = spec1
    if cfg.system2 is not None:
        spec2 = _spec("system2", cfg.system2)
        if not spec2.domain.lo_finite:
            raise ValidationError("system2.family", f"{spec2} lives on {spec2.domain}; targets need a finite lower end")
        _check_seed("system2.seed1.", spec1, cfg.system2.seed1_kind, cfg.system2.seed1_v)
        terminal = spec2
    for m in cfg.outputs.modes:
        if not terminal.has_index(m):
            raise ValidationError("outputs.modes", f"{terminal} has no eigenstate {m} (first index {terminal.index_base})")
    n = cfg.numerics
    if not n.quad_rel_tol > 0:
        raise ValidationError("numerics.quad_rel_tol", "must be > 0")
    if n.knots < 32:
        raise ValidationError("numerics.knots", "must be >= 32")
    if not 0 < n.margin < 0.5:
        raise ValidationError("numerics.margin", "must lie in (0, 0.5)")
    if n.grid_n < 2:
        raise ValidationError("numerics.grid_n", "must be >= 2")
    if not n.residual_tol > 0 or not n.orth_tol > 0:
        raise ValidationError("numerics.residual_tol", "tolerances must be > 0")
    return cfg


def parse_config(text: str) -> JobConfig:
    """Parse and validate a job config.

    Raises
    ------
    ParseError
        Malformed line, unknown or duplicate key, unreadable value.
    ValidationError
        A field violates its constraint (named in the message).
    """
    pairs = _read_pairs(text)
    by_section: dict[str, dict] = {s: {} for s in (*_SYSTEM_KEYS, *_PLAIN_SECTIONS)}
    for key, (lineno, value) in pairs.items():
        section, _, name = key.partition(".")
        kind = _KINDS.get(name, str)
        by_section[section][name] = _convert(key, lineno, value, kind)
    s0 = _system("system0", by_section["system0"])
    if s0 is None:
        raise ValidationError("system0.family", "missing")
    plain = {s: cls(**by_section[s]) for s, cls in _PLAIN_SECTIONS.items()}
    cfg = JobConfig(
        system0=s0,
        system1=_system("system1", by_section["system1"]),
        system2=_system("system2", by_section["system2"]),
        **plain,
    )
    return _validate(cfg)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(str(v) for v in value)
    return str(value)


def serialize_config(cfg: JobConfig) -> str:
    """Inverse of :func:`parse_config` (defaults are written out)."""
    lines = []
    for section in ("system0", "system1", "system2"):
        sc = getattr(cfg, section)
        if sc is None:
            continue
        lines.append(f"{section}.family = {sc.family}")
        lines.extend(f"{section}.{k} = {_fmt(v)}" for k, v in sc.params)
        for name, key in (("seed_kind", "seed_kind"), ("v", "v"), ("seed1_kind", "seed1.kind"),
                          ("seed1_v", "seed1.v"), *((k, k) for k in CUSTOM_KEYS)):
            value = getattr(sc, name)
            if value is not None:
                lines.append(f"{section}.{key} = {_fmt(value)}")
    for section in _PLAIN_SECTIONS:
        obj = getattr(cfg, section)
        for f in fields(obj):
            value = getattr(obj, f.name)
            if value is None or value == ():
                continue
            lines.append(f"{section}.{f.name} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


def load_config(path) -> JobConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config(text)


# ---------------------------------------------------------------------------
# building
# ---------------------------------------------------------------------------

def _custom_seed(sc: SystemConfig):
    import sympy

    x = sympy.Symbol("x", real=True)
    try:
        expr = sympy.sympify(sc.phi, locals={"x": x})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise ValidationError("system0.phi", f"cannot parse expression: {exc}") from None
    if expr.free_symbols - {x}:
        raise ValidationError("system0.phi", f"only x may appear, found {sorted(map(str, expr.free_symbols))}")
    fns = [sympy.lambdify(x, e, "numpy") for e in (expr, sympy.diff(expr, x), sympy.diff(expr, x, 2))]

    def wrap(f):
        return lambda t: np.broadcast_to(np.asarray(f(t), dtype=float), np.shape(t)).copy()

    return custom_nodeless(*(wrap(f) for f in fns), sc.energy, Interval(sc.lo, sc.hi), name=f"phi={sc.phi}")[1]


def _seed(spec, kind: str, v: int):
    return (virtual_state if kind == "virtual" else overshoot_state)(spec, v)


def build(cfg: JobConfig):
    """Composition (or two-stage chain) described by ``cfg``."""
    settings = QuadSettings(rel_tol=cfg.numerics.quad_rel_tol)
    s0 = cfg.system0
    if s0.seed_kind == "custom":
        seed0 = _custom_seed(s0)
    else:
        seed0 = _seed(make_potential(s0.family, dict(s0.params)), s0.seed_kind, s0.v)
    sys1 = make_potential(cfg.system1.family, dict(cfg.system1.params))
    comp = compose(seed0, sys1, settings, n_knots=cfg.numerics.knots, faults=cfg.faults)
    if cfg.system2 is None:
        return comp
    s2 = cfg.system2
    seed1 = _seed(sys1, s2.seed1_kind, s2.seed1_v)
    sys2 = make_potential(s2.family, dict(s2.params))
    return iterate(comp, seed1, sys2, settings, n_knots=cfg.numerics.knots)


def grid_csv(cfg: JobConfig, comp) -> str:
    """CSV text: ``x, V_C, psi0, chi0, weight, phi_C_m...`` at 17 digits."""
    grid = sample_grid(comp, cfg.numerics.grid_n, cfg.numerics.margin, cfg.outputs.modes)
    names = ["x", *grid.names]
    cols = [grid.xs, *(grid.columns[n] for n in grid.names)]
    rows = [",".join(names)]
    for i in range(grid.xs.size):
        rows.append(",".join("%.17g" % float(c[i]) for c in cols))
    return "\n".join(rows) + "\n"


def _resolve(path: str | None, base: Path) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    return p if p.is_absolute() else base / p


def _emit(text: str, path: Path | None):
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_list(family: str | None = None, params: dict | None = None) -> str:
    """Catalog overview, or seed brackets for one parameter point."""
    if family is None:
        out = []
        for fam in Family:
            if fam is Family.CUSTOM:
                continue
            kinds = ", ".join(SEED_KINDS[fam]) or "none"
            out.append(f"{fam.value:18s} {FORMULAS[fam]}; {CONSTRAINTS[fam]}; seeds: {kinds}")
        return "\n".join(out)
    spec = make_potential(family, params or {})
    out = [f"{spec} on {spec.domain}"]
    n = spec.n_bound
    out.append(f"bound states: {'infinitely many' if math.isinf(n) else int(n)}")
    for kind in SEED_KINDS[spec.family]:
        br = seed_bracket(spec, kind)
        if br.empty:
            out.append(f"{kind} {br.describe()}")
        else:
            out.append(f"{kind} v in {br.describe()}")
    if not SEED_KINDS[spec.family]:
        out.append("no seeds (target system only)")
    return "\n".join(out)


def cmd_compose(config_path) -> int:
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = grid_csv(cfg, build(cfg))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PotComposeError as exc:
        print(f"construction failed ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    _emit(text, _resolve(cfg.outputs.csv_path, Path(config_path).parent))
    return EXIT_OK


def cmd_verify(config_path) -> int:
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        comp = build(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PotComposeError as exc:
        print(f"construction failed ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    n = cfg.numerics
    modes = cfg.outputs.modes or None
    report = full_report(
        comp, modes, n_points=max(16, n.grid_n), margin=n.margin,
        residual_tol=n.residual_tol, orth_tol=n.orth_tol,
    )
    text = report.text() + "\n\n" + report.rows() + "\n"
    path = _resolve(cfg.outputs.report_path, Path(config_path).parent)
    if path is not None:
        _emit(text, path)
    print(report.text())
    return EXIT_OK if report.overall else EXIT_VERIFY


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="potcompose",
        description="Compose exactly solvable 1-D Schroedinger potentials through nodeless seeds.",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    lp = sub.add_parser("list", help="show families, constraints and seed brackets")
    lp.add_argument("--family")
    for p in PARAM_NAMES:
        lp.add_argument(f"--{p}", type=float)
    for name, text in (("compose", "write the composed grid as CSV"),
                       ("verify", "run the verification suite")):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", required=True, help="job config file")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list":
        params = {p: getattr(args, p) for p in PARAM_NAMES if getattr(args, p) is not None}
        if params and args.family is None:
            print("config error: parameters need --family", file=sys.stderr)
            return EXIT_CONFIG
        try:
            print(cmd_list(args.family, params))
        except PotComposeError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK
    if args.command == "compose":
        return cmd_compose(args.config)
    return cmd_verify(args.config)


if __name__ == "__main__":
    sys.exit(main())
