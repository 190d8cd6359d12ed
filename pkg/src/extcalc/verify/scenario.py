"""Line-oriented scenario documents.

Top-level keys come before the first section header; sections are
``[metric]``, ``[connection]``, ``[fields]``, ``[chart_map]`` and
``[suites]``.  Indices in tables are 1-based.  Comments start with ``#``.
"""
import re
from dataclasses import dataclass, field

from .. import expr as E
from .. import multivector as mv
from ..expr import ParseError

SECTIONS = ("metric", "connection", "fields", "chart_map", "suites")
TOP_KEYS = ("name", "dim", "points", "seed", "tol_first", "tol_second", "flat", "fault", "description")

_INDEX = r"\[(\d+)\]"
RE_G = re.compile(rf"^g{_INDEX}{_INDEX}$")
RE_GAMMA = re.compile(rf"^gamma{_INDEX}{_INDEX}{_INDEX}$")
RE_CONTORSION = re.compile(rf"^K{_INDEX}\.coeff\(([^)]*)\)$")
RE_COEFF = re.compile(r"^([A-Za-z_]\w*)\.coeff\(([^)]*)\)$")
RE_TENSOR = re.compile(rf"^([A-Za-z_]\w*){_INDEX}{_INDEX}$")
RE_SCALAR = re.compile(r"^([A-Za-z_]\w*)$")
RE_CHART = re.compile(r"^x(\d+)'$")
RE_DOMAIN = re.compile(r"^domain\.x(\d+)$")


@dataclass
class Scenario:
    name: str
    dim: int
    box: list
    points: int = 64
    seed: int = 42
    tol_first: float = 1e-9
    tol_second: float = 1e-7
    flat: bool = False
    fault: str = None
    description: str = ""
    signature: tuple = None
    metric: dict = field(default_factory=dict)       # (i, j) -> Expr, upper triangle
    levi_civita: bool = False
    gamma: dict = field(default_factory=dict)        # (l, m, n) -> Expr
    geometric: bool = False
    contorsion: dict = field(default_factory=dict)   # mu -> {blade: Expr}
    fields: dict = field(default_factory=dict)       # name -> ("scalar", Expr) | ("mv", {blade: Expr}) | ("tensor", {(i, j): Expr})
    chart_map: dict = field(default_factory=dict)    # i -> Expr
    suites: list = field(default_factory=list)

    @property
    def has_metric(self):
        return bool(self.metric)

    @property
    def has_table(self):
        return bool(self.gamma)


def _bool(text, line, col):
    t = text.strip().lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise ParseError(f"expected true or false, got {text.strip()!r}", line, col)


def _int(text, line, col):
    try:
        return int(text.strip())
    except ValueError:
        raise ParseError(f"expected an integer, got {text.strip()!r}", line, col) from None


def _float(text, line, col):
    try:
        return float(text.strip())
    except ValueError:
        raise ParseError(f"expected a number, got {text.strip()!r}", line, col) from None


def _pair(text, line, col, kind=float):
    m = re.fullmatch(r"\s*\(\s*([^,]+?)\s*,\s*([^)]+?)\s*\)\s*", text)
    if not m:
        raise ParseError(f"expected a pair '(a, b)', got {text.strip()!r}", line, col)
    try:
        return kind(m.group(1)), kind(m.group(2))
    except ValueError:
        raise ParseError(f"bad pair entries in {text.strip()!r}", line, col) from None


def _index(i, n, what, line, col):
    i = int(i)
    if not 1 <= i <= n:
        raise ParseError(f"{what} index {i} out of range 1..{n}", line, col)
    return i - 1


def parse_scenario(text, source="<scenario>"):
    """Parse and validate a scenario document."""
    raw = []
    section = None
    top = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        s = stripped.strip()
        col0 = len(stripped) - len(stripped.lstrip()) + 1
        if s.startswith("["):
            m = re.fullmatch(r"\[\s*([A-Za-z_]+)\s*\]", s)
            if not m or m.group(1) not in SECTIONS:
                raise ParseError(f"unknown section header {s!r}", lineno, col0)
            section = m.group(1)
            continue
        if "=" not in s:
            raise ParseError("expected 'key = value'", lineno, col0)
        key, value = s.split("=", 1)
        vcol = col0 + len(key) + 1 + (len(value) - len(value.lstrip()))
        key = key.strip()
        if section is None:
            if key not in TOP_KEYS and not RE_DOMAIN.match(key):
                raise ParseError(f"unknown key {key!r}", lineno, col0)
            if key in top:
                raise ParseError(f"duplicate key {key!r}", lineno, col0)
            top[key] = (value.strip(), lineno, vcol)
        else:
            raw.append((section, key, value.strip(), lineno, col0, vcol))

    if "dim" not in top:
        raise ParseError("missing required key 'dim'", 1, 1)
    v, ln, c = top["dim"]
    dim = _int(v, ln, c)
    try:
        mv.check_dim(dim)
    except mv.DimensionError as err:
        raise ParseError(str(err), ln, c) from None

    box = [None] * dim
    for key, (v, ln, c) in top.items():
        m = RE_DOMAIN.match(key)
        if m:
            i = _index(m.group(1), dim, "domain", ln, c)
            lo, hi = _pair(v, ln, c)
            if not lo < hi:
                raise ParseError(f"empty domain interval for x{i + 1}", ln, c)
            box[i] = (lo, hi)
    for i, b in enumerate(box):
        if b is None:
            raise ParseError(f"missing domain.x{i + 1}", 1, 1)

    sc = Scenario(name=top.get("name", (source,))[0], dim=dim, box=box)
    if "points" in top:
        sc.points = _int(*top["points"])
        if sc.points < 1:
            raise ParseError("points must be positive", *top["points"][1:])
    if "seed" in top:
        sc.seed = _int(*top["seed"])
    if "tol_first" in top:
        sc.tol_first = _float(*top["tol_first"])
    if "tol_second" in top:
        sc.tol_second = _float(*top["tol_second"])
    if "flat" in top:
        sc.flat = _bool(*top["flat"])
    if "description" in top:
        sc.description = top["description"][0]
    fault_at = None
    if "fault" in top:
        sc.fault = top["fault"][0]
        fault_at = top["fault"][1:]

    for section, key, value, ln, c, vc in raw:
        expr = lambda: E.parse_expr(value, dim, ln, vc)
        if section == "metric":
            if key == "signature":
                sc.signature = _pair(value, ln, vc, int)
                continue
            m = RE_G.match(key)
            if not m:
                raise ParseError(f"unknown metric key {key!r}", ln, c)
            i = _index(m.group(1), dim, "metric", ln, c)
            j = _index(m.group(2), dim, "metric", ln, c)
            if (i, j) in sc.metric:
                raise ParseError(f"duplicate metric entry {key}", ln, c)
            sc.metric[(i, j)] = (expr(), ln, c)
        elif section == "connection":
            if key == "levi_civita":
                sc.levi_civita = _bool(value, ln, vc)
                continue
            if key == "geometric":
                sc.geometric = _bool(value, ln, vc)
                continue
            m = RE_GAMMA.match(key)
            if m:
                idx = tuple(_index(x, dim, "connection", ln, c) for x in m.groups())
                sc.gamma[idx] = expr()
                continue
            m = RE_CONTORSION.match(key)
            if m:
                mu = _index(m.group(1), dim, "contorsion", ln, c)
                blade = _blade(m.group(2), dim, ln, c)
                if mv.tables(dim).grades[blade] != 2:
                    raise ParseError("contorsion coefficients must be bivector blades", ln, c)
                sc.contorsion.setdefault(mu, {})[blade] = expr()
                continue
            raise ParseError(f"unknown connection key {key!r}", ln, c)
        elif section == "fields":
            _parse_field(sc, key, expr, ln, c)
        elif section == "chart_map":
            m = RE_CHART.match(key)
            if not m:
                raise ParseError(f"chart map keys look like x1', got {key!r}", ln, c)
            sc.chart_map[_index(m.group(1), dim, "chart map", ln, c)] = expr()
        elif section == "suites":
            if key != "run":
                raise ParseError(f"unknown suites key {key!r}", ln, c)
            names = [s.strip() for s in value.split(",") if s.strip()]
            if not names:
                raise ParseError("empty suite list", ln, vc)
            sc.suites.extend(names)

    _validate(sc, fault_at)
    return sc


def _blade(token, dim, ln, c):
    try:
        return mv.parse_blade(token, dim)
    except (ValueError, mv.DimensionError) as err:
        raise ParseError(str(err), ln, c) from None


def _parse_field(sc, key, expr, ln, c):
    m = RE_COEFF.match(key)
    if m:
        name, token = m.groups()
        kind = sc.fields.setdefault(name, ("mv", {}))
        if kind[0] != "mv":
            raise ParseError(f"field {name!r} already defined as {kind[0]}", ln, c)
        blade = _blade(token, sc.dim, ln, c)
        if blade in kind[1]:
            raise ParseError(f"duplicate coefficient {key}", ln, c)
        kind[1][blade] = expr()
        return
    m = RE_TENSOR.match(key)
    if m:
        name = m.group(1)
        i = _index(m.group(2), sc.dim, "extensor", ln, c)
        j = _index(m.group(3), sc.dim, "extensor", ln, c)
        kind = sc.fields.setdefault(name, ("tensor", {}))
        if kind[0] != "tensor":
            raise ParseError(f"field {name!r} already defined as {kind[0]}", ln, c)
        kind[1][(i, j)] = expr()
        return
    m = RE_SCALAR.match(key)
    if m:
        if key in sc.fields:
            raise ParseError(f"duplicate field {key!r}", ln, c)
        sc.fields[key] = ("scalar", expr())
        return
    raise ParseError(f"bad field key {key!r}", ln, c)


def _validate(sc, fault_at):
    from .suites import FIELD_KINDS, SUITES, VECTOR_NAMES, applicable

    n = sc.dim
    if sc.metric:
        for (i, j), (e, ln, c) in list(sc.metric.items()):
            if i > j:
                other = sc.metric.get((j, i))
                if other is None:
                    raise ParseError(f"metric entry g[{i + 1}][{j + 1}] has no g[{j + 1}][{i + 1}] partner; "
                                     "give the upper triangle", ln, c)
                if str(other[0]) != str(e):
                    raise ParseError(f"asymmetric metric: g[{j + 1}][{i + 1}] = {other[0]} but "
                                     f"g[{i + 1}][{j + 1}] = {e}", ln, c)
        if sc.signature is None:
            raise ParseError("a metric needs a declared signature = (p, q)", 1, 1)
        p, q = sc.signature
        if p + q != n or p < 0 or q < 0:
            raise ParseError(f"signature {sc.signature} does not match dim {n}", 1, 1)
    elif sc.signature is not None:
        raise ParseError("signature given without metric entries", 1, 1)
    if sc.levi_civita and sc.gamma:
        raise ParseError("give either levi_civita = true or a gamma table, not both", 1, 1)
    if sc.levi_civita and not sc.metric:
        raise ParseError("levi_civita = true needs a [metric] section", 1, 1)
    if sc.contorsion and not sc.metric:
        raise ParseError("contorsion needs a [metric] section", 1, 1)
    if sc.geometric and not sc.gamma:
        raise ParseError("geometric = true needs a gamma table", 1, 1)
    if sc.chart_map and len(sc.chart_map) != n:
        raise ParseError(f"chart map needs all {n} primed coordinates", 1, 1)
    for name, (kind, data) in sc.fields.items():
        want = FIELD_KINDS.get(name)
        if want is None:
            raise ParseError(f"unknown field name {name!r}; use one of {', '.join(FIELD_KINDS)}", 1, 1)
        if want != kind:
            raise ParseError(f"field {name!r} must be a {want} field, got {kind}", 1, 1)
        if name in VECTOR_NAMES:
            grades = mv.tables(n).grades
            if any(grades[blade] != 1 for blade in data):
                raise ParseError(f"field {name!r} must be a vector field (grade-1 blades only)", 1, 1)
    if not sc.suites:
        raise ParseError("no suites selected ([suites] run = ...)", 1, 1)
    if sc.suites == ["all"]:
        sc.suites = applicable(sc)
    if "flatness" in sc.suites and not sc.flat:
        raise ParseError("the flatness suite needs 'flat = true'", 1, 1)
    for s in sc.suites:
        if s not in SUITES:
            raise ParseError(f"unknown suite {s!r}", 1, 1)
    if len(set(sc.suites)) != len(sc.suites):
        raise ParseError("suite listed twice", 1, 1)
    if sc.fault is not None and sc.fault not in SUITES:
        raise ParseError(f"fault names unknown suite {sc.fault!r}", *(fault_at or (1, 1)))


def load_scenario(path):
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read(), source=str(path))
