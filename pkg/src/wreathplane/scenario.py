"""Scenario files: parsing with line/column diagnostics and canonical printing.

    [based_space]
    elements = a b c
    basepoint = a
    generators = (a b); (b c)

    [ambient]
    plane = gf 3

    [gamma]
    t = [[1,1,0],[0,1,0],[0,0,1]]
    t at [1:0:1] -> (a b)

    [options]
    word_bound = 4

The grammar is in docs/scenario-grammar.md.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction

from .pipeline import Scenario
from .projgeo import ProjMap, format_matrix, format_point, parse_matrix, parse_point
from .resprod import Ambient, BasedSpace, WreathElement
from .scalar import FFElem, QuadExt, parse_scalar, format_scalar

SECTIONS = ("based_space", "ambient", "gamma", "options")
INT_OPTIONS = ("word_bound", "seed", "closure_cap", "adjust_word_bound",
               "counter_word_bound", "template_exponent")
RATIONAL_OPTIONS = ("epsilon",)
NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line, self.column = line, column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


def _col(raw: str, fragment: str) -> int:
    i = raw.find(fragment)
    return i + 1 if i >= 0 else 1


def _split_gens(text: str) -> list[str]:
    return [p.strip() for p in text.split(";") if p.strip()]


def parse_scenario(text: str) -> Scenario:
    sections: dict[str, list] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = re.fullmatch(r"\s*\[([^\[\]]+)\]\s*", line)
        if m and "=" not in line:
            name = m.group(1).strip()
            if name not in SECTIONS:
                raise ScenarioError(f"unknown section [{name}]", lineno, _col(raw, "["))
            if name in sections:
                raise ScenarioError(f"duplicate section [{name}]", lineno, _col(raw, "["))
            sections[name] = []
            current = name
            continue
        if current is None:
            raise ScenarioError("entry outside of a section", lineno, 1)
        sections[current].append((lineno, raw, line.strip()))
    for req in ("based_space", "ambient", "gamma"):
        if req not in sections:
            raise ScenarioError(f"missing section [{req}]")
    space = _parse_space(sections["based_space"])
    ambient = _parse_ambient(sections["ambient"])
    gens = _parse_gamma(sections["gamma"], space, ambient)
    options = _parse_options(sections.get("options", []))
    return Scenario(space, ambient, gens, options)


def _key_values(entries, allowed) -> dict:
    out = {}
    for lineno, raw, line in entries:
        key, eq, val = line.partition("=")
        key = key.strip()
        if not eq:
            raise ScenarioError("expected 'key = value'", lineno, 1)
        if key not in allowed:
            raise ScenarioError(f"unknown key {key!r}", lineno, _col(raw, key))
        if key in out:
            raise ScenarioError(f"duplicate key {key!r}", lineno, _col(raw, key))
        out[key] = (val.strip(), lineno, raw)
    return out


def _parse_space(entries) -> BasedSpace:
    kv = _key_values(entries, ("elements", "basepoint", "generators"))
    for req in ("elements", "basepoint"):
        if req not in kv:
            raise ScenarioError(f"[based_space] needs {req!r}")
    elems = tuple(kv["elements"][0].split())
    base = kv["basepoint"][0]
    try:
        space = BasedSpace(elems, base)
        gens = ()
        if "generators" in kv:
            val, lineno, raw = kv["generators"]
            perms = []
            for part in _split_gens(val):
                try:
                    perms.append(space.parse_perm(part))
                except ValueError as exc:
                    raise ScenarioError(str(exc), lineno, _col(raw, part)) from None
            gens = tuple(perms)
        return BasedSpace(elems, base, gens)
    except ScenarioError:
        raise
    except ValueError as exc:
        lineno = kv["elements"][1]
        raise ScenarioError(str(exc), lineno, 1) from None


def _parse_ambient(entries) -> Ambient:
    kv = _key_values(entries, ("plane",))
    if "plane" not in kv:
        raise ScenarioError("[ambient] needs 'plane'")
    val, lineno, raw = kv["plane"]
    parts = val.split()
    try:
        if parts == ["rational"]:
            return Ambient.rational()
        if len(parts) == 2 and parts[0] == "gf":
            return Ambient.gf(int(parts[1]))
        if len(parts) == 2 and parts[0] == "quadratic":
            return Ambient.quadratic(int(parts[1]))
    except ValueError as exc:
        raise ScenarioError(str(exc), lineno, _col(raw, val)) from None
    raise ScenarioError(f"bad plane {val!r} (gf q | rational | quadratic d)",
                        lineno, _col(raw, val))


_AT_RE = re.compile(r"(?P<name>\S+)\s+at\s+(?P<pt>\[[^\]]*\])\s*->\s*(?P<perm>.+)")


def _parse_gamma(entries, space: BasedSpace, ambient: Ambient) -> list:
    field = ambient.field
    mats: dict = {}
    order: list = []
    cofs: dict = {}
    for lineno, raw, line in entries:
        m = _AT_RE.fullmatch(line)
        if m:
            name = m.group("name")
            if name not in mats:
                raise ScenarioError(f"cofactor for undeclared generator {name!r}",
                                    lineno, _col(raw, name))
            try:
                pt = ambient.coerce_point(parse_point(m.group("pt"), field))
            except (ValueError, ZeroDivisionError) as exc:
                raise ScenarioError(str(exc), lineno, _col(raw, m.group("pt"))) from None
            try:
                g = space.parse_perm(m.group("perm"))
            except ValueError as exc:
                raise ScenarioError(str(exc), lineno, _col(raw, m.group("perm"))) from None
            if pt in cofs[name]:
                raise ScenarioError(f"second cofactor for {name} at {format_point(pt)}",
                                    lineno, _col(raw, m.group("pt")))
            cofs[name][pt] = g
            continue
        name, eq, val = line.partition("=")
        name = name.strip()
        if not eq:
            raise ScenarioError("expected 'name = matrix' or 'name at [point] -> perm'", lineno, 1)
        if not NAME_RE.fullmatch(name):
            raise ScenarioError(f"bad generator name {name!r}", lineno, _col(raw, name))
        if name in mats:
            raise ScenarioError(f"generator {name!r} declared twice", lineno, _col(raw, name))
        try:
            mat = parse_matrix(val, field)
            if mat.n != 3:
                raise ValueError("generator matrices must be 3x3")
            mats[name] = ambient.coerce_map(mat)
        except (ValueError, ZeroDivisionError) as exc:
            raise ScenarioError(str(exc), lineno, _col(raw, val.strip())) from None
        order.append((name, lineno))
        cofs[name] = {}
    out = []
    for name, lineno in order:
        try:
            out.append((name, WreathElement(space, ambient, mats[name], cofs[name])))
        except ValueError as exc:
            raise ScenarioError(f"{name}: {exc}", lineno, 1) from None
    return out


def _parse_options(entries) -> dict:
    kv = _key_values(entries, INT_OPTIONS + RATIONAL_OPTIONS)
    out = {}
    for key, (val, lineno, raw) in kv.items():
        try:
            if key in INT_OPTIONS:
                if not re.fullmatch(r"\d+", val):
                    raise ValueError(f"{key} must be a non-negative integer")
                out[key] = int(val)
            else:
                x = parse_scalar(val)
                if not isinstance(x, Fraction):
                    raise ValueError(f"{key} must be rational")
                out[key] = x
        except ValueError as exc:
            raise ScenarioError(str(exc), lineno, _col(raw, val)) from None
    return out


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

def display_matrix(m: ProjMap) -> list:
    """Rational matrices as the primitive integer representative with a
    positive first nonzero entry; other fields keep the normalized form."""
    rows = m.matrix
    flat = [x for r in rows for x in r]
    if any(isinstance(x, (FFElem, QuadExt)) for x in flat):
        return [list(r) for r in rows]
    den = 1
    for x in flat:
        d = Fraction(x).denominator
        den = den * d // math.gcd(den, d)
    ints = [[int(Fraction(x) * den) for x in r] for r in rows]
    g = 0
    for r in ints:
        for x in r:
            g = math.gcd(g, x)
    first = next(x for r in ints for x in r if x)
    g = g if first > 0 else -g
    return [[Fraction(x // g) for x in r] for r in ints]


def format_scenario(s: Scenario) -> str:
    bare = s.ambient.is_finite
    lines = ["[based_space]",
             "elements = " + " ".join(s.space.elements),
             "basepoint = " + s.space.basepoint]
    if s.space.generators:
        lines.append("generators = " + "; ".join(s.space.format_perm(g) for g in s.space.generators))
    lines += ["", "[ambient]", f"plane = {s.ambient}", "", "[gamma]"]
    for name, w in s.generators:
        lines.append(f"{name} = {format_matrix(display_matrix(w.h), bare)}")
        for p, g in w.items():
            lines.append(f"{name} at {format_point(p, bare)} -> {s.space.format_perm(g)}")
    if s.options:
        lines += ["", "[options]"]
        for key in INT_OPTIONS + RATIONAL_OPTIONS:
            if key in s.options:
                v = s.options[key]
                lines.append(f"{key} = {format_scalar(v) if isinstance(v, Fraction) else v}")
    return "\n".join(lines) + "\n"


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())
