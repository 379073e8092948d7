"""Line-oriented report format: ``key: value`` lines in a fixed order, exact
scalar literals, no timestamps.  ``reverify`` re-checks a serialized
witness against its scenario from the report text alone.
"""
from __future__ import annotations

from typing import Iterable

from .bireg import Certified, NoFixedPoint, build_fixed_point, persistent_fibre
from .dynamics import NSDResult
from .orbits import OrbitWalk
from .pipeline import (
    ClassificationReport, ClassInconclusive, CommonFixedPoint, DecideInconclusive, FinalReport,
    FixedPointFound, NilpotentCertificate, NotPurelyElliptic, Scenario, SolvablePath,
    VeryProximalWitness,
)
from .projgeo import format_line, format_matrix, format_point, parse_point
from .resprod import Config
from .scalar import Place, format_scalar
from .spectral import Proximality, classify_proximality
from .words import Word


def _config_text(s: Scenario, z: Config) -> str:
    if not z.support:
        return "basepoint"
    bare = s.ambient.is_finite
    return "; ".join(f"{format_point(p, bare)}->{s.space.label(v)}" for p, v in z.items())


def parse_config_text(s: Scenario, text: str) -> Config:
    text = text.strip()
    if text == "basepoint":
        return Config.basepoint(s.space, s.ambient)
    vals = {}
    for part in text.split(";"):
        pt, _, label = part.partition("->")
        p = s.ambient.coerce_point(parse_point(pt, s.ambient.field))
        vals[p] = s.space.index(label.strip())
    return Config(s.space, s.ambient, vals)


def classification_lines(s: Scenario, rep: ClassificationReport) -> list[str]:
    out = rep.outcome
    bare = s.ambient.is_finite
    lines = [f"classification: {out.kind}"]
    if isinstance(out, VeryProximalWitness):
        a = out.attractor
        lines += [f"word: {s.fmt(out.word)}", f"place: {out.place}",
                  f"lambda_plus: {format_scalar(a.lambda_plus)}",
                  f"lambda_mid: {format_scalar(a.lambda_mid)}",
                  f"lambda_minus: {format_scalar(a.lambda_minus)}",
                  f"p_plus: {format_point(a.p_plus)}", f"p_mid: {format_point(a.p_mid)}",
                  f"p_minus: {format_point(a.p_minus)}",
                  f"P_plus: {format_line(a.P_plus)}", f"P_minus: {format_line(a.P_minus)}"]
    elif isinstance(out, CommonFixedPoint):
        lines.append(f"point: {format_point(out.point, bare)}")
    elif isinstance(out, SolvablePath):
        lines.append(f"invariant_line: {format_line(out.line, bare)}")
        for name, aff in zip(s.names, out.affine):
            lines.append(f"affine {name}: linear {format_matrix(aff.linear)} "
                         f"translation ({', '.join(format_scalar(x) for x in aff.translation)})")
        w = out.witness
        lines += [f"sl2_word: {s.fmt(w.word)}", f"sl2_place: {w.place}",
                  f"sl2_eigenvalue: {format_scalar(w.eigenvalue)}",
                  f"sl2_squared: {'yes' if w.squared else 'no'}"]
    elif isinstance(out, NilpotentCertificate):
        for w, cert in out.certificates:
            lines.append(f"roots_of_unity {s.fmt(w)}: {cert}")
        lines.append(f"checked_words: all of length <= {out.word_bound}")
    elif isinstance(out, ClassInconclusive):
        lines.append(f"reason: {out.reason}")
    lines.append(f"word_bound: {rep.word_bound}")
    lines.append("places: " + (", ".join(str(p) for p in rep.places) or "none"))
    return lines


def final_lines(s: Scenario, rep: FinalReport) -> list[str]:
    out = rep.outcome
    lines = [f"verdict: {out.verdict}"]
    if isinstance(out, FixedPointFound):
        lines += [f"method: {out.method}", f"config: {_config_text(s, out.config)}",
                  f"verified: {'yes' if out.verified else 'no'}"]
    elif isinstance(out, NotPurelyElliptic):
        lines += [f"word: {s.fmt(out.word)}", f"certificate: {out.certificate}"]
        if out.point is not None:
            lines += [f"fibre_point: {format_point(out.point, s.ambient.is_finite)}",
                      f"reference: {_config_text(s, out.reference)}"]
        lines.append(f"symmetry_substitution: {'yes' if out.used_symmetry else 'no'}")
    elif isinstance(out, DecideInconclusive):
        lines += [f"reason: {out.reason}", f"bounds: {out.bounds}"]
    lines += [f"note: {n}" for n in rep.notes]
    lines += classification_lines(s, rep.classification)
    return lines


def orbit_lines(s: Scenario, walk: OrbitWalk, label: str) -> list[str]:
    bare = s.ambient.is_finite
    lines = [f"element: {label}", f"start: {format_point(walk.start, bare)}",
             f"status: {walk.status}"]
    for i, p in enumerate(walk.points):
        lines.append(f"{i}: {format_point(p, bare)}")
    return lines


def nsd_lines(res: NSDResult, label: str) -> list[str]:
    lines = [f"element: {label}", f"place: {res.place}",
             f"epsilon: {format_scalar(res.epsilon)}",
             f"N: {res.N if res.N is not None else 'none'}",
             "neighbourhood: dual pairing |<n, x>| / (|n| |x|)",
             f"forward_samples: {res.forward_samples}",
             f"backward_samples: {res.backward_samples}",
             f"confirmed_window: {res.window}"]
    if res.failure is not None:
        lines += [f"failure_sample: {format_point(res.failure)}",
                  f"failure_direction: {res.failure_direction}"]
    return lines


def render(lines: Iterable[str]) -> str:
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict:
    """First occurrence of every key (values are stripped strings)."""
    out: dict = {}
    for line in text.splitlines():
        key, sep, val = line.partition(": ")
        if sep and key not in out:
            out[key] = val.strip()
    return out


def reverify(s: Scenario, text: str) -> bool:
    """Re-check the witness recorded in a classify or decide report."""
    kv = parse_report(text)
    names = s.names
    if kv.get("verdict") == "FixedPointFound":
        z = parse_config_text(s, kv["config"])
        return s.is_fixed(z)
    if kv.get("verdict") == "NotPurelyElliptic":
        elem = s.element(Word.parse(kv["word"], names))
        if "fibre_point" in kv:
            p = s.ambient.coerce_point(parse_point(kv["fibre_point"], s.ambient.field))
            z = parse_config_text(s, kv["reference"])
            return isinstance(persistent_fibre(elem, p, z), Certified)
        if s.ambient.is_finite:
            from .finite import element_has_fixed_point
            return not element_has_fixed_point(elem, s.ambient.points())
        return isinstance(build_fixed_point(elem), NoFixedPoint)
    if kv.get("classification") == "VeryProximalWitness":
        m = s.matrix(Word.parse(kv["word"], names))
        res = classify_proximality(m, Place.parse(kv["place"]))
        return res.kind is Proximality.VERY_PROXIMAL and \
            format_point(res.attractor.p_plus) == kv["p_plus"] and \
            format_point(res.attractor.p_minus) == kv["p_minus"]
    return False
