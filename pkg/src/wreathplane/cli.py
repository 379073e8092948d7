"""Command-line front end.

    wreathplane classify FILE [--word-bound N] [--places real,padic(2)]
    wreathplane decide FILE
    wreathplane orbit FILE --point [x:y:z] [--word W] [--max-steps N]
    wreathplane nsd FILE --epsilon 1/4 [--samples N] [--word W] [--place P]
    wreathplane trajectory FILE --point [x:y:z] --steps N --format csv|svg [--output PATH]
    wreathplane check --suite NAME|all

Exit status: 0 for any verdict, 2 for bad input, 3 when an internal
invariant is violated.
"""
from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .dynamics import NSDError, nsd_constant
from .orbits import orbit_walk
from .pipeline import InvariantViolation, Scenario, classify_projection, decide_scenario
from .projgeo import ChordalContext, ProjMap, ProjPoint, chordal_distance, format_point, parse_point
from .report import classification_lines, final_lines, nsd_lines, orbit_lines, render
from .scalar import Place, QuadExt, parse_scalar
from .scenario import ScenarioError, load_scenario
from .spectral import Proximality, classify_proximality
from .suites import SUITES
from .words import Word, generator

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT = 0, 2, 3
SVG_SIZE = 800
BAND = 40  # width of the boundary band for points off the chart
DIST_DIGITS = 12


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _word(s: Scenario, text: Optional[str]) -> Word:
    if not s.names:
        raise InputError("scenario has no generators")
    if text is None:
        return generator(0)
    try:
        return Word.parse(text, s.names)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _point(s: Scenario, text: str) -> ProjPoint:
    try:
        p = parse_point(text, s.ambient.field)
        if p.dim != 2:
            raise ValueError("points of the plane need 3 coordinates")
        return s.ambient.coerce_point(p)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from None


def _places(text: Optional[str]):
    if text is None:
        return None
    try:
        return [Place.parse(p) for p in text.replace(" ", "").split(",") if p]
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _epsilon(text: str) -> Fraction:
    try:
        x = parse_scalar(text)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if not isinstance(x, Fraction) or not 0 < x < 1:
        raise InputError("--epsilon must be a rational in (0, 1)")
    return x


def _positive(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_classify(args, out) -> int:
    s = load_scenario(args.file)
    bound = args.word_bound if args.word_bound is not None else s.options.get("word_bound", 6)
    rep = classify_projection(s, bound, _places(args.places))
    out.write(render(classification_lines(s, rep)))
    return EXIT_OK


def cmd_decide(args, out) -> int:
    s = load_scenario(args.file)
    rep = decide_scenario(s, args.word_bound)
    out.write(render(final_lines(s, rep)))
    return EXIT_OK


def cmd_orbit(args, out) -> int:
    s = load_scenario(args.file)
    w = _word(s, args.word)
    p = _point(s, args.point)
    walk = orbit_walk(s.matrix(w), p, args.max_steps)
    out.write(render(orbit_lines(s, walk, s.fmt(w))))
    return EXIT_OK


def cmd_nsd(args, out) -> int:
    s = load_scenario(args.file)
    if s.ambient.is_finite:
        raise InputError("nsd needs a rational or quadratic plane")
    w = _word(s, args.word)
    eps = _epsilon(args.epsilon) if args.epsilon else s.options.get("epsilon")
    if eps is None:
        raise InputError("--epsilon is required (or set epsilon in [options])")
    place = _places(args.place)[0] if args.place else Place.real()
    seed = args.seed if args.seed is not None else s.options.get("seed", 0)
    try:
        res = nsd_constant(s.matrix(w), place, eps, args.samples, seed)
    except NSDError as exc:
        out.write(render([f"element: {s.fmt(w)}", f"place: {place}", f"error: {exc}"]))
        return EXIT_OK
    out.write(render(nsd_lines(res, s.fmt(w))))
    return EXIT_OK


def trajectory(h: ProjMap, p: ProjPoint, steps: int) -> list[ProjPoint]:
    pts = [p]
    for _ in range(steps):
        pts.append(h(pts[-1]))
    return pts


def _real_coords(x: ProjPoint) -> list[float]:
    """Float image under the embedding sqrt d > 0, scaled so the largest
    coordinate is 1 in absolute value (avoids overflow on long orbits)."""
    vals = [c.embed(1) if isinstance(c, QuadExt) else c for c in x.coords]
    top = max(abs(v) for v in vals)
    return [float(v / top) for v in vals]


def _distances(h: ProjMap, pts, ambient) -> list[str]:
    """Decimal chordal distance to p_plus at the real place, or 'none'."""
    if ambient.is_finite:
        return ["none"] * len(pts)
    res = classify_proximality(h, Place.real())
    if res.kind not in (Proximality.PROXIMAL, Proximality.VERY_PROXIMAL):
        return ["none"] * len(pts)
    ctx = ChordalContext(Place.real())
    return [f"{float(chordal_distance(x, res.p_plus, ctx)):.{DIST_DIGITS}f}" for x in pts]


def trajectory_csv(s: Scenario, h: ProjMap, pts) -> str:
    bare = s.ambient.is_finite
    rows = ["step,x1,x2,x3,dist_to_p_plus"]
    for i, (x, d) in enumerate(zip(pts, _distances(h, pts, s.ambient))):
        rows.append(",".join([str(i)] + [format_point(x, bare)[1:-1].replace(":", ",")] + [d]))
    return "\n".join(rows) + "\n"


def trajectory_svg(s: Scenario, h: ProjMap, pts) -> str:
    """Polyline in the chart x3 = 1; points with x3 = 0 sit on the boundary
    band in the direction (x1, x2)."""
    if s.ambient.is_finite:
        coords = [[float(c.value) for c in x.coords] for x in pts]
    else:
        coords = [_real_coords(x) for x in pts]
    on = [(c[0] / c[2], c[1] / c[2]) for c in coords if c[2] != 0]
    r = max([max(abs(a), abs(b)) for a, b in on] + [1.0])
    lo, hi = BAND, SVG_SIZE - BAND
    mid = SVG_SIZE / 2

    def place(c):
        if c[2] == 0:
            ang = math.atan2(c[1], c[0])
            rad = mid - BAND / 2
            return mid + rad * math.cos(ang), mid - rad * math.sin(ang), True
        a, b = c[0] / c[2], c[1] / c[2]
        return mid + a / r * (hi - lo) / 2, mid - b / r * (hi - lo) / 2, False

    placed = [place(c) for c in coords]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
             f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
             f'<rect x="0" y="0" width="{SVG_SIZE}" height="{SVG_SIZE}" fill="#eeeeee"/>',
             f'<rect x="{lo}" y="{lo}" width="{hi - lo}" height="{hi - lo}" fill="white" '
             f'stroke="#999999"/>',
             f'<text x="{lo}" y="{lo - 12}" font-size="12">chart x3 = 1, half-width {r:.6g}; '
             f'band: x3 = 0</text>']
    path = " ".join(f"{x:.3f},{y:.3f}" for x, y, _ in placed)
    parts.append(f'<polyline points="{path}" fill="none" stroke="#3366aa" stroke-width="1"/>')
    for i, (x, y, off) in enumerate(placed):
        colour = "#cc3333" if off else "#3366aa"
        parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" fill="{colour}">'
                     f'<title>{i}: {format_point(pts[i], s.ambient.is_finite)}</title></circle>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_trajectory(args, out) -> int:
    s = load_scenario(args.file)
    w = _word(s, args.word)
    h = s.matrix(w)
    pts = trajectory(h, _point(s, args.point), args.steps)
    text = trajectory_csv(s, h, pts) if args.format == "csv" else trajectory_svg(s, h, pts)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_check(args, out) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    seed = args.seed if args.seed is not None else 0
    status = EXIT_OK
    for name in names:
        res = SUITES[name](seed)
        out.write(res.line() + "\n")
        if not res.passed:
            status = EXIT_INVARIANT
    return status


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wreathplane",
                                description="Fixed points of wreath actions on restricted "
                                            "products over projective planes.")
    p.add_argument("--seed", type=_positive, default=None, help="sampling seed (default 0)")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify the projection to PGL3")
    c.add_argument("file")
    c.add_argument("--word-bound", type=_positive)
    c.add_argument("--places", help="comma separated, e.g. real,padic(2)")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("decide", help="find a fixed point or a certificate against one")
    c.add_argument("file")
    c.add_argument("--word-bound", type=_positive)
    c.set_defaults(func=cmd_decide)

    c = sub.add_parser("orbit", help="orbit of a point under a word's projection")
    c.add_argument("file")
    c.add_argument("--point", required=True)
    c.add_argument("--word", "--generator", dest="word")
    c.add_argument("--max-steps", type=_positive)
    c.set_defaults(func=cmd_orbit)

    c = sub.add_parser("nsd", help="north-south dynamics constant")
    c.add_argument("file")
    c.add_argument("--epsilon")
    c.add_argument("--samples", type=_positive, default=10000)
    c.add_argument("--word", "--generator", dest="word")
    c.add_argument("--place")
    c.set_defaults(func=cmd_nsd)

    c = sub.add_parser("trajectory", help="emit a trajectory as CSV or SVG")
    c.add_argument("file")
    c.add_argument("--point", required=True)
    c.add_argument("--steps", type=_positive, required=True)
    c.add_argument("--format", choices=("csv", "svg"), default="csv")
    c.add_argument("--word", "--generator", dest="word")
    c.add_argument("--output")
    c.set_defaults(func=cmd_trajectory)

    c = sub.add_parser("check", help="run property suites")
    c.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    c.set_defaults(func=cmd_check)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (ScenarioError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
