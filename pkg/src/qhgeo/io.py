"""Flat key-value configuration, CSV and SVG emitters, and plain-text reports."""

import configparser
import csv
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import InputError
from .balls import BallTrace, CheckReport, Violation, Witness
from .domains import ConvexPolytope, HalfSpace, Polygon, PuncturedSpace, rectangle_union
from .geodesic import SolverParams
from .norms import NormSpec
from .paths import MetricKind, Polyline

_SECTION = "config"


# --- configuration ------------------------------------------------------------


def _floats(text, key):
    parts = text.replace(",", " ").split()
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise InputError(f"{key}: expected numbers, got {text!r}") from None


@dataclass
class ExperimentConfig:
    """Raw ``key = value`` pairs plus typed accessors.

    Points are written as ``x0 x1`` (commas allowed), point lists are
    separated by ``;``.
    """

    values: dict = field(default_factory=dict)
    source: str = "<memory>"

    @property
    def experiment(self):
        return self.get("experiment", "")

    @property
    def seed(self):
        return self.get_seed()

    def get(self, key, default=None):
        return self.values.get(key, default)

    def require(self, key):
        if key not in self.values:
            raise InputError(f"{self.source}: missing required key {key!r}")
        return self.values[key]

    def get_float(self, key, default=None):
        raw = self.values.get(key)
        if raw is None:
            return default
        vals = _floats(raw, key)
        if len(vals) != 1:
            raise InputError(f"{key}: expected a single number")
        return vals[0]

    def get_positive(self, key, default=None):
        v = self.get_float(key, default)
        if v is not None and not v > 0:
            raise InputError(f"{key} must be positive, got {v}")
        return v

    def get_int(self, key, default=None):
        v = self.get_float(key, None)
        if v is None:
            return default
        if v != int(v):
            raise InputError(f"{key}: expected an integer, got {v}")
        return int(v)

    def get_seed(self):
        # parsed as an exact integer; a float would round values near 2**64
        raw = self.values.get("seed", "0").strip()
        try:
            s = int(raw)
        except ValueError:
            raise InputError(f"seed: expected an integer, got {raw!r}") from None
        if not 0 <= s < 2**64:
            raise InputError("seed must be an unsigned 64-bit integer")
        return s

    def get_floats(self, key, default=None):
        raw = self.values.get(key)
        return default if raw is None else _floats(raw, key)

    def get_point(self, key, default=None):
        raw = self.values.get(key)
        if raw is None:
            if default is None:
                raise InputError(f"{self.source}: missing required point {key!r}")
            return np.asarray(default, dtype=float)
        return np.array(_floats(raw, key))

    def get_points(self, key):
        raw = self.require(key)
        rows = [_floats(chunk, key) for chunk in raw.split(";") if chunk.strip()]
        if not rows or len({len(r) for r in rows}) != 1:
            raise InputError(f"{key}: expected ';'-separated points of equal dimension")
        return np.array(rows)

    def norm(self):
        raw = self.get("norm", "2").strip().lower()
        p = math.inf if raw in ("inf", "infinity") else self.get_float("norm", 2.0)
        weights = self.get_floats("weights")
        dim = self.get_int("dim", len(weights) if weights else 2)
        return NormSpec(p, dim, None if weights is None else tuple(weights))

    def domain(self):
        kind = self.get("domain", "").strip().lower()
        if kind == "halfspace":
            return HalfSpace(self.get_floats("normal", [0.0, 1.0]), self.get_float("offset", 0.0))
        if kind == "punctured":
            return PuncturedSpace(self.get_points("punctures"))
        if kind == "polytope":
            # each face "a_1 ... a_n b" describes a . x + b < 0
            rows = self.get_points("faces")
            return ConvexPolytope([(r[:-1], r[-1]) for r in rows])
        if kind == "polygon":
            return Polygon(self.get_points("vertices"))
        if kind == "lshape":
            rects = self.get_points("rectangles")
            if rects.shape != (2, 4):
                raise InputError("rectangles: expected two rows 'x0 y0 x1 y1'")
            return rectangle_union([tuple(r) for r in rects])
        raise InputError(f"domain must be one of halfspace, punctured, polytope, polygon, lshape; got {kind!r}")

    def metric(self):
        return MetricKind.parse(self.get("metric", "k"))

    def solver_params(self):
        base = SolverParams()
        return SolverParams(
            grid_spacing=self.get_positive("grid_spacing", base.grid_spacing),
            grid_margin=self.get_positive("grid_margin", base.grid_margin),
            neighbor_stencil=self.get_int("neighbor_stencil", base.neighbor_stencil),
            refine_rounds=self.get_int("refine_rounds", base.refine_rounds),
            refine_step=self.get_positive("refine_step", base.refine_step),
            quad_tol=self.get_positive("quad_tol", base.quad_tol),
        )

    def viewport(self):
        v = self.get_floats("viewport")
        if v is None:
            return None
        if len(v) != 4 or not (v[2] > v[0] and v[3] > v[1]):
            raise InputError("viewport: expected 'xmin ymin xmax ymax' with positive extent")
        return tuple(v)


def parse_config(text, source="<memory>"):
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#",), inline_comment_prefixes=("#",), delimiters=("=",)
    )
    try:
        parser.read_string(f"[{_SECTION}]\n" + text, source=source)
    except configparser.Error as exc:
        raise InputError(f"{source}: {exc}") from None
    values = {k: v.strip() for k, v in parser[_SECTION].items()}
    cfg = ExperimentConfig(values, source)
    cfg.get_seed()
    for key in ("tol", "quad_tol", "grid_spacing", "refine_step"):
        cfg.get_positive(key)
    return cfg


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path))


# --- CSV --------------------------------------------------------------------


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)



def _rows(obj):
    # (header, rows) for each supported object
    if isinstance(obj, BallTrace):
        n = len(obj.center)
        header = ["angle", "t_star"] + [f"x{i}" for i in range(n)] + ["clipped"]
        rows = [
            [a, c.t_star, *c.point, c.clipped] for a, c in zip(obj.angles, obj.rays)
        ]
        return header, rows
    if isinstance(obj, Polyline):
        header = [f"x{i}" for i in range(obj.dim)]
        return header, [list(v) for v in obj.vertices]
    if isinstance(obj, CheckReport):
        obj = obj.violations
    if isinstance(obj, (list, tuple)) and all(isinstance(v, (Violation, Witness)) for v in obj):
        n = 2 if not obj else len(obj[0].point)
        header = (
            [f"center{i}" for i in range(n)]
            + [f"y{i}" for i in range(n)]
            + [f"z{i}" for i in range(n)]
            + ["s"]
            + [f"point{i}" for i in range(n)]
            + ["distance", "radius", "excess"]
        )
        rows = [[*v.center, *v.y, *v.z, v.s, *v.point, v.distance, v.radius, v.excess] for v in obj]
        return header, rows
    if hasattr(obj, "quantities") and hasattr(obj, "verdicts"):
        return ["quantity", "value"], [[k, v] for k, v in obj.quantities.items()]
    raise InputError(f"cannot write {type(obj).__name__} as CSV")


def emit_csv(obj, destination):
    """Write a trace, polyline, violation list or report as CSV with a header row.

    Floats use ``repr`` so values round-trip exactly.
    """
    header, rows = _rows(obj)
    with open(destination, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(v) for v in r])
    return Path(destination)


# --- SVG ----------------------------------------------------------------------

PALETTE = {
    "domain": "#e8eef6",
    "boundary": "#4a6fa5",
    "ball": "#c0392b",
    "path": "#2c3e50",
    "extra": "#7f8c8d",
    "point": "#000000",
}


def clip_polygon(poly, a, b):
    """Sutherland-Hodgman clip of ``poly`` to ``{x : a . x + b <= 0}``."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp, fq = float(np.dot(a, p) + b), float(np.dot(a, q) + b)
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            out.append(p + fp / (fp - fq) * (q - p))
    return out


def _box(view):
    x0, y0, x1, y1 = view
    return [np.array(v, float) for v in ((x0, y0), (x1, y0), (x1, y1), (x0, y1))]


def _fmt(x, y):
    # adding 0.0 turns -0.0 into 0.0
    return f"{x + 0.0:.6g},{-y + 0.0:.6g}"


def _bounds(domain, traces, paths, points):
    pts = []
    for t in traces:
        pts.append(t.points)
    for p in paths:
        pts.append(p.vertices)
    pts.extend(np.atleast_2d(v) for v in points)
    if isinstance(domain, Polygon):
        pts.append(domain.vertices)
    if isinstance(domain, PuncturedSpace):
        pts.append(domain.punctures)
    if not pts:
        return (0.0, 0.0, 1.0, 1.0)
    allp = np.vstack(pts)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    pad = 0.1 * max(float(np.max(hi - lo)), 1e-9)
    return (lo[0] - pad, lo[1] - pad, hi[0] + pad, hi[1] + pad)


def emit_svg(destination, domain=None, traces=(), paths=None, points=None, extra_paths=(), viewport=None, width=600):
    """Render a planar scene as SVG 1.1.

    ``paths`` and ``points`` map labels to polylines and points; those
    elements carry a ``data-label`` attribute. ``extra_paths`` are drawn
    without labels. The y axis points up.
    """
    paths = dict(paths or {})
    points = {k: np.asarray(v, float) for k, v in (points or {}).items()}
    view = viewport or _bounds(domain, traces, list(paths.values()) + list(extra_paths), list(points.values()))
    x0, y0, x1, y1 = view
    w, h = x1 - x0, y1 - y0
    svg = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "version": "1.1",
            "width": str(width),
            "height": f"{width * h / w:.6g}",
            "viewBox": f"{x0:.6g} {-y1:.6g} {w:.6g} {h:.6g}",
        },
    )
    stroke = {"vector-effect": "non-scaling-stroke", "stroke-width": "1.5", "fill": "none"}
    if domain is not None:
        g = ET.SubElement(svg, "g", {"class": "domain"})
        region = None
        if isinstance(domain, ConvexPolytope):
            region = _box(view)
            for a, b in zip(domain.A, domain.b):
                region = clip_polygon(region, a, b)
        elif isinstance(domain, Polygon):
            region = list(domain.vertices)
        if region:
            ET.SubElement(
                g,
                "polygon",
                {
                    "points": " ".join(_fmt(*p) for p in region),
                    "fill": PALETTE["domain"],
                    "stroke": PALETTE["boundary"],
                    "vector-effect": "non-scaling-stroke",
                    "stroke-width": "1.5",
                },
            )
        if isinstance(domain, PuncturedSpace):
            for z in domain.punctures:
                ET.SubElement(
                    g,
                    "circle",
                    {"cx": f"{z[0]:.6g}", "cy": f"{-z[1]:.6g}", "r": f"{0.008 * w:.6g}", "fill": PALETTE["boundary"]},
                )
    for t in traces:
        ET.SubElement(
            svg,
            "polygon",
            {"class": "ball", "points": " ".join(_fmt(*p) for p in t.points), "stroke": PALETTE["ball"], **stroke},
        )
    for p in extra_paths:
        ET.SubElement(
            svg,
            "polyline",
            {
                "class": "path",
                "points": " ".join(_fmt(*v) for v in p.vertices),
                "stroke": PALETTE["extra"],
                "stroke-dasharray": "4 3",
                **stroke,
            },
        )
    for label, p in paths.items():
        ET.SubElement(
            svg,
            "polyline",
            {
                "data-label": label,
                "points": " ".join(_fmt(*v) for v in p.vertices),
                "stroke": PALETTE["path"],
                **stroke,
            },
        )
    for label, v in points.items():
        ET.SubElement(
            svg,
            "circle",
            {"data-label": label, "cx": f"{v[0]:.6g}", "cy": f"{-v[1]:.6g}", "r": f"{0.01 * w:.6g}", "fill": PALETTE["point"]},
        )
        txt = ET.SubElement(
            svg,
            "text",
            {"x": f"{v[0] + 0.015 * w:.6g}", "y": f"{-v[1] - 0.015 * w:.6g}", "font-size": f"{0.04 * w:.6g}"},
        )
        txt.text = label
    tree = ET.ElementTree(svg)
    ET.indent(tree)
    tree.write(destination, encoding="utf-8", xml_declaration=True)
    return Path(destination)


# --- text report ----------------------------------------------------------------


def _text_value(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.ndarray):
        return " ".join(_text_value(x) for x in v.ravel())
    if isinstance(v, (list, tuple)):
        return " ".join(_text_value(x) for x in v)
    return str(v)


def report_text(report):
    """``key: value`` lines for inputs, quantities, verdicts and scalar notes."""
    lines = [f"experiment: {report.experiment}"]
    lines += [f"input.{k}: {_text_value(v)}" for k, v in report.inputs.items()]
    lines += [f"quantity.{k}: {_text_value(v)}" for k, v in report.quantities.items()]
    for v in report.verdicts:
        state = "pass" if v.passed else "fail"
        lines.append(f"verdict.{v.name}: {state} ({v.quantity} = {v.value!r} {v.relation} {v.threshold!r})")
    for k, v in report.notes.items():
        if isinstance(v, (str, int, float, np.floating, np.integer)):
            lines.append(f"note.{k}: {_text_value(v)}")
    lines.append(f"witnesses: {len(report.witnesses)}")
    lines.append(f"passed: {'true' if report.passed else 'false'}")
    return "\n".join(lines) + "\n"


def write_report(report, destination):
    Path(destination).write_text(report_text(report), encoding="utf-8")
    return Path(destination)
