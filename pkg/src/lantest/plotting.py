"""Minimal SVG rendering of power curves.

Output is a pure function of the curve, so identical runs produce
identical files.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

from .mc import PowerCurve

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=150, top=40, bottom=55)
COLORS = {"oracle": "#1b7837", "lse": "#b2182b", "sestimator": "#2166ac"}
MARKERS = {"oracle": "circle", "lse": "square", "sestimator": "diamond"}
Z_BAR = 1.96


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _marker(kind: str, x: float, y: float, color: str) -> str:
    r = 4.5
    if kind == "circle":
        return f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r}" fill="{color}"/>'
    if kind == "square":
        return (f'<rect x="{_fmt(x - r)}" y="{_fmt(y - r)}" width="{2 * r}" height="{2 * r}" '
                f'fill="{color}"/>')
    pts = f"{_fmt(x)},{_fmt(y - r - 1)} {_fmt(x + r + 1)},{_fmt(y)} " \
          f"{_fmt(x)},{_fmt(y + r + 1)} {_fmt(x - r - 1)},{_fmt(y)}"
    return f'<polygon points="{pts}" fill="{color}"/>'


def power_svg(curve: PowerCurve, title: str = "Empirical power") -> str:
    ns = curve.ns
    flavors = curve.flavors
    ref = "oracle" if "oracle" in flavors else flavors[0]
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    tops = [p.power + Z_BAR * p.mc_se for p in curve.points]
    tops += [max(p.theory_tau, p.theory_tau2) for p in curve.points]
    ymax = min(1.0, max(0.1, max(tops) * 1.15))

    # categorical x positions keep small grids like (30, 49, 52) readable
    def xpos(i: int) -> float:
        return x0 + (i + 0.5) * (x1 - x0) / len(ns)

    def ypos(v: float) -> float:
        return y0 - (v / ymax) * (y0 - y1)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">'
        f"{escape(title)}</text>",
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
    ]
    for k in range(6):
        v = ymax * k / 5
        yy = ypos(v)
        out.append(f'<line x1="{x0 - 4}" y1="{_fmt(yy)}" x2="{x0}" y2="{_fmt(yy)}" '
                   f'stroke="black"/>')
        out.append(f'<text x="{x0 - 8}" y="{_fmt(yy + 4)}" text-anchor="end">{v:.2f}</text>')
    for i, n in enumerate(ns):
        out.append(f'<text x="{_fmt(xpos(i))}" y="{y0 + 18}" text-anchor="middle">{n}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">'
               "sample size n</text>")
    out.append(f'<text x="18" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {(y0 + y1) / 2:.1f})">rejection rate</text>')

    for key, dash, label in (("theory_tau", "6,3", "1-Phi(z-tau)"),
                             ("theory_tau2", "2,3", "1-Phi(z-tau^2)")):
        pts = " ".join(f"{_fmt(xpos(i))},{_fmt(ypos(getattr(curve.get(n, ref), key)))}"
                       for i, n in enumerate(ns))
        out.append(f'<polyline points="{pts}" fill="none" stroke="#444" '
                   f'stroke-dasharray="{dash}"><title>{label}</title></polyline>')

    spread = min(18.0, 0.25 * (x1 - x0) / len(ns))
    for f_idx, fl in enumerate(flavors):
        color = COLORS.get(fl, "#666")
        dx = (f_idx - (len(flavors) - 1) / 2) * spread
        for i, n in enumerate(ns):
            p = curve.get(n, fl)
            cx = xpos(i) + dx
            lo = ypos(max(0.0, p.power - Z_BAR * p.mc_se))
            hi = ypos(min(1.0, p.power + Z_BAR * p.mc_se))
            out.append(f'<line x1="{_fmt(cx)}" y1="{_fmt(lo)}" x2="{_fmt(cx)}" y2="{_fmt(hi)}" '
                       f'stroke="{color}"/>')
            out.append(_marker(MARKERS.get(fl, "circle"), cx, ypos(p.power), color))

    lx = x1 + 15
    for k, fl in enumerate(flavors):
        ly = y1 + 10 + 20 * k
        out.append(_marker(MARKERS.get(fl, "circle"), lx + 6, ly - 4, COLORS.get(fl, "#666")))
        out.append(f'<text x="{lx + 18}" y="{ly}">{escape(fl)}</text>')
    for k, (dash, label) in enumerate((("6,3", "1-Φ(z-τ)"),
                                       ("2,3", "1-Φ(z-τ²)"))):
        ly = y1 + 10 + 20 * (len(flavors) + k)
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 14}" y2="{ly - 4}" stroke="#444" '
                   f'stroke-dasharray="{dash}"/>')
        out.append(f'<text x="{lx + 18}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
