"""Dependency-free SVG line charts for sweep results."""

from __future__ import annotations

from collections import defaultdict
from xml.sax.saxutils import escape

PANEL_W, PANEL_H = 360, 260
MARGIN = dict(left=56, right=16, top=30, bottom=40)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
DASHES = ("", "6,3", "2,2", "8,3,2,3")


def _panel(x0, y0, title, series, xlim, ylim, ylabel):
    """series: list of (label, color, dash, [(x, y), ...])."""
    left, top = x0 + MARGIN["left"], y0 + MARGIN["top"]
    w = PANEL_W - MARGIN["left"] - MARGIN["right"]
    h = PANEL_H - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return left + (x - xlim[0]) / (xlim[1] - xlim[0]) * w

    def sy(y):
        y = min(max(y, ylim[0]), ylim[1])
        return top + h - (y - ylim[0]) / (ylim[1] - ylim[0]) * h

    out = [f'<g><text x="{x0 + PANEL_W / 2:.1f}" y="{y0 + 18}" text-anchor="middle" font-size="13">{escape(title)}</text>']
    out.append(f'<rect x="{left}" y="{top}" width="{w}" height="{h}" fill="none" stroke="#333"/>')
    for i in range(6):
        xv = xlim[0] + i * (xlim[1] - xlim[0]) / 5
        yv = ylim[0] + i * (ylim[1] - ylim[0]) / 5
        out.append(f'<text x="{sx(xv):.1f}" y="{top + h + 14}" text-anchor="middle" font-size="10">{xv:.3g}</text>')
        out.append(f'<text x="{left - 4}" y="{sy(yv) + 3:.1f}" text-anchor="end" font-size="10">{yv:.3g}</text>')
        out.append(f'<line x1="{left}" x2="{left + w}" y1="{sy(yv):.1f}" y2="{sy(yv):.1f}" stroke="#ddd"/>')
    out.append(f'<text x="{left + w / 2:.1f}" y="{top + h + 32}" text-anchor="middle" font-size="11">g/sqrt(kappa gamma)</text>')
    out.append(
        f'<text x="{x0 + 14}" y="{top + h / 2:.1f}" text-anchor="middle" font-size="11" '
        f'transform="rotate(-90 {x0 + 14} {top + h / 2:.1f})">{escape(ylabel)}</text>'
    )
    for k, (label, color, dash, pts) in enumerate(series):
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"{dash_attr}/>')
        ly = top + h - 12 - 13 * (len(series) - 1 - k)
        out.append(f'<line x1="{left + w - 90}" x2="{left + w - 70}" y1="{ly}" y2="{ly}" stroke="{color}"{dash_attr}/>')
        out.append(f'<text x="{left + w - 66}" y="{ly + 3}" font-size="10">{escape(label)}</text>')
    out.append("</g>")
    return out


def render_svg(rows) -> str:
    by_ks = defaultdict(list)
    for row in sorted(rows, key=lambda r: (r.ks_ratio, r.g_norm)):
        by_ks[row.ks_ratio].append(row)
    ks_values = sorted(by_ks)
    gs = [r.g_norm for r in rows]
    xlim = (min(gs), max(gs)) if max(gs) > min(gs) else (min(gs) - 0.5, min(gs) + 0.5)
    focus = 0.03 if 0.03 in by_ks else ks_values[0]

    def curves(metric):
        return [
            (f"ks={ks:g}", COLORS[i % len(COLORS)], DASHES[i % len(DASHES)], [(r.g_norm, getattr(r, metric)) for r in by_ks[ks]])
            for i, ks in enumerate(ks_values)
        ]

    fid = [
        (name, COLORS[i], DASHES[i], [(r.g_norm, getattr(r, name)) for r in by_ks[focus]])
        for i, name in enumerate(("F1", "F2", "F3", "F4"))
    ]
    width, height = 2 * PANEL_W, 2 * PANEL_H
    body = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    body += _panel(0, 0, f"generation fidelities (ks={focus:g})", fid, xlim, (0.8, 1.0), "F")
    body += _panel(PANEL_W, 0, "generation efficiency", curves("eta1"), xlim, (0.0, 1.0), "eta1")
    body += _panel(0, PANEL_H, "analyzer fidelity", curves("F_hbsa"), xlim, (0.8, 1.0), "F")
    body += _panel(PANEL_W, PANEL_H, "analyzer efficiency", curves("eta_hbsa"), xlim, (0.0, 1.0), "eta")
    body.append("</svg>")
    return "\n".join(body) + "\n"
