"""Static radar chart of Data Bias Profiles as a standalone SVG document."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .detect import DataBiasProfile, radar_coordinates

AXES = ("RD", "SD", "sAUC")
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _point(cx, cy, radius, angle):
    return cx + radius * math.cos(angle), cy + radius * math.sin(angle)


def radar_svg(profiles, size: int = 420, labels=None) -> str:
    """Render one polygon per profile over the axes RD, SD and sAUC.

    Values are clipped to [0, 1] after the axis normalisation.
    """
    if isinstance(profiles, DataBiasProfile):
        profiles = [profiles]
    profiles = list(profiles)
    if not profiles:
        raise ValueError("at least one profile is required")
    labels = list(labels) if labels is not None else [p.dataset_id for p in profiles]
    cx = cy = size / 2
    radius = size * 0.32
    # first axis points straight up
    angles = [-math.pi / 2 + 2 * math.pi * k / len(AXES) for k in range(len(AXES))]

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size + 20 * len(profiles)}" '
        f'viewBox="0 0 {size} {size + 20 * len(profiles)}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for level in (0.25, 0.5, 0.75, 1.0):
        ring = " ".join("%.2f,%.2f" % _point(cx, cy, radius * level, a) for a in angles)
        out.append(f'<polygon class="grid" points="{ring}" fill="none" stroke="#cccccc" stroke-width="1"/>')
    for name, a in zip(AXES, angles):
        x, y = _point(cx, cy, radius, a)
        lx, ly = _point(cx, cy, radius + 18, a)
        out.append(f'<line class="axis" x1="{cx:.2f}" y1="{cy:.2f}" x2="{x:.2f}" y2="{y:.2f}" '
                   f'stroke="#555555" stroke-width="1"/>')
        out.append(f'<text x="{lx:.2f}" y="{ly:.2f}" font-family="sans-serif" font-size="13" '
                   f'text-anchor="middle" dominant-baseline="middle">{name}</text>')
    for i, (profile, label) in enumerate(zip(profiles, labels)):
        coords = radar_coordinates(profile)
        color = PALETTE[i % len(PALETTE)]
        pts = []
        for name, a in zip(AXES, angles):
            v = min(max(coords[name], 0.0), 1.0)
            pts.append("%.2f,%.2f" % _point(cx, cy, radius * v, a))
        out.append(f'<polygon class="profile" points="{" ".join(pts)}" fill="{color}" fill-opacity="0.2" '
                   f'stroke="{color}" stroke-width="2"><title>{escape(str(label))}</title></polygon>')
        ty = size + 20 * i + 4
        out.append(f'<rect x="12" y="{ty}" width="12" height="12" fill="{color}"/>')
        out.append(f'<text x="30" y="{ty + 10}" font-family="sans-serif" font-size="12">'
                   f'{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_radar(profiles, path, labels=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(radar_svg(profiles, labels=labels))
