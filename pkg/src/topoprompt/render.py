"""Hand-written SVG barcodes and persistence diagrams.

Output is plain text with a fixed ``viewBox`` and coordinates rounded to
three decimals, so identical diagrams render to identical bytes. Essential
(infinite) bars are clamped to ``ESSENTIAL_CLAMP`` times the largest finite
death and flagged with a triangular ``essential`` marker.
"""
from __future__ import annotations

from .homology import PersistenceDiagram

WIDTH, HEIGHT = 640, 400
MARGIN = 48
ESSENTIAL_CLAMP = 1.05
COLORS = {0: "#1f77b4", 1: "#d62728"}


def _num(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("", "-0") else s


def _extent(dgm: PersistenceDiagram) -> tuple:
    finite = [p.death for p in dgm.finite()]
    top = max(finite) if finite else 0.0
    if top <= 0:
        top = 1.0
    return top, ESSENTIAL_CLAMP * top


def _header(title: str) -> list:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">',
        f"<title>{title}</title>",
        f'<rect class="background" x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]


def _axes(x_label: str, y_label: str, x_max: float, y_max: float | None) -> list:
    x0, y0 = MARGIN, HEIGHT - MARGIN
    x1, y1 = WIDTH - MARGIN, MARGIN
    out = [
        f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text class="label" x="{(x0 + x1) // 2}" y="{HEIGHT - 12}" text-anchor="middle">{x_label}</text>',
        f'<text class="label" x="14" y="{(y0 + y1) // 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {(y0 + y1) // 2})">{y_label}</text>',
    ]
    for k in range(5):
        frac = k / 4
        x = x0 + frac * (x1 - x0)
        out.append(f'<text class="tick" x="{_num(x)}" y="{y0 + 16}" text-anchor="middle">{_num(frac * x_max)}</text>')
        if y_max is not None:
            y = y0 - frac * (y0 - y1)
            out.append(f'<text class="tick" x="{x0 - 6}" y="{_num(y + 4)}" text-anchor="end">{_num(frac * y_max)}</text>')
    return out


def render_barcode(dgm: PersistenceDiagram) -> str:
    """One horizontal bar per pair, H0 bars above H1 bars."""
    _, clamp = _extent(dgm)
    lines = _header("persistence barcode")
    lines += _axes("scale", "features", clamp, None)
    pairs = [p for p in dgm.pairs if p.dim in (0, 1)]
    x0, x1 = MARGIN, WIDTH - MARGIN
    y_top, y_bot = MARGIN, HEIGHT - MARGIN
    scale = (x1 - x0) / clamp
    slot = (y_bot - y_top) / max(len(pairs), 1)
    height = max(min(slot * 0.7, 12.0), 0.5)
    for i, p in enumerate(pairs):
        death = clamp if p.is_essential else p.death
        y = y_top + i * slot + (slot - height) / 2
        bx = x0 + p.birth * scale
        bw = max((death - p.birth) * scale, 0.0)
        lines.append(
            f'<rect class="bar dim-{p.dim}" x="{_num(bx)}" y="{_num(y)}" width="{_num(bw)}" '
            f'height="{_num(height)}" fill="{COLORS[p.dim]}"/>'
        )
        if p.is_essential:
            tip = x0 + clamp * scale
            mid = y + height / 2
            lines.append(
                f'<polygon class="essential" points="{_num(tip)},{_num(mid)} {_num(tip - 6)},{_num(y)} '
                f'{_num(tip - 6)},{_num(y + height)}" fill="black"/>'
            )
    lines += _legend()
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_diagram(dgm: PersistenceDiagram) -> str:
    """Birth/death scatter with the diagonal; essential pairs sit on the
    dashed ``inf`` line at the clamp height."""
    _, clamp = _extent(dgm)
    lines = _header("persistence diagram")
    lines += _axes("birth", "death", clamp, clamp)
    x0, y0 = MARGIN, HEIGHT - MARGIN
    sx = (WIDTH - 2 * MARGIN) / clamp
    sy = (HEIGHT - 2 * MARGIN) / clamp
    lines.append(
        f'<line class="diagonal" x1="{x0}" y1="{y0}" x2="{_num(x0 + clamp * sx)}" '
        f'y2="{_num(y0 - clamp * sy)}" stroke="gray" stroke-dasharray="4 3"/>'
    )
    if any(p.is_essential for p in dgm.pairs):
        y_inf = y0 - clamp * sy
        lines.append(
            f'<line class="essential-level" x1="{x0}" y1="{_num(y_inf)}" x2="{WIDTH - MARGIN}" '
            f'y2="{_num(y_inf)}" stroke="black" stroke-dasharray="2 2"/>'
        )
        lines.append(f'<text class="label" x="{WIDTH - MARGIN + 4}" y="{_num(y_inf + 4)}">inf</text>')
    for p in dgm.pairs:
        if p.dim not in (0, 1):
            continue
        death = clamp if p.is_essential else p.death
        cx, cy = x0 + p.birth * sx, y0 - death * sy
        cls = f"point dim-{p.dim}" + (" essential" if p.is_essential else "")
        lines.append(f'<circle class="{cls}" cx="{_num(cx)}" cy="{_num(cy)}" r="3.5" fill="{COLORS[p.dim]}"/>')
    lines += _legend()
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _legend() -> list:
    out = []
    for k, dim in enumerate((0, 1)):
        x = WIDTH - MARGIN - 110 + 56 * k
        out.append(f'<rect class="legend" x="{x}" y="16" width="10" height="10" fill="{COLORS[dim]}"/>')
        out.append(f'<text class="legend" x="{x + 14}" y="25">H{dim}</text>')
    return out


def render(dgm: PersistenceDiagram, mode: str = "barcode") -> str:
    if mode == "barcode":
        return render_barcode(dgm)
    if mode == "diagram":
        return render_diagram(dgm)
    raise ValueError(f"mode must be 'barcode' or 'diagram', got {mode!r}")
