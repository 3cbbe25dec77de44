"""Minimal deterministic SVG scatter/line plots (no timestamps, no external
plotting dependency, byte-identical output for identical input)."""

from __future__ import annotations

WIDTH = 640
HEIGHT = 400
MARGIN_L = 60
MARGIN_R = 20
MARGIN_T = 40
MARGIN_B = 50


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def render_fit_plot(indices: list[int], actual: list[float],
                    simulated: list[float], title: str, ylabel: str) -> str:
    """Actual vs simulated values over specimen index: two polylines with
    circle markers for actual and square markers for simulated."""
    if not indices:
        raise ValueError("no data points")
    ymin = min(min(actual), min(simulated))
    ymax = max(max(actual), max(simulated))
    pad = 0.05 * (ymax - ymin or 1.0)
    ymin -= pad
    ymax += pad
    xmin, xmax = min(indices), max(indices)

    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(i):
        span = (xmax - xmin) or 1
        return MARGIN_L + pw * (i - xmin) / span

    def py(v):
        return MARGIN_T + ph * (1.0 - (v - ymin) / (ymax - ymin))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
    ]
    # axes
    out.append(f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
               f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>')
    out.append(f'<line x1="{MARGIN_L}" y1="{HEIGHT - MARGIN_B}" x2="{WIDTH - MARGIN_R}" '
               f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>')
    for t in _ticks(ymin, ymax):
        y = py(t)
        out.append(f'<line x1="{MARGIN_L - 4}" y1="{y:.2f}" x2="{MARGIN_L}" '
                   f'y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{t:.2f}</text>')
    for i in indices:
        x = px(i)
        out.append(f'<line x1="{x:.2f}" y1="{HEIGHT - MARGIN_B}" x2="{x:.2f}" '
                   f'y2="{HEIGHT - MARGIN_B + 4}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{HEIGHT - MARGIN_B + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{i}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">specimen index</text>')
    out.append(f'<text x="16" y="{MARGIN_T + ph / 2:.1f}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12" '
               f'transform="rotate(-90 16 {MARGIN_T + ph / 2:.1f})">{ylabel}</text>')

    for values, color, marker in ((actual, "#1f6fb4", "circle"),
                                  (simulated, "#d1493e", "square")):
        pts = " ".join(f"{px(i):.2f},{py(v):.2f}" for i, v in zip(indices, values))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for i, v in zip(indices, values):
            if marker == "circle":
                out.append(f'<circle cx="{px(i):.2f}" cy="{py(v):.2f}" r="3.5" '
                           f'fill="{color}"/>')
            else:
                out.append(f'<rect x="{px(i) - 3:.2f}" y="{py(v) - 3:.2f}" width="6" '
                           f'height="6" fill="{color}"/>')

    # legend
    out.append(f'<circle cx="{WIDTH - 170}" cy="{MARGIN_T + 8}" r="3.5" fill="#1f6fb4"/>')
    out.append(f'<text x="{WIDTH - 160}" y="{MARGIN_T + 12}" font-family="sans-serif" '
               f'font-size="12">actual</text>')
    out.append(f'<rect x="{WIDTH - 173}" y="{MARGIN_T + 25}" width="6" height="6" '
               f'fill="#d1493e"/>')
    out.append(f'<text x="{WIDTH - 160}" y="{MARGIN_T + 32}" font-family="sans-serif" '
               f'font-size="12">simulated</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
