"""Minimal self-contained SVG line charts; no plotting dependency.

Output is a plain string built deterministically from the inputs, so
charts are byte-reproducible.
"""

WIDTH, HEIGHT = 720, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 180, 40, 56

PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#ad494a",
]


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def line_chart(
    *,
    title: str,
    x_label: str,
    y_label: str,
    xs,
    series: dict,
    y_range: tuple = (0.0, 1.0),
) -> str:
    """Render one polyline per series entry over shared x positions."""
    xs = [float(x) for x in xs]
    x_min, x_max = min(xs), max(xs)
    if x_max == x_min:
        x_max = x_min + 1.0
    y_min, y_max = y_range
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(x):
        return MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w

    def py(y):
        return MARGIN_T + (y_max - y) / (y_max - y_min) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-size="15">{title}</text>',
    ]
    # axes
    x0, y0 = MARGIN_L, MARGIN_T + plot_h
    parts.append(
        f'<line x1="{x0}" y1="{MARGIN_T}" x2="{x0}" y2="{y0}" stroke="black"/>'
        f'<line x1="{x0}" y1="{y0}" x2="{x0 + plot_w}" y2="{y0}" stroke="black"/>'
    )
    for x in sorted(set(xs)):
        parts.append(
            f'<line x1="{_fmt(px(x))}" y1="{y0}" x2="{_fmt(px(x))}" y2="{y0 + 4}" stroke="black"/>'
            f'<text x="{_fmt(px(x))}" y="{y0 + 18}" text-anchor="middle">{x:g}</text>'
        )
    ticks = 5
    for i in range(ticks + 1):
        y = y_min + (y_max - y_min) * i / ticks
        parts.append(
            f'<line x1="{x0 - 4}" y1="{_fmt(py(y))}" x2="{x0}" y2="{_fmt(py(y))}" stroke="black"/>'
            f'<text x="{x0 - 8}" y="{_fmt(py(y) + 4)}" text-anchor="end">{y:g}</text>'
        )
    parts.append(
        f'<text x="{x0 + plot_w / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle">{x_label}</text>'
        f'<text x="18" y="{MARGIN_T + plot_h / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN_T + plot_h / 2:.0f})">{y_label}</text>'
    )
    # polylines and legend, in series order
    for idx, (name, ys) in enumerate(series.items()):
        color = PALETTE[idx % len(PALETTE)]
        points = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{points}"/>'
        )
        ly = MARGIN_T + 14 + idx * 18
        lx = WIDTH - MARGIN_R + 12
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.8"/>'
            f'<text x="{lx + 28}" y="{ly}">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
