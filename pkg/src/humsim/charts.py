"""Static SVG line charts (800x600 viewBox)."""
from html import escape
import math

WIDTH, HEIGHT = 800, 600
_MARGIN = dict(left=80, right=30, top=50, bottom=70)
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _nice_ticks(lo, hi, target=6):
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.floor(lo / step) * step
    stop = math.ceil(hi / step) * step
    n = int(round((stop - start) / step))
    return [start + i * step for i in range(n + 1)]


def _num(v):
    return f"{v:.2f}".rstrip("0").rstrip(".")


def line_chart(series, xlabel, ylabel, title=""):
    """Render ``series`` as an SVG document.

    Parameters
    ----------
    series : list of (label, xs, ys)
    xlabel, ylabel, title : str
    """
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    xt = _nice_ticks(min(xs_all), max(xs_all))
    yt = _nice_ticks(min(ys_all), max(ys_all))
    x0, x1, y0, y1 = xt[0], xt[-1], yt[0], yt[-1]
    left, top = _MARGIN["left"], _MARGIN["top"]
    pw = WIDTH - left - _MARGIN["right"]
    ph = HEIGHT - top - _MARGIN["bottom"]

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="13">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in xt:
        X = px(t)
        out.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 5}" '
                   'stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{top + ph + 20}" text-anchor="middle">'
                   f'{escape(_num(t))}</text>')
    for t in yt:
        Y = py(t)
        out.append(f'<line x1="{left - 5}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<line x1="{left}" y1="{Y:.2f}" x2="{left + pw}" y2="{Y:.2f}" '
                   'stroke="#dddddd"/>')
        out.append(f'<text x="{left - 8}" y="{Y + 4:.2f}" text-anchor="end">'
                   f'{escape(_num(t))}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{HEIGHT - 20}" text-anchor="middle">'
               f'{escape(xlabel)}</text>')
    out.append(f'<text x="20" y="{top + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {top + ph / 2:.2f})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="30" text-anchor="middle" font-size="16">'
                   f'{escape(title)}</text>')
    for i, (label, xs, ys) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        ly = top + 20 + 20 * i
        out.append(f'<line x1="{left + 15}" y1="{ly}" x2="{left + 45}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + 52}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def sweep_chart(result, axis="rh_percent", title=""):
    """Capacitance against RH or temperature, one polyline per branch run."""
    xlabel = "relative humidity (%)" if axis == "rh_percent" else "temperature (°C)"
    series = []
    run = None
    for row in result.rows:
        if run is None or row.branch != run[0]:
            if run is not None:
                # connect consecutive runs so the loop is drawn closed
                xs_prev, ys_prev = run[1][-1], run[2][-1]
                run = (row.branch, [xs_prev], [ys_prev])
            else:
                run = (row.branch, [], [])
            series.append(run)
        run[1].append(getattr(row, axis))
        run[2].append(row.capacitance_f * 1e12)
    return line_chart(series, xlabel, "capacitance (pF)", title)
