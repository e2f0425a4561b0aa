"""Minimal SVG emission: polygons, polylines, markers, axes. No plotting
dependencies; coordinates are mapped into a fixed-size canvas with margins.
"""

from __future__ import annotations

WIDTH = 640
HEIGHT = 640
MARGIN = 50


class _Mapper:
    def __init__(self, x0, y0, x1, y1, width=WIDTH, height=HEIGHT, margin=MARGIN):
        self.x0, self.y0 = x0, y0
        sx = (width - 2 * margin) / max(x1 - x0, 1e-30)
        sy = (height - 2 * margin) / max(y1 - y0, 1e-30)
        self.s = min(sx, sy)
        self.margin = margin
        self.height = height

    def __call__(self, x, y):
        # SVG y runs downward
        return (
            self.margin + (x - self.x0) * self.s,
            self.height - self.margin - (y - self.y0) * self.s,
        )


def _pts(mapper, coords):
    return " ".join(f"{mapper(x, y)[0]:.2f},{mapper(x, y)[1]:.2f}" for x, y in coords)


def _axes(mapper, x0, y0, x1, y1, xlabel, ylabel):
    ax0, ay0 = mapper(x0, y0)
    ax1, ay1 = mapper(x1, y1)
    parts = [
        f'<line x1="{ax0:.1f}" y1="{ay0:.1f}" x2="{ax1:.1f}" y2="{ay0:.1f}" stroke="black"/>',
        f'<line x1="{ax0:.1f}" y1="{ay0:.1f}" x2="{ax0:.1f}" y2="{ay1:.1f}" stroke="black"/>',
        f'<text x="{(ax0 + ax1) / 2:.1f}" y="{ay0 + 35:.1f}" text-anchor="middle" '
        f'font-size="14">{xlabel}</text>',
        f'<text x="{ax0 - 35:.1f}" y="{(ay0 + ay1) / 2:.1f}" text-anchor="middle" '
        f'font-size="14" transform="rotate(-90 {ax0 - 35:.1f} {(ay0 + ay1) / 2:.1f})">{ylabel}</text>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        xv = x0 + frac * (x1 - x0)
        yv = y0 + frac * (y1 - y0)
        px, _ = mapper(xv, y0)
        _, py = mapper(x0, yv)
        parts.append(
            f'<text x="{px:.1f}" y="{ay0 + 18:.1f}" text-anchor="middle" font-size="11">{xv:.3g}</text>'
        )
        parts.append(
            f'<text x="{ax0 - 8:.1f}" y="{py + 4:.1f}" text-anchor="end" font-size="11">{yv:.3g}</text>'
        )
    return parts


def _document(body):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">\n<rect width="100%" height="100%" fill="white"/>\n'
        + "\n".join(body)
        + "\n</svg>\n"
    )


def trajectory_svg(domain, partition, paths, final_positions):
    """Agent paths over the domain with the final partition overlaid.

    paths: sequence of per-agent coordinate lists; final_positions: (n, 2).
    """
    x0, y0, x1, y1 = domain.bounding_box()
    m = _Mapper(x0, y0, x1, y1)
    body = [
        f'<polygon points="{_pts(m, domain.vertices)}" fill="#e8f5e8" stroke="green" stroke-width="2"/>'
    ]
    if partition is not None:
        for cell in partition.cells:
            body.append(
                f'<polygon points="{_pts(m, cell.polygon.vertices)}" fill="none" '
                f'stroke="#888" stroke-width="1"/>'
            )
    for path in paths:
        if len(path) > 1:
            body.append(
                f'<polyline points="{_pts(m, path)}" fill="none" stroke="blue" stroke-width="1"/>'
            )
    for x, y in final_positions:
        px, py = m(x, y)
        body.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="4" fill="none" stroke="red" stroke-width="2"/>')
    return _document(body)


def curve_svg(xs, ys, xlabel="t", ylabel="H"):
    """Single x-y curve with axes and tick labels."""
    xs = list(xs)
    ys = list(ys)
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pad = 0.05 * (y1 - y0)
    m = _Mapper(x0, y0 - pad, x1, y1 + pad)
    body = _axes(m, x0, y0 - pad, x1, y1 + pad, xlabel, ylabel)
    body.append(
        f'<polyline points="{_pts(m, zip(xs, ys))}" fill="none" stroke="blue" stroke-width="1.5"/>'
    )
    return _document(body)


def partition_svg(partition):
    """Standalone picture of a partition with sensor-count labels omitted."""
    domain = partition.domain
    x0, y0, x1, y1 = domain.bounding_box()
    m = _Mapper(x0, y0, x1, y1)
    body = [
        f'<polygon points="{_pts(m, domain.vertices)}" fill="white" stroke="green" stroke-width="2"/>'
    ]
    for cell in partition.cells:
        body.append(
            f'<polygon points="{_pts(m, cell.polygon.vertices)}" fill="none" stroke="#555" stroke-width="1"/>'
        )
    return _document(body)
