"""CSV and SVG writers. Byte-stable output is the contract here."""

from __future__ import annotations

import csv

from .analysis import VisibilityCurve

CURVE_HEADER = [
    "omega_t",
    "V_semiclassical",
    "V_quantum_analytic",
    "V_quantum_numeric",
    "V_mc",
    "V_mc_stderr",
    "negativity",
    "entropy",
    "weight_separable",
    "flags",
]

SCAN_HEADER = [
    "nbar",
    "V_quantum_analytic",
    "V_quantum_numeric",
    "dip_quantum",
    "negativity",
    "weight_separable",
    "flags",
]


def format_real(value) -> str:
    """17 significant digits, '.' decimal separator; None serializes empty."""
    if value is None:
        return ""
    return f"{float(value):.17g}"


def write_curve_csv(path: str, curve: VisibilityCurve) -> None:
    # newline='' + the csv module's default CRLF terminator: RFC-4180 framing.
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CURVE_HEADER)
        for p in curve.points:
            writer.writerow(
                [
                    format_real(p.omega_t),
                    format_real(p.v_semiclassical),
                    format_real(p.v_quantum_analytic),
                    format_real(p.v_quantum_numeric),
                    format_real(p.v_mc),
                    format_real(p.v_mc_stderr),
                    format_real(p.negativity),
                    format_real(p.entropy),
                    format_real(p.weight_separable),
                    ";".join(p.flags),
                ]
            )


def write_scan_csv(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(SCAN_HEADER)
        for row in rows:
            writer.writerow(
                [
                    format_real(row["nbar"]),
                    format_real(row.get("v_quantum_analytic")),
                    format_real(row.get("v_quantum_numeric")),
                    format_real(row.get("dip_quantum")),
                    format_real(row.get("negativity")),
                    format_real(row.get("weight_separable")),
                    ";".join(row.get("flags", ())),
                ]
            )


_SERIES = (
    ("v_semiclassical", "#1f77b4", "V semiclassical"),
    ("v_quantum_analytic", "#d62728", "V quantum analytic"),
    ("v_quantum_numeric", "#2ca02c", "V quantum numeric"),
    ("v_mc", "#9467bd", "V monte-carlo"),
)

_W, _H = 800, 480
_ML, _MR, _MT, _MB = 64, 24, 24, 48


def render_curve_svg(path: str, curve: VisibilityCurve) -> None:
    """Minimal self-contained polyline plot of the visibility columns."""
    points = curve.points
    xs = [p.omega_t for p in points]
    if not xs:
        return
    x_lo, x_hi = min(xs), max(xs)
    span = (x_hi - x_lo) or 1.0
    plot_w = _W - _ML - _MR
    plot_h = _H - _MT - _MB

    def sx(x: float) -> float:
        return _ML + plot_w * (x - x_lo) / span

    def sy(y: float) -> float:
        return _MT + plot_h * (1.05 - y) / 1.05  # y axis fixed to [0, 1.05]

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_W} {_H}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333" stroke-width="1"/>',
    ]
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = sy(tick)
        parts.append(
            f'<line x1="{_ML - 4}" y1="{y:.2f}" x2="{_ML}" y2="{y:.2f}" stroke="#333"/>'
            f'<text x="{_ML - 8}" y="{y + 4:.2f}" text-anchor="end">{tick:g}</text>'
        )
    n_xticks = 6
    for k in range(n_xticks + 1):
        x_val = x_lo + span * k / n_xticks
        x = sx(x_val)
        parts.append(
            f'<line x1="{x:.2f}" y1="{_MT + plot_h}" x2="{x:.2f}" y2="{_MT + plot_h + 4}" stroke="#333"/>'
            f'<text x="{x:.2f}" y="{_MT + plot_h + 18}" text-anchor="middle">{x_val:.3g}</text>'
        )
    parts.append(
        f'<text x="{_ML + plot_w / 2:.2f}" y="{_H - 10}" text-anchor="middle">omega * t [rad]</text>'
    )
    legend_y = _MT + 14
    for attr, color, label in _SERIES:
        coords = [
            f"{sx(p.omega_t):.2f},{sy(v):.2f}"
            for p in points
            if (v := getattr(p, attr)) is not None
        ]
        if not coords:
            continue
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(coords)}"/>'
        )
        parts.append(
            f'<line x1="{_ML + 10}" y1="{legend_y}" x2="{_ML + 34}" y2="{legend_y}" '
            f'stroke="{color}" stroke-width="1.5"/>'
            f'<text x="{_ML + 40}" y="{legend_y + 4}">{label}</text>'
        )
        legend_y += 16
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(parts) + "\n")
