"""Preset scenarios for the six figure analogs and their chart emitters.

Two sweeps feed all six views: user count at five RF chains (served users,
total power and energy efficiency versus N) and RF-chain count at 100 users
(the same metrics versus M).
"""

import json
from dataclasses import replace
from pathlib import Path

from .. import __version__
from .config import ScenarioConfig, dump_config
from .sweep import run_sweep, rows_to_csv, summary_to_csv, write_text

DEFAULT_TRIALS = 50
ALL_ALGORITHMS = ("cia", "gwo", "kuc", "random", "corr_pair", "near_far")

# Channel and noise settings shared by every preset; see README "Calibrated presets".
PRESET_BASE = ScenarioConfig(
    algorithm=ALL_ALGORITHMS,
    n_scatter_clusters=1,
    angular_spread_deg=0.2,
    path_gain_db=80.0,
)

SWEEPS = {
    "users": dict(n_users=(50, 100, 150, 200, 250, 300), n_rf_chains=(5,)),
    "rf_chains": dict(n_users=(100,), n_rf_chains=(5, 10, 15, 20, 25)),
}

FIGURES = {
    "fig5_served_vs_users": ("users", "served_users", "served users"),
    "fig6_served_vs_rf_chains": ("rf_chains", "served_users", "served users"),
    "fig7_power_vs_users": ("users", "total_power_w", "total power (W)"),
    "fig8_power_vs_rf_chains": ("rf_chains", "total_power_w", "total power (W)"),
    "fig9_ee_vs_users": ("users", "energy_efficiency_bpj", "energy efficiency (bit/J)"),
    "fig10_ee_vs_rf_chains": ("rf_chains", "energy_efficiency_bpj", "energy efficiency (bit/J)"),
}


def preset(sweep, trials=DEFAULT_TRIALS, seed=0, base=PRESET_BASE):
    return replace(base, trials=trials, seed=seed, **SWEEPS[sweep])


def _axis(sweep):
    return ("n_users", "users N") if sweep == "users" else ("n_clusters", "RF chains M")


def series(summary, sweep, metric):
    """``{algorithm: [(x, mean, se), ...]}`` for one figure."""
    key, _ = _axis(sweep)
    out = {}
    for rec in summary:
        out.setdefault(rec["algorithm"], []).append(
            (rec[key], rec[f"{metric}_mean"], rec[f"{metric}_se"])
        )
    return out


def text_table(name, summary, sweep, metric, label):
    data = series(summary, sweep, metric)
    _, xlabel = _axis(sweep)
    xs = sorted({x for pts in data.values() for x, _, _ in pts})
    lines = [f"{name}: {label} vs {xlabel}", ""]
    lines.append(f"{'algorithm':<10}" + "".join(f"{x:>20}" for x in xs))
    for algo, pts in data.items():
        by_x = {x: (m, s) for x, m, s in pts}
        cells = "".join(f"{by_x[x][0]:>11.4g} ± {by_x[x][1]:<6.2g}" for x in xs)
        lines.append(f"{algo:<10}{cells}")
    return "\n".join(lines) + "\n"


COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def svg_chart(name, summary, sweep, metric, label, width=640, height=400):
    """A plain line chart with one polyline per algorithm."""
    data = series(summary, sweep, metric)
    _, xlabel = _axis(sweep)
    xs = [x for pts in data.values() for x, _, _ in pts]
    ys = [m for pts in data.values() for _, m, _ in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = 0.0, max(max(ys), 1e-30)
    left, right, top, bottom = 70, 150, 30, 50

    def px(x):
        return left + (x - x0) / ((x1 - x0) or 1) * (width - left - right)

    def py(y):
        return height - bottom - (y - y0) / ((y1 - y0) or 1) * (height - top - bottom)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">',
        f'<text x="{width / 2}" y="18" text-anchor="middle">{name}</text>',
        f'<line x1="{left}" y1="{py(y0)}" x2="{width - right}" y2="{py(y0)}" stroke="black"/>',
        f'<line x1="{left}" y1="{py(y0)}" x2="{left}" y2="{py(y1)}" stroke="black"/>',
        f'<text x="{(left + width - right) / 2}" y="{height - 12}" text-anchor="middle">{xlabel}</text>',
        f'<text x="14" y="{height / 2}" transform="rotate(-90 14 {height / 2})" text-anchor="middle">{label}</text>',
    ]
    for x in sorted(set(xs)):
        parts.append(f'<text x="{px(x):.1f}" y="{py(y0) + 16:.1f}" text-anchor="middle">{x}</text>')
    for frac in (0.0, 0.5, 1.0):
        y = y0 + frac * (y1 - y0)
        parts.append(f'<text x="{left - 6}" y="{py(y) + 4:.1f}" text-anchor="end">{y:.3g}</text>')
    for i, (algo, pts) in enumerate(data.items()):
        color = COLORS[i % len(COLORS)]
        path = " ".join(f"{px(x):.1f},{py(m):.1f}" for x, m, _ in sorted(pts))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{path}"/>')
        ly = top + 18 * i
        parts.append(f'<line x1="{width - right + 10}" y1="{ly}" x2="{width - right + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{width - right + 36}" y="{ly + 4}">{algo}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def run_figures(out_dir, trials=DEFAULT_TRIALS, seed=0, base=PRESET_BASE, progress=None):
    """Run both preset sweeps and write CSVs, text tables, SVG charts and metadata."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summaries, meta = {}, {"version": __version__, "trials": trials, "seed": seed, "sweeps": {}}
    for sweep in SWEEPS:
        config = preset(sweep, trials, seed, base)
        result = run_sweep(config, progress=(lambda i, n, s=sweep: progress(s, i, n)) if progress else None)
        summaries[sweep] = result.summary()
        write_text(out / f"sweep_{sweep}.csv", rows_to_csv(result.rows))
        write_text(out / f"sweep_{sweep}_summary.csv", summary_to_csv(summaries[sweep]))
        write_text(out / f"sweep_{sweep}.cfg", dump_config(config))
        meta["sweeps"][sweep] = {"trials": config.trials, "config": f"sweep_{sweep}.cfg"}
    for name, (sweep, metric, label) in FIGURES.items():
        write_text(out / f"{name}.txt", text_table(name, summaries[sweep], sweep, metric, label))
        write_text(out / f"{name}.svg", svg_chart(name, summaries[sweep], sweep, metric, label))
    meta["figures"] = sorted(FIGURES)
    write_text(out / "metadata.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return summaries
