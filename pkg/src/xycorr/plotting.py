"""Matplotlib renderings of sweep, CP and long-range results as SVG files.

Figures are built through the object API (no pyplot state) and written with a
fixed hash salt and no timestamp so identical data give identical bytes.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

_RC = {
    "svg.hashsalt": "xycorr",
    "svg.fonttype": "path",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
}
_MARKERS = {"OMQC": "o", "WYSIM": "+", "MIN": "*", "CONCURRENCE": "x", "GMQD": "s"}


def _fmt(v):
    return f"{v:g}".replace("-", "m")


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def _figure(ncols=1):
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(4.2 * ncols, 3.4))
        axes = [fig.add_subplot(1, ncols, i + 1) for i in range(ncols)]
    return fig, axes


def sweep_panel(outdir, gamma, kT, curves):
    """Measure and first-derivative curves for one (gamma, kT) pair.

    ``curves`` maps ``(measure, r)`` to ``(lambdas, values, d1)``; d1 may be None.
    """
    with matplotlib.rc_context(_RC):
        fig, (ax, dax) = _figure(2)
        for (measure, r), (lam, val, d1) in sorted(curves.items()):
            label = f"{measure} r={r}"
            ax.plot(lam, val, label=label)
            if d1 is not None:
                dax.plot(lam, d1, label=label)
        ax.set_xlabel("lambda")
        ax.set_ylabel("measure")
        dax.set_xlabel("lambda")
        dax.set_ylabel("d measure / d lambda")
        ax.set_title(f"gamma={gamma:g}, kT={kT:g}")
        ax.legend(fontsize=7)
        fig.tight_layout()
    return _save(fig, Path(outdir) / f"sweep_g{_fmt(gamma)}_kT{_fmt(kT)}.svg")


def cp_panel(outdir, gamma, r, estimates):
    """Estimated critical point against kT, one marker style per measure.

    ``estimates`` maps measure name to a list of ``(kT, lambda_hat)``.
    """
    with matplotlib.rc_context(_RC):
        fig, (ax,) = _figure()
        for measure, pts in sorted(estimates.items()):
            if not pts:
                continue
            kts, lams = zip(*pts)
            ax.plot(kts, lams, linestyle="none", marker=_MARKERS.get(measure, "."), label=measure)
        ax.axhline(1.0, color="0.5", linewidth=0.8)
        ax.set_xlabel("kT")
        ax.set_ylabel("estimated critical lambda")
        ax.set_title(f"gamma={gamma:g}, r={r}")
        ax.legend(fontsize=7)
        fig.tight_layout()
    return _save(fig, Path(outdir) / f"cp_g{_fmt(gamma)}_r{r}.svg")


def longrange_panel(outdir, gamma, kT, profiles):
    """Measure against spin distance; ``profiles`` maps (measure, lambda) to values for r = 1.."""
    with matplotlib.rc_context(_RC):
        fig, (ax,) = _figure()
        for (measure, lam), vals in sorted(profiles.items()):
            rs = range(1, len(vals) + 1)
            ax.plot(rs, vals, marker=_MARKERS.get(measure, "."), label=f"{measure} lambda={lam:g}")
        ax.set_xlabel("r")
        ax.set_ylabel("measure")
        ax.set_title(f"gamma={gamma:g}, kT={kT:g}")
        ax.legend(fontsize=6)
        fig.tight_layout()
    return _save(fig, Path(outdir) / f"longrange_g{_fmt(gamma)}_kT{_fmt(kT)}.svg")
