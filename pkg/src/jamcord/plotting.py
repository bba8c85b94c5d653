"""Render force-displacement traces to SVG with matplotlib.

Output bytes are deterministic for fixed input: the Agg backend is
forced, the SVG id hash salt is pinned, and the creation date metadata
is stripped, so golden-file comparison and re-run diffs work.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .errors import SchemaError
from .trace import GraspTrace

_HASHSALT = "jamcord"

PHASE_STYLES = {"press": "-", "jam": ":", "lift": "-"}


def render_traces_svg(traces: list[tuple[str, GraspTrace]], path) -> None:
    """Overlay labeled traces as polylines and write an SVG file."""
    if not traces:
        raise SchemaError("no traces to plot")
    plt.rcParams["svg.hashsalt"] = _HASHSALT
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    try:
        for label, trace in traces:
            if not trace.samples:
                raise SchemaError(f"trace {label!r} has no samples")
            phases = {s.phase for s in trace.samples}
            multi = len([p for p in ("press", "lift") if p in phases]) > 1
            for phase in ("press", "lift"):
                xs = trace.displacements(phase)
                ys = trace.forces(phase)
                if not xs:
                    continue
                name = f"{label} ({phase})" if multi else label
                ax.plot(xs, ys, PHASE_STYLES[phase], label=name, linewidth=1.4)
        ax.set_xlabel("displacement [mm]")
        ax.set_ylabel("force [N]")
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best", fontsize=9)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
