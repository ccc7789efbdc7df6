"""Write a standalone matplotlib script for a CSV; nothing is rendered here."""

from __future__ import annotations

from pathlib import Path

from ..errors import ValidationError
from .presets import axes_for

_TEMPLATE = '''\
"""Plot {csv_name} ({preset}). Requires matplotlib."""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

CSV = {csv_path!r}
COLUMNS = {columns!r}

with open(CSV, newline="") as fh:
    rows = list(csv.DictReader(fh))

groups = defaultdict(list)
for row in rows:
    groups[row.get("sweep_value", "")].append(row)

fig, ax = plt.subplots(figsize=(5, 3.5))
for key, grp in groups.items():
    x = [float(r["tau"]) for r in grp]
    for col in COLUMNS:
        if col not in grp[0]:
            continue
        label = col if not key else f"{{col}} ({{key}})"
        ax.plot(x, [float(r[col]) for r in grp], label=label)
ax.set_xlabel({xlabel!r})
ax.set_ylabel({ylabel!r})
ax.legend()
fig.tight_layout()
fig.savefig({png!r}, dpi=150)
'''


def emit_plotscript(csv_path: str | Path, preset_name: str, out: str | Path | None = None) -> Path:
    """Write ``<csv stem>_plot.py`` (or ``out``) and return its path."""
    xlabel, ylabel, columns = axes_for(preset_name)
    csv_path = Path(csv_path)
    if not csv_path.is_file():
        raise ValidationError(f"CSV {str(csv_path)!r} not found")
    target = Path(out) if out else csv_path.with_name(csv_path.stem + "_plot.py")
    text = _TEMPLATE.format(
        csv_name=csv_path.name,
        preset=preset_name,
        csv_path=str(csv_path.resolve()),
        columns=list(columns),
        xlabel=xlabel,
        ylabel=ylabel,
        png=str(csv_path.with_suffix(".png").resolve()),
    )
    target.write_text(text, encoding="utf-8")
    return target
