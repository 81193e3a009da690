"""Figure regeneration from solver run directories.

Consumes only the CSV/JSON outputs of the ``vbgk`` command-line driver and
renders summary figures; run directories are never modified.
"""

from vbgk_plots.figures import FIGURES, render

__all__ = ["FIGURES", "render"]
