"""Figure generation from wave-packet scattering experiment artifacts."""

from .figures import SchemaError, decay_loglog, phase_heatmap, verdict_panel
from .io import load_field_file, read_csv_table

__all__ = [
    "SchemaError",
    "decay_loglog",
    "phase_heatmap",
    "verdict_panel",
    "load_field_file",
    "read_csv_table",
]
