"""Figure presets, sweeps and file output."""
