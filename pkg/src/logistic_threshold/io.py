"""Artifact writers: CSV (17 significant digits), JSON, gnuplot data/scripts, manifests."""

import hashlib
import json
import platform
import time
from pathlib import Path

import numpy as np
import scipy

CSV_FORMAT = "%.17g"


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(path, record):
    path = Path(path)
    path.write_text(json.dumps(record, indent=2, sort_keys=True, default=_plain) + "\n")
    return path


def write_csv(path, header, columns):
    """Comma-separated columns with a header row, '.' decimals, 17 significant digits."""
    path = Path(path)
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    lines = [",".join(header)]
    lines += [",".join(CSV_FORMAT % x for x in row) for row in data]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path):
    """Header names and a 2-D float array from a file written by :func:`write_csv`."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def write_gnuplot(stem, x, y, title, xlabel, ylabel, logscale=""):
    """Two-column ``stem.dat`` plus a ready-to-run ``stem.gp`` script."""
    stem = Path(stem)
    dat = stem.with_suffix(".dat")
    data = np.column_stack([np.asarray(x, dtype=float), np.asarray(y, dtype=float)])
    dat.write_text("".join(f"{CSV_FORMAT % a} {CSV_FORMAT % b}\n" for a, b in data))
    lines = ["set terminal pngcairo size 800,600",
             f"set output '{stem.name}.png'",
             f"set title '{title}'",
             f"set xlabel '{xlabel}'",
             f"set ylabel '{ylabel}'"]
    if logscale:
        lines.append(f"set logscale {logscale}")
    lines.append(f"plot '{dat.name}' using 1:2 with linespoints title '{ylabel}'")
    gp = stem.with_suffix(".gp")
    gp.write_text("\n".join(lines) + "\n")
    return [dat, gp]


def sha256_file(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Manifest:
    """Tracks the files a command writes; saved as manifest.json in the output dir.

    ``status`` is "complete", "partial" (a failure after some outputs were
    written) or "failed".
    """

    def __init__(self, out_dir, command, config_path=None):
        self.out_dir = Path(out_dir)
        self.command = command
        self.config_path = None if config_path is None else Path(config_path)
        self.files = []
        self.started = time.perf_counter()
        self.status = "complete"
        self.error = None

    def add(self, *paths):
        for p in paths:
            if isinstance(p, (list, tuple)):
                self.add(*p)
            else:
                self.files.append(Path(p))

    def fail(self, message):
        self.status = "partial" if self.files else "failed"
        self.error = message

    def write(self):
        from . import __version__

        inputs = {}
        if self.config_path is not None and self.config_path.exists():
            inputs["config"] = {"path": str(self.config_path),
                                "sha256": sha256_file(self.config_path)}
        record = {
            "command": self.command,
            "status": self.status,
            "error": self.error,
            "inputs": inputs,
            "outputs": [{"path": str(p.relative_to(self.out_dir)), "sha256": sha256_file(p)}
                        for p in self.files],
            "versions": {"logistic_threshold": __version__, "numpy": np.__version__,
                         "scipy": scipy.__version__, "python": platform.python_version()},
            "wall_time_s": time.perf_counter() - self.started,
        }
        return write_json(self.out_dir / "manifest.json", record)
