"""
Output artifacts: JSON reports and trajectory CSVs, written atomically.

JSON is sorted and carries the resolved config and package version, and
nothing time-dependent, so identical inputs give identical bytes.
"""

import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from . import __version__

logger = logging.getLogger(__name__)


def _write_atomic(path: Path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug("wrote %s", path)


def artifact(kind: str, resolved_config: Dict[str, Any], body: Dict[str, Any]) -> Dict[str, Any]:
    return {"kind": kind, "version": __version__, "config": resolved_config, **body}


def write_json(path: Path, payload: Dict[str, Any]) -> Path:
    _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return Path(path)


def read_json(path: Path) -> Dict[str, Any]:
    return json.loads(Path(path).read_text())


def write_trajectory_csv(
    path: Path,
    times: np.ndarray,
    amplitudes: Optional[np.ndarray] = None,
    populations: Optional[np.ndarray] = None,
    photon_populations: Optional[np.ndarray] = None,
) -> Path:
    """
    Columns: time_s, pop_0..pop_N, then re_k/im_k when amplitudes are given,
    then photon_0..photon_nmax for cavity runs.
    """
    if populations is None:
        if amplitudes is None:
            raise ValueError("need amplitudes or populations")
        populations = np.abs(amplitudes) ** 2
    levels = populations.shape[1]
    header = ["time_s"] + [f"pop_{k}" for k in range(levels)]
    columns = [np.asarray(times)[:, None], populations]
    if amplitudes is not None:
        header += [f"re_{k}" for k in range(levels)] + [f"im_{k}" for k in range(levels)]
        columns += [amplitudes.real, amplitudes.imag]
    if photon_populations is not None:
        header += [f"photon_{n}" for n in range(photon_populations.shape[1])]
        columns.append(photon_populations)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in np.hstack(columns):
        writer.writerow([repr(float(x)) for x in row])
    _write_atomic(path, buffer.getvalue())
    return Path(path)
