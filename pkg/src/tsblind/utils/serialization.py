"""CSV input and output with ``#``-prefixed metadata lines."""

import sys
from contextlib import contextmanager
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np
import pandas as pd

# Seventeen significant digits round-trip every float64.
FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def tool_version() -> str:
    """Installed version of tsblind, or "unknown" from a source checkout."""
    try:
        return version("tsblind")
    except PackageNotFoundError:
        return "unknown"


@contextmanager
def _open_text(path: Optional[PathLike]):
    """Open `path` for writing, or yield stdout when it is None or "-"."""
    if path is None or str(path) == "-":
        yield sys.stdout
        return
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as handle:
        yield handle


def format_metadata(metadata: Optional[Mapping[str, object]]) -> str:
    """Render metadata as ``# key=value`` lines."""
    if not metadata:
        return ""
    lines = []
    for key, value in metadata.items():
        if isinstance(value, float):
            value = FLOAT_FORMAT % value
        lines.append(f"# {key}={value}\n")
    return "".join(lines)


def write_frame(
    frame: pd.DataFrame,
    path: Optional[PathLike] = None,
    metadata: Optional[Mapping[str, object]] = None,
    header: bool = True,
    preamble: str = "",
) -> None:
    """
    Write a DataFrame as CSV preceded by metadata comment lines.

    Parameters
    ----------
    frame : pd.DataFrame
        The table. The index is not written.
    path : str or Path, optional
        Output file; stdout when None or "-".
    metadata : mapping, optional
        Written first as ``# key=value`` lines.
    header : bool, default=True
        Whether to write the column names.
    preamble : str, default=""
        Text written between the metadata and the table.
    """
    with _open_text(path) as handle:
        handle.write(format_metadata(metadata))
        handle.write(preamble)
        frame.to_csv(
            handle,
            index=False,
            header=header,
            float_format=FLOAT_FORMAT,
            lineterminator="\n",
        )


def write_matrix_csv(
    matrix,
    path: Optional[PathLike] = None,
    metadata: Optional[Mapping[str, object]] = None,
) -> None:
    """
    Write a square matrix: metadata lines, its dimension K on one row, then
    the K rows.
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    n_rows, n_cols = matrix.shape
    if n_rows != n_cols:
        raise ValueError(f"Expected a square matrix. Got shape {matrix.shape}.")
    write_frame(
        pd.DataFrame(matrix), path, metadata=metadata, header=False, preamble=f"{n_rows}\n"
    )


def read_metadata(path: PathLike) -> dict:
    """Collect the ``# key=value`` lines at the top of a file."""
    metadata = {}
    with open(path) as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            key, sep, value = line[1:].strip().partition("=")
            if sep:
                metadata[key.strip()] = value.strip()
    return metadata


def read_column_csv(path: PathLike) -> np.ndarray:
    """
    Read a single-column CSV of numbers, skipping ``#`` lines.

    A non-numeric first row is treated as a header.
    """
    frame = pd.read_csv(path, comment="#", header=None, dtype=str)
    if frame.shape[1] != 1:
        raise ValueError(
            f"Expected a single-column CSV in {path}, found {frame.shape[1]} columns."
        )
    column = frame.iloc[:, 0].str.strip()
    if column.size and pd.isna(pd.to_numeric(column.iloc[:1], errors="coerce")).all():
        column = column.iloc[1:]
    return pd.to_numeric(column, errors="raise").to_numpy(dtype=np.float64)
