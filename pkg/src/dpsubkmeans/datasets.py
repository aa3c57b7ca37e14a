"""Dataset ingestion: delimited text files, named reference shapes, synthetic blobs."""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Dataset, normalize


class DataError(ValueError):
    """A dataset file could not be parsed or does not match its expected shape."""


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    n_points: int
    n_dims: int
    k: int
    internal_k: int
    repeats: int

    def validate(self, data):
        if (data.n_points, data.n_dims) != (self.n_points, self.n_dims):
            raise DataError(
                f"{self.name}: expected {self.n_points}x{self.n_dims}, got {data.n_points}x{data.n_dims}"
            )
        return data


# shapes of the four reference sets, with the sweep defaults used for each
NAMED_SPECS = {
    "iris": DatasetSpec("iris", 150, 4, k=3, internal_k=2, repeats=30),
    "wine": DatasetSpec("wine", 178, 13, k=3, internal_k=4, repeats=30),
    "breast_cancer": DatasetSpec("breast_cancer", 569, 30, k=2, internal_k=4, repeats=30),
    "digits": DatasetSpec("digits", 1797, 64, k=10, internal_k=5, repeats=10),
}


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(path, label_column=None, name="custom"):
    """Read a numeric delimited file into an (unnormalized) :class:`Dataset`.

    A first row containing any non-numeric cell is taken to be a header.
    ``label_column`` may be a column index (negative counts from the end) or,
    when a header is present, a column name; that column is dropped.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        sample = fh.read(4096)
        fh.seek(0)
        try:
            dialect = csv.Sniffer().sniff(sample, delimiters=",;\t ")
        except csv.Error:
            dialect = csv.excel
        rows = [(i, row) for i, row in enumerate(csv.reader(fh, dialect), start=1)
                if row and any(c.strip() for c in row)]
    if not rows:
        raise DataError(f"{path}: file is empty")

    header = None
    if not all(_is_number(c) for c in rows[0][1]):
        header = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
        if not rows:
            raise DataError(f"{path}: header but no data rows")

    width = len(rows[0][1])
    drop = None
    if label_column is not None:
        if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
            if header is None or label_column not in header:
                raise DataError(f"{path}: label column {label_column!r} not found in header")
            drop = header.index(label_column)
        else:
            drop = int(label_column)
            if not -width <= drop < width:
                raise DataError(f"{path}: label column {drop} out of range for {width} columns")
            drop %= width

    values = []
    for lineno, row in rows:
        if len(row) != width:
            raise DataError(f"{path}:{lineno}: expected {width} columns, found {len(row)}")
        cells = [c for j, c in enumerate(row) if j != drop]
        try:
            values.append([float(c) for c in cells])
        except ValueError:
            bad = next(c for c in cells if not _is_number(c))
            raise DataError(f"{path}:{lineno}: non-numeric cell {bad!r}") from None
    pts = np.asarray(values, dtype=np.float64)
    if pts.shape[1] == 0:
        raise DataError(f"{path}: no feature columns left after dropping the label column")
    return Dataset(pts, normalized=False, name=name)


def load_named(path, name, label_column=None):
    """Load, shape-check against :data:`NAMED_SPECS` when ``name`` is known, and normalize."""
    data = load_csv(path, label_column=label_column, name=name)
    if name in NAMED_SPECS:
        NAMED_SPECS[name].validate(data)
    return normalize(data)


def make_blobs(n_per_blob, centers, spread, seed):
    """Isotropic Gaussian blobs around ``centers``, concatenated then normalized to [0, 1]^d.

    Ground-truth blob indices are kept in ``Dataset.labels``.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    if centers.shape[0] < 1:
        raise ValueError("need at least one blob center")
    if not spread > 0:
        raise ValueError(f"spread must be positive, got {spread}")
    rng = np.random.default_rng(seed)
    pts = np.concatenate([c + spread * rng.standard_normal((n_per_blob, centers.shape[1])) for c in centers])
    labels = np.repeat(np.arange(centers.shape[0]), n_per_blob)
    return normalize(Dataset(pts, name="synthetic", labels=labels))


def write_csv(data, path, labels=None):
    """Write points (and optionally a trailing label column) with a header row."""
    path = Path(path)
    d = data.n_dims
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{j}" for j in range(d)] + (["label"] if labels is not None else []))
        for i, row in enumerate(data.points):
            cells = [repr(float(v)) for v in row]
            if labels is not None:
                cells.append(str(int(labels[i])))
            w.writerow(cells)
    return path


def export_reference_datasets(out_dir):
    """Write iris/wine/breast_cancer/digits CSVs from the copies bundled with scikit-learn.

    Needs the optional ``scikit-learn`` dependency; no network access is made.
    """
    from sklearn import datasets as skd

    loaders = {
        "iris": skd.load_iris,
        "wine": skd.load_wine,
        "breast_cancer": skd.load_breast_cancer,
        "digits": skd.load_digits,
    }
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, loader in loaders.items():
        bunch = loader()
        data = Dataset(bunch.data, name=name)
        NAMED_SPECS[name].validate(data)
        paths[name] = write_csv(data, out_dir / f"{name}.csv", labels=bunch.target)
    return paths
