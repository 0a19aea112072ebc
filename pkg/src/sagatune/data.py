"""Dataset ingestion, artificial dataset generation, and preprocessing.

Feature matrices are stored column-per-sample: ``features`` has shape
``(d, n)`` and column ``i`` is sample ``i``.  Text input follows the LIBSVM
convention ``<label> <idx>:<val> ...`` with 1-based, strictly increasing
indices per line.  Very sparse files are kept in CSC form automatically.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, ParseError, ValidationError

# Parsed matrices denser than this are materialized as ndarrays.
SPARSE_FILL_THRESHOLD = 0.10

ARTIFICIAL_KINDS = ("uniform", "alone_eigval", "staircase_eigval")


@dataclass(eq=False)
class Dataset:
    """Feature matrix (d x n, one column per sample) plus n labels."""

    features: object  # ndarray or scipy.sparse.csc_matrix, shape (d, n)
    labels: np.ndarray

    def __post_init__(self):
        if not sp.issparse(self.features):
            self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=float)
        if self.features.ndim != 2:
            raise DimensionError("features must be a 2-d matrix")
        if self.labels.ndim != 1 or self.labels.shape[0] != self.features.shape[1]:
            raise DimensionError(
                "expected %d labels, got %d"
                % (self.features.shape[1], self.labels.shape[0])
            )
        values = self.features.data if sp.issparse(self.features) else self.features
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(self.labels))):
            raise ValidationError("dataset contains NaN or infinite entries")

    @property
    def n(self):
        return self.features.shape[1]

    @property
    def d(self):
        return self.features.shape[0]

    @property
    def is_sparse(self):
        return sp.issparse(self.features)

    def column(self, i):
        """Sample ``i`` as a dense 1-d array."""
        if not 0 <= i < self.n:
            raise DimensionError("sample index %d out of range [0, %d)" % (i, self.n))
        if self.is_sparse:
            return np.asarray(self.features[:, [i]].todense()).ravel()
        return self.features[:, i]

    def dense_features(self):
        if self.is_sparse:
            return np.asarray(self.features.todense())
        return self.features

    def equals(self, other):
        """Exact structural equality (same storage kind, values, labels)."""
        if self.n != other.n or self.d != other.d:
            return False
        if self.is_sparse != other.is_sparse:
            return False
        if not np.array_equal(self.labels, other.labels):
            return False
        return np.array_equal(self.dense_features(), other.dense_features())


def _iter_lines(source):
    if isinstance(source, bytes):
        source = source.decode("ascii")
    if isinstance(source, str):
        return source.splitlines()
    # file-like object
    lines = []
    for raw in source:
        if isinstance(raw, bytes):
            raw = raw.decode("ascii")
        lines.append(raw.rstrip("\n"))
    return lines


def parse_libsvm(source, d_override=None):
    """Parse LIBSVM text into a :class:`Dataset`.

    ``source`` may be a string, a byte string, or an iterable of lines.
    ``#`` starts a comment; blank lines are skipped.  The feature dimension
    is the largest index seen, or ``d_override`` when that is larger.
    """
    labels = []
    rows = []  # per sample: list of (0-based index, value)
    max_index = 0
    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise ParseError("bad label %r" % tokens[0], line=lineno) from None
        entries = []
        previous = 0
        for token in tokens[1:]:
            idx_text, _, val_text = token.partition(":")
            try:
                index = int(idx_text)
                value = float(val_text)
            except ValueError:
                raise ParseError("bad feature token %r" % token, line=lineno) from None
            if index <= 0:
                raise ParseError("index %d must be positive" % index, line=lineno)
            if index <= previous:
                raise ParseError(
                    "index %d not strictly increasing" % index, line=lineno
                )
            previous = index
            entries.append((index - 1, value))
        max_index = max(max_index, previous)
        labels.append(label)
        rows.append(entries)

    if not rows:
        raise ParseError("no samples")
    d = max_index
    if d_override is not None:
        if d_override < max_index:
            raise DimensionError(
                "d_override=%d is smaller than max feature index %d"
                % (d_override, max_index)
            )
        d = d_override
    if d == 0:
        raise ParseError("no features present in any sample")

    n = len(rows)
    nnz = sum(len(entries) for entries in rows)
    fill = nnz / (d * n)
    if fill < SPARSE_FILL_THRESHOLD:
        data = np.empty(nnz)
        row_idx = np.empty(nnz, dtype=np.int64)
        col_ptr = np.zeros(n + 1, dtype=np.int64)
        pos = 0
        for j, entries in enumerate(rows):
            for index, value in entries:
                row_idx[pos] = index
                data[pos] = value
                pos += 1
            col_ptr[j + 1] = pos
        features = sp.csc_matrix((data, row_idx, col_ptr), shape=(d, n))
    else:
        features = np.zeros((d, n))
        for j, entries in enumerate(rows):
            for index, value in entries:
                features[index, j] = value
    return Dataset(features, np.asarray(labels))


def write_libsvm(ds):
    """Serialize a dataset back to LIBSVM text (nonzero entries only).

    Trailing all-zero feature rows are not representable in the format;
    re-parse with ``d_override=ds.d`` to recover the exact dimension.
    """
    out = []
    for j in range(ds.n):
        col = ds.column(j)
        parts = ["%.17g" % ds.labels[j]]
        for index in np.nonzero(col)[0]:
            parts.append("%d:%.17g" % (index + 1, col[index]))
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


def standardize_features(ds):
    """Center each feature row and scale it to unit population variance.

    Rows with zero variance are only centered (they become identically 0).
    """
    if ds.n < 1:
        raise ValidationError("standardization needs at least one sample")
    features = ds.dense_features().copy()
    means = features.mean(axis=1, keepdims=True)
    features -= means
    stds = np.sqrt(np.mean(features**2, axis=1, keepdims=True))
    keep = stds[:, 0] > 0.0
    features[keep] /= stds[keep]
    return Dataset(features, ds.labels.copy())


def generate_artificial(kind, n, d, seed):
    """Generate one of the three reference artificial datasets.

    ``uniform`` fills a d x n matrix with i.i.d. entries on [0, 1);
    ``alone_eigval`` is diag(1, ..., 1, 100); ``staircase_eigval`` is
    diag(1, 10*sqrt(1/n), ..., 10*sqrt((n-2)/n), 10).  The diagonal kinds
    require d == n.  Labels are i.i.d. standard normal draws, which is all
    the ridge experiments need (smoothness constants ignore labels).
    """
    if kind not in ARTIFICIAL_KINDS:
        raise ValidationError(
            "unknown kind %r (expected one of %s)" % (kind, ", ".join(ARTIFICIAL_KINDS))
        )
    if n < 1 or d < 1:
        raise DimensionError("n and d must be positive")
    rng = np.random.default_rng(seed)
    if kind == "uniform":
        features = rng.random((d, n))
    else:
        if d != n:
            raise DimensionError("%s requires d == n, got d=%d n=%d" % (kind, d, n))
        if kind == "alone_eigval":
            diag = np.ones(n)
            diag[-1] = 100.0
        else:
            diag = np.empty(n)
            diag[0] = 1.0
            if n > 1:
                diag[-1] = 10.0
                ks = np.arange(1, n - 1)
                diag[1:-1] = 10.0 * np.sqrt(ks / n)
        features = np.diag(diag)
    labels = rng.standard_normal(n)
    return Dataset(features, labels)


def rotate(ds, seed):
    """Conjugate a square feature matrix by a random orthogonal Q.

    Q comes from the QR decomposition of a square matrix with uniform
    random entries; the output is Q^T A Q, which preserves singular values.
    """
    if ds.d != ds.n:
        raise DimensionError("rotation requires a square feature matrix")
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.random((ds.n, ds.n)))
    rotated = q.T @ ds.dense_features() @ q
    return Dataset(rotated, ds.labels.copy())
