"""Builders for monotone threshold networks that interpolate monotone data.

Two constructions are provided, both producing networks whose hidden weights
are sums of standard basis vectors (hence nonnegative):

* :func:`build_interpolator` - works for any monotone dataset with n points
  in dimension d, using hidden widths (d*n, n, n):

  - layer 1, unit ``i*d + c``: fires iff input coordinate ``c`` is >= the
    same coordinate of the i-th dataset point;
  - layer 2, unit ``i``: ANDs the block of d layer-1 units for point i, so
    it fires iff the input dominates point i coordinatewise (the rows of
    this "embedding" stage indicate the dominated dataset points);
  - layer 3, unit ``i``: ORs all embedding indicators with index >= i
    (a suffix-OR), so on the j-th dataset point it fires iff j >= i;
  - output: telescoping weights ``w[i] = y[i] - y[i-1]``, which sum to the
    wanted label on each dataset point.

* :func:`build_chain_interpolator` - for totally ordered (chain) data,
  hidden widths (n, n): layer 1 compresses the embedding into one unit per
  point by thresholding a single separating coordinate, layer 2 is the same
  suffix-OR, and the output stage is unchanged.

Labels may be negative: the output bias absorbs ``min(0, y[0])`` so the
telescoping weights stay nonnegative.

With ``exact=True`` the output stage is built from Fractions, making
``evaluate_batch_exact`` reproduce every training label with zero error
(the float path is still within a few ulps).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    THRESHOLD,
    MonotoneDataset,
    ThresholdLayer,
    ThresholdNetwork,
    is_totally_ordered,
)
from .errors import NotTotallyOrdered


@dataclass(frozen=True)
class ConstructionTrace:
    """Evidence emitted by the builders.

    ``embedding_matrix[j, i]`` records whether embedding unit ``i`` fired on
    the j-th training point; for a correct build this equals
    ``x_j >= x_i`` coordinatewise.  ``output_weights`` are the telescoping
    label differences (floats, for reporting).
    """

    layer_widths: tuple[int, ...]
    embedding_matrix: np.ndarray
    output_weights: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "layer_widths": list(self.layer_widths),
            "embedding_matrix": self.embedding_matrix.astype(int).tolist(),
            "output_weights": list(self.output_weights),
        }


def _telescoping_output(labels: np.ndarray, exact: bool):
    """Output weights y_i - y_{i-1} (nonnegative) plus the label-shift bias.

    The virtual y_0 is 0 for nonnegative labels; for a negative smallest
    label the bias shifts the baseline down to y_1 instead, so the first
    weight becomes 0 and all weights stay nonnegative.
    """
    y0 = min(0.0, float(labels[0]))
    if exact:
        frac = [Fraction(float(v)) for v in labels]
        prev = Fraction(y0)
        weights = []
        for v in frac:
            weights.append(v - prev)
            prev = v
        return tuple(weights), Fraction(y0)
    padded = np.concatenate(([y0], labels))
    return np.diff(padded), y0


def build_interpolator(
    ds: MonotoneDataset, exact: bool = False
) -> tuple[ThresholdNetwork, ConstructionTrace]:
    """Build the general interpolating monotone network, widths (d*n, n, n).

    The returned network evaluates to ``y_i`` on every training point
    (exactly on the rational path; within ~n ulps on the float path).
    """
    n, d = ds.n, ds.dimension
    X, y = ds.points, ds.labels

    w1 = np.tile(np.eye(d), (n, 1))
    b1 = -X.reshape(-1)
    layer1 = ThresholdLayer(w1, b1, THRESHOLD)

    w2 = np.zeros((n, n * d))
    for i in range(n):
        w2[i, i * d : (i + 1) * d] = 1.0
    layer2 = ThresholdLayer(w2, np.full(n, -float(d)), THRESHOLD)

    layer3 = _suffix_or_layer(n)

    w4, bias = _telescoping_output(y, exact)
    net = ThresholdNetwork((layer1, layer2, layer3), w4, bias)

    embedding = net.hidden_activations(X)[1] != 0
    trace = ConstructionTrace(
        layer_widths=(n * d, n, n),
        embedding_matrix=embedding,
        output_weights=tuple(float(w) for w in w4),
    )
    return net, trace


def _suffix_or_layer(n: int) -> ThresholdLayer:
    """Unit i fires iff any input with index >= i is set (inputs are 0/1)."""
    return ThresholdLayer(np.triu(np.ones((n, n))), np.full(n, -1.0), THRESHOLD)


def separating_coordinate(ds: MonotoneDataset, i: int) -> tuple[int, float]:
    """For a chain dataset, a coordinate splitting point i from its predecessors.

    ``i`` is 1-based; returns ``(r, t)`` with ``r`` 1-based such that
    coordinate ``r`` of every earlier point is strictly below ``t``, and of
    every later point is >= ``t``, where ``t`` is coordinate ``r`` of point
    ``i``.  For ``i == 1`` the first coordinate is returned.
    """
    if not 1 <= i <= ds.n:
        raise IndexError(f"point index {i} outside 1..{ds.n}")
    if not is_totally_ordered(ds):
        raise NotTotallyOrdered("separating coordinates exist only for chain datasets")
    r = _separating_index(ds.points, i - 1)
    return r + 1, float(ds.points[i - 1, r])


def _separating_index(X: np.ndarray, i: int) -> int:
    if i == 0:
        return 0
    # The canonical order of a chain is the coordinatewise order, so some
    # coordinate strictly increases from the predecessor; by transitivity it
    # separates point i from every earlier point.
    increased = np.flatnonzero(X[i] > X[i - 1])
    assert increased.size > 0, "chain points are distinct and ordered"
    return int(increased[0])


def build_chain_interpolator(
    ds: MonotoneDataset, exact: bool = False
) -> tuple[ThresholdNetwork, ConstructionTrace]:
    """Build the compressed interpolator for totally ordered data, widths (n, n).

    Layer-1 unit i thresholds a single separating coordinate against its
    value at point i, which reproduces the embedding indicators on the
    training points; a suffix-OR and the telescoping output complete the
    network.  Raises :class:`NotTotallyOrdered` when the data is not a chain.
    """
    if not is_totally_ordered(ds):
        raise NotTotallyOrdered(
            "chain construction needs every pair of points comparable"
        )
    n, d = ds.n, ds.dimension
    X, y = ds.points, ds.labels

    w1 = np.zeros((n, d))
    b1 = np.empty(n)
    for i in range(n):
        r = _separating_index(X, i)
        w1[i, r] = 1.0
        b1[i] = -X[i, r]
    layer1 = ThresholdLayer(w1, b1, THRESHOLD)
    layer2 = _suffix_or_layer(n)

    w4, bias = _telescoping_output(y, exact)
    net = ThresholdNetwork((layer1, layer2), w4, bias)

    embedding = net.hidden_activations(X)[0] != 0
    trace = ConstructionTrace(
        layer_widths=(n, n),
        embedding_matrix=embedding,
        output_weights=tuple(float(w) for w in w4),
    )
    return net, trace
