"""Datasets: in-memory representation, CSV I/O, and the two synthetic
Gaussian-mixture generators.

A dataset is an immutable bundle of an (n, d) float feature matrix, integer
labels in {0, ..., n_classes-1}, and optional integer group ids in
{0, ..., n_groups-1} (all samples grouped or none).  The empirical
distribution over samples is always uniform.
"""

import numpy as np

from . import rng


class DatasetError(ValueError):
    pass


class Dataset:
    def __init__(self, features, labels, groups=None, n_classes=None,
                 n_groups=None, seed=0):
        features = np.asarray(features, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64)
        if features.ndim != 2:
            raise DatasetError("features must be a 2-D array")
        if features.shape[0] != labels.shape[0]:
            raise DatasetError("features and labels disagree on n")
        if features.shape[0] < 1:
            raise DatasetError("dataset must contain at least one sample")
        if labels.min() < 0:
            raise DatasetError("labels must be nonnegative")
        self.features = features
        self.labels = labels
        self.n_classes = int(n_classes) if n_classes else int(labels.max()) + 1
        if labels.max() >= self.n_classes:
            raise DatasetError("label id exceeds declared class count")
        if groups is not None:
            groups = np.asarray(groups, dtype=np.int64)
            if groups.shape[0] != labels.shape[0]:
                raise DatasetError("groups and labels disagree on n")
            if groups.min() < 0:
                raise DatasetError("group ids must be nonnegative")
            self.n_groups = int(n_groups) if n_groups else int(groups.max()) + 1
            if groups.max() >= self.n_groups:
                raise DatasetError("group id exceeds declared group count")
        else:
            self.n_groups = 0
        self.groups = groups
        self.seed = int(seed)
        self.features.setflags(write=False)
        self.labels.setflags(write=False)
        if self.groups is not None:
            self.groups.setflags(write=False)

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def dim(self):
        return self.features.shape[1]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        same_groups = (self.groups is None) == (other.groups is None) and (
            self.groups is None or np.array_equal(self.groups, other.groups))
        return (np.array_equal(self.features, other.features)
                and np.array_equal(self.labels, other.labels)
                and same_groups)

    def group_sizes(self):
        if self.groups is None:
            raise DatasetError("dataset has no groups")
        return np.bincount(self.groups, minlength=self.n_groups)

    def subset(self, indices):
        groups = None if self.groups is None else self.groups[indices]
        return Dataset(self.features[indices], self.labels[indices],
                       groups=groups, n_classes=self.n_classes,
                       n_groups=self.n_groups or None, seed=self.seed)


def relabel_groups_by_class(dataset):
    """Return a copy whose group ids are the class labels (group := label).

    Used for evaluation settings where the protected grouping is the class
    itself rather than the generating mixture component.
    """
    return Dataset(dataset.features, dataset.labels,
                   groups=dataset.labels.copy(),
                   n_classes=dataset.n_classes,
                   n_groups=dataset.n_classes, seed=dataset.seed)


# ---------------------------------------------------------------------------
# synthetic generators
#
# Each sample consumes exactly four counters of the stream:
#   4i + 0  -> class-label uniform
#   4i + 1  -> mixture-component uniform (burned when the class has a single
#              component, to keep counter alignment)
#   4i + 2, 4i + 3 -> Box-Muller pair for the two feature coordinates
# ---------------------------------------------------------------------------

def _mixture_sample(n, seed, p_class0, comp_weights_0, means_0, std_0,
                    comp_weights_1, means_1, std_1):
    i = np.arange(n, dtype=np.uint64)
    u_label = rng.uniform(seed, 4 * i)
    u_comp = rng.uniform(seed, 4 * i + np.uint64(1))
    z = rng.gaussian(seed, np.stack([4 * i + np.uint64(2),
                                     4 * i + np.uint64(3)], axis=1))
    labels = (u_label > p_class0).astype(np.int64)

    def pick(weights):
        cuts = np.cumsum(weights)
        return np.searchsorted(cuts, u_comp, side="left").clip(0, len(weights) - 1)

    comp0 = pick(comp_weights_0)
    comp1 = pick(comp_weights_1)
    comp = np.where(labels == 0, comp0, len(comp_weights_0) + comp1)
    means = np.vstack([means_0, means_1])
    stds = np.concatenate([np.full(len(means_0), std_0),
                           np.full(len(means_1), std_1)])
    features = means[comp] + stds[comp, None] * z
    return features, labels, comp


def gen_dataset_1(n, seed):
    """First synthetic benchmark: class imbalance without group structure.

    P(Y=0) = 0.7 with features N((0,0), I); class 1 is an equal-thirds
    mixture of unit-covariance Gaussians at (-3,1), (3,0), (0,-3).  Group id
    equals the class label (the oblivious setting treats classes as the
    implicit groups).
    """
    if n < 2:
        raise DatasetError("synthetic datasets need n >= 2")
    feats, labels, _ = _mixture_sample(
        n, seed, 0.7,
        [1.0], [(0.0, 0.0)], 1.0,
        [1 / 3, 1 / 3, 1 / 3], [(-3.0, 1.0), (3.0, 0.0), (0.0, -3.0)], 1.0)
    return Dataset(feats, labels, groups=labels.copy(), n_classes=2,
                   n_groups=2, seed=seed)


def gen_dataset_2(n, seed):
    """Second synthetic benchmark: five mixture-component groups.

    P(Y=0) = 0.7.  Class 0 is the printed three-component mixture with
    weights (5/12, 2/12, 5/12) over means (-2,-2), (-2,-2), (2,2) and
    covariance 0.5*I — the first two components share a mean but are kept as
    distinct groups.  Class 1 mixes (2/5, 3/5) over (-3,0), (3,0) with
    covariance 0.3*I.  Group id is the component index (0-2 from class 0,
    3-4 from class 1).
    """
    if n < 2:
        raise DatasetError("synthetic datasets need n >= 2")
    feats, labels, comp = _mixture_sample(
        n, seed, 0.7,
        [5 / 12, 2 / 12, 5 / 12], [(-2.0, -2.0), (-2.0, -2.0), (2.0, 2.0)],
        np.sqrt(0.5),
        [2 / 5, 3 / 5], [(-3.0, 0.0), (3.0, 0.0)], np.sqrt(0.3))
    return Dataset(feats, labels, groups=comp, n_classes=2, n_groups=5,
                   seed=seed)


SYNTHETIC_GENERATORS = {"I": gen_dataset_1, "II": gen_dataset_2}


_SPLIT_STREAM = 0x517  # sub-stream tag reserved for train/test permutations


def train_test_split(dataset, fraction, seed):
    """Disjoint split into (first, second) parts of sizes (ceil(f*n), rest).

    The permutation is drawn from the package PRNG, so the split is a pure
    function of (dataset order, fraction, seed).
    """
    if not 0.0 < fraction < 1.0:
        raise DatasetError("split fraction must lie strictly between 0 and 1")
    n = dataset.n
    k = int(np.ceil(fraction * n))
    perm = rng.CounterStream(rng.derive_seed(seed, _SPLIT_STREAM)).permutation(n)
    return dataset.subset(perm[:k]), dataset.subset(perm[k:])


# ---------------------------------------------------------------------------
# CSV round trip: header x1,...,xd,y[,group]; %.17g feature text
# ---------------------------------------------------------------------------

def save_csv(dataset, path):
    d = dataset.dim
    header = [f"x{j + 1}" for j in range(d)] + ["y"]
    if dataset.groups is not None:
        header.append("group")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(dataset.n):
            cells = ["%.17g" % v for v in dataset.features[i]]
            cells.append(str(int(dataset.labels[i])))
            if dataset.groups is not None:
                cells.append(str(int(dataset.groups[i])))
            fh.write(",".join(cells) + "\n")


def load_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise DatasetError(f"{path}: empty file")
    header = lines[0].split(",")
    grouped = header and header[-1] == "group"
    n_feat = len(header) - (2 if grouped else 1)
    expected = [f"x{j + 1}" for j in range(n_feat)] + ["y"] + (
        ["group"] if grouped else [])
    if n_feat < 1 or header != expected:
        raise DatasetError(f"{path}: line 1: bad header {header!r}")
    width = len(header)
    feats, labels, groups = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != width:
            raise DatasetError(
                f"{path}: line {lineno}: expected {width} fields, got {len(cells)}")
        try:
            feats.append([float(c) for c in cells[:n_feat]])
            y = int(cells[n_feat])
            if y < 0:
                raise ValueError
            labels.append(y)
            if grouped:
                g = int(cells[n_feat + 1])
                if g < 0:
                    raise ValueError
                groups.append(g)
        except ValueError:
            raise DatasetError(f"{path}: line {lineno}: malformed row") from None
    if not labels:
        raise DatasetError(f"{path}: no data rows")
    return Dataset(np.array(feats), np.array(labels),
                   groups=np.array(groups) if grouped else None, seed=0)
