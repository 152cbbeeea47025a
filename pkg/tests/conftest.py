import os
from pathlib import Path

import numpy as np
import pytest

from darg import Dataset

# Benchmark datasets for the reproduction tests. wine ships with scikit-learn
# (the same 178x13 three-class data); the other KEEL files are discovered from
# DARG_KEEL_DIR when the machine has them.
KEEL_ENV_VAR = "DARG_KEEL_DIR"


def make_blobs(counts, centers, seed, scale=1.0, label_noise=0.0):
    """Gaussian blobs with optional label noise, as a validated Dataset."""
    rng = np.random.default_rng(seed)
    X_parts, y_parts = [], []
    for cls, (n, center) in enumerate(zip(counts, centers)):
        X_parts.append(rng.normal(center, scale, size=(n, len(center))))
        y_parts.append(np.full(n, cls, dtype=np.int64))
    X = np.vstack(X_parts)
    y = np.concatenate(y_parts)
    if label_noise > 0:
        flip = rng.random(len(y)) < label_noise
        y = y.copy()
        y[flip] = (y[flip] + 1 + rng.integers(0, len(counts) - 1, size=flip.sum())) % len(counts)
    names = tuple(f"c{i}" for i in range(len(counts)))
    feats = tuple(f"f{j}" for j in range(len(centers[0])))
    return Dataset(X, y, names, feats).validate()


def _write_wine_keel(path: Path) -> None:
    from sklearn.datasets import load_wine

    bundle = load_wine()
    lines = ["@relation wine"]
    for name in bundle.feature_names:
        lines.append(f"@attribute {name.replace(' ', '_')} real")
    lines.append("@attribute class {1, 2, 3}")
    lines.append("@data")
    for row, target in zip(bundle.data, bundle.target):
        lines.append(", ".join(repr(float(v)) for v in row) + f", {target + 1}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@pytest.fixture(scope="session")
def keel_dir(tmp_path_factory) -> Path:
    """Directory of KEEL benchmark files: generated wine plus any local copies."""
    root = tmp_path_factory.mktemp("keel")
    _write_wine_keel(root / "wine.dat")
    extra = os.environ.get(KEEL_ENV_VAR)
    if extra:
        for dat in sorted(Path(extra).glob("*.dat")):
            (root / dat.name).write_bytes(dat.read_bytes())
    return root


TOY_KEEL = """\
@relation toy
@attribute height real [0.0, 10.0]
@attribute width real [0.0, 10.0]
@attribute kind {a, b}
@inputs height, width
@outputs kind
@data
1.0, 2.0, a
3.0, 4.0, b
5.0, 6.0, a
"""


@pytest.fixture()
def toy_keel_file(tmp_path) -> Path:
    path = tmp_path / "toy.dat"
    path.write_text(TOY_KEEL, encoding="utf-8")
    return path
