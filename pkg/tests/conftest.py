import os

import numpy as np
import pytest
from hypothesis import settings
from scipy.ndimage import gaussian_filter

from scenedbm.netpbm import Image, write_netpbm

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")

RED = (255, 0, 0)
BLUE = (0, 0, 255)


def two_half_image(width=20, height=10, left=RED, right=BLUE):
    data = np.zeros((height, width, 3), dtype=np.uint8)
    data[:, : width // 2] = left
    data[:, width // 2:] = right
    return Image(data)


def bfs_components(labels):
    """Plain 4-connected flood fill; returns {label: number of components}."""
    h, w = labels.shape
    seen = np.zeros((h, w), dtype=bool)
    counts = {}
    for y0 in range(h):
        for x0 in range(w):
            if seen[y0, x0]:
                continue
            lbl = labels[y0, x0]
            counts[lbl] = counts.get(lbl, 0) + 1
            stack = [(y0, x0)]
            seen[y0, x0] = True
            while stack:
                y, x = stack.pop()
                for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
                    if 0 <= ny < h and 0 <= nx < w and not seen[ny, nx] and labels[ny, nx] == lbl:
                        seen[ny, nx] = True
                        stack.append((ny, nx))
    return counts


def fake_scene_tree(root, n_classes=15, per_class=3, seed=0):
    """Stand-in for a fifteen-class directory: smooth random color images of mixed sizes."""
    rng = np.random.default_rng(seed)
    for k in range(n_classes):
        folder = os.path.join(root, f"class{k:02d}")
        os.makedirs(folder)
        for i in range(per_class):
            h, w = rng.integers(180, 260, 2)
            raw = gaussian_filter(rng.uniform(0, 255, (h, w, 3)), (4, 4, 0))
            raw = (raw - raw.min()) / (raw.max() - raw.min()) * 255
            write_netpbm(os.path.join(folder, f"{i}.ppm"), Image(np.rint(raw).astype(np.uint8)))
    return root


def smooth_noise_image(size=200, seed=0):
    rng = np.random.default_rng(seed)
    raw = gaussian_filter(rng.uniform(0, 255, (size, size, 3)), (3, 3, 0))
    raw = (raw - raw.min()) / (raw.max() - raw.min()) * 255
    return Image(np.rint(raw).astype(np.uint8))


@pytest.fixture
def two_half():
    return two_half_image()


@pytest.fixture
def bars():
    return np.array([[1, 1, 0, 0], [0, 0, 1, 1]], dtype=float)


def desk_config(**changes):
    """Small end-to-end configuration: 32 px images, 8x8 grid, DBM 64-32-16."""
    from scenedbm.config import PipelineConfig
    from scenedbm.rbm import CdConfig

    base = PipelineConfig(
        working_size=32, grid=(8, 8), hidden=(32, 16),
        layer1=CdConfig(epochs=300, batch_size=5, seed=0),
        layer2=CdConfig(epochs=300, batch_size=5, seed=1),
        softmax_iters=2000, train_per_class=20, test_per_class=10,
    )
    return base.replace(**changes)


@pytest.fixture(scope="session")
def scene_dir(tmp_path_factory):
    from scenedbm.synthetic import write_dataset

    return write_dataset(tmp_path_factory.mktemp("scenes"), 30, size=32, seed=0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
