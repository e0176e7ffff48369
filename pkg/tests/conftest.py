import sys
import threading
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from cliquexplain.segmentation import SuperpixelMap


def map_from_labels(labels) -> SuperpixelMap:
    labels = np.asarray(labels, dtype=np.int32)
    return SuperpixelMap(labels=labels, num_segments=int(labels.max()) + 1)


@pytest.fixture
def quadrant_map() -> SuperpixelMap:
    """4x4 label map split into four 2x2 quadrants, ids 0..3."""
    labels = np.array([
        [0, 0, 1, 1],
        [0, 0, 1, 1],
        [2, 2, 3, 3],
        [2, 2, 3, 3],
    ])
    return map_from_labels(labels)


@pytest.fixture
def striped_map() -> SuperpixelMap:
    """16x16 map cut into four vertical strips: a path-shaped region graph."""
    labels = np.repeat(np.arange(4), 4)[None, :].repeat(16, axis=0)
    return map_from_labels(labels)


@pytest.fixture(scope="session")
def service_url():
    """The explanation service running on an ephemeral local port."""
    import uvicorn

    from cliquexplain.service import app

    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("service did not start in time")
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def synthetic_grid_image(red_cells=((0, 1), (2, 2), (3, 0)), delta=20, seed=5,
                         cell=32, grid=4) -> np.ndarray:
    """Grid image whose pure-red content sits in `red_cells`; other cells get
    a red channel near mid gray (128 +- delta) and arbitrary green/blue."""
    rng = np.random.default_rng(seed)
    size = cell * grid
    img = np.zeros((size, size, 3), np.uint8)
    red_cells = set(red_cells)
    for i in range(grid):
        for j in range(grid):
            ys, xs = slice(cell * i, cell * (i + 1)), slice(cell * j, cell * (j + 1))
            if (i, j) in red_cells:
                img[ys, xs] = (255, 0, 0)
            else:
                r = int(128 + rng.integers(-delta, delta + 1))
                img[ys, xs] = (r, int(rng.integers(0, 255)), int(rng.integers(0, 255)))
    return img
