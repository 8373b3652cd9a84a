import numpy as np
import pytest

from camact import se3


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    return se3.rot_from_quat(q)


def random_rigid(rng: np.random.Generator, trans_scale: float = 1.0) -> se3.RigidTransform:
    return se3.RigidTransform(
        random_rotation(rng), rng.uniform(-trans_scale, trans_scale, size=3)
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
