import numpy as np
import pytest

from jpegmoo.image import ImageBuffer, smooth_image, textured_image


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_color():
    return textured_image(48, 40, 3, seed=7)


@pytest.fixture(scope="session")
def small_gray():
    return smooth_image(40, 48, 1, seed=9)


@pytest.fixture(scope="session")
def photo_like():
    """Mid-size smooth content for objective-level tests."""
    return textured_image(96, 96, 3, seed=3)


def random_image(rng, width=32, height=32, channels=3) -> ImageBuffer:
    return ImageBuffer(rng.integers(0, 256, size=(height, width, channels), dtype=np.uint8))
