import math

import numpy as np
import pytest

from svbev.camera import Channel, FisheyeCamera, RadialDistortion, default_rig, look_rotation
from svbev.model import default_catalog


def make_camera(
    channel=Channel.FRONT,
    position=(0.0, 0.0, 1.0),
    yaw=0.0,
    pitch_down=math.pi / 4,
    distortion=None,
    focal=300.0,
    fov_deg=95.0,
    size=(1280, 960),
):
    return FisheyeCamera(
        channel=channel,
        focal=(focal, focal),
        principal_point=(size[0] / 2, size[1] / 2),
        image_size=size,
        distortion=distortion or RadialDistortion(),
        rotation=look_rotation(yaw, pitch_down),
        translation=position,
        fov_half_angle=math.radians(fov_deg),
    )


@pytest.fixture(scope="session")
def rig():
    return default_rig()


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed after the run whatever the capture mode
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    def _add(criterion: str, passed: bool | None, detail: str) -> None:
        verdict = "INFO" if passed is None else ("PASS" if passed else "FAIL")
        ACCEPTANCE_LINES.append(f"[{verdict}] {criterion}: {detail}")

    return _add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
