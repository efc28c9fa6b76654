"""Session-scoped scenario fixtures shared across test modules."""

import pytest

import scenarios


@pytest.fixture(scope="session")
def reference_world(tmp_path_factory):
    return scenarios.build_reference_world(tmp_path_factory.mktemp("reference"))


@pytest.fixture(scope="session")
def reference_model(reference_world):
    return scenarios.fit_world_model(reference_world)


@pytest.fixture(scope="session")
def dropout_world(tmp_path_factory):
    return scenarios.build_reference_world(
        tmp_path_factory.mktemp("dropout"), dropout=0.05
    )


@pytest.fixture(scope="session")
def scaled_jitter_world(tmp_path_factory):
    probe = scenarios.LocalTangentPlane(scenarios.REF_LAT, scenarios.REF_LON)
    camera = scenarios.reference_camera(probe)
    sigma = scenarios.scaled_jitter_sigma(camera, probe)
    return scenarios.build_reference_world(
        tmp_path_factory.mktemp("scaled"), jitter_px=sigma
    )


@pytest.fixture(scope="session")
def speed_moving_world(tmp_path_factory):
    return scenarios.build_speed_moving_world(tmp_path_factory.mktemp("speed_moving"))


@pytest.fixture(scope="session")
def speed_stationary_world(tmp_path_factory):
    return scenarios.build_speed_stationary_world(
        tmp_path_factory.mktemp("speed_stationary")
    )


@pytest.fixture(scope="session")
def oracle_worlds(tmp_path_factory):
    base = tmp_path_factory.mktemp("oracle")
    return [scenarios.build_oracle_world(base / f"v{i}", i) for i in range(10)]
