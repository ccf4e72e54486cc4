"""JSON schema round trips (hex floats must be bit-exact)."""

import json

import numpy as np
import pytest

from algphase.model import (
    Mode,
    ProjectorSpec,
    add_noise,
    forward_measure,
    make_ensemble,
    sample_signal,
)
from algphase.serialize import (
    SCHEMA_VERSION,
    dump_instance,
    instance_from_payload,
    instance_to_payload,
    load_instance,
)


def _instance(mode, seed=11):
    rng = np.random.default_rng(seed)
    spec = ProjectorSpec(n=3, rank=1, mode=mode)
    z = sample_signal(3, mode, rng)
    E = make_ensemble(spec, 4, rng)
    obs = add_noise(forward_measure(z, E), 1e-3, rng)
    return E, obs, z


@pytest.mark.parametrize("mode", [Mode.REAL, Mode.COMPLEX_SPLIT])
def test_roundtrip_bit_exact(mode):
    E, obs, z = _instance(mode)
    payload = instance_to_payload(E, obs, z, seed=11)
    # through actual JSON text, not just the dict
    E2, obs2, z2 = instance_from_payload(json.loads(json.dumps(payload)))
    assert E2.mode is mode and E2.n == E.n and E2.k == E.k
    for a, b in zip(E.matrices, E2.matrices):
        if mode is Mode.REAL:
            assert (a.A == b.A).all()
        else:
            assert (a.B == b.B).all() and (a.C == b.C).all()
    assert (obs2.b == obs.b).all()
    assert obs2.noise_sigma == obs.noise_sigma
    assert (obs2.clean == obs.clean).all()
    assert (z2.x == z.x).all()
    if mode is Mode.COMPLEX_SPLIT:
        assert (z2.y == z.y).all()


def test_payload_fields():
    E, obs, z = _instance(Mode.REAL)
    payload = instance_to_payload(E, obs, z, seed=5)
    assert payload["schema_version"] == SCHEMA_VERSION
    assert payload["mode"] == "real"
    assert payload["n"] == 3 and payload["k"] == 4 and payload["r"] == 1
    assert payload["seed"] == 5
    assert len(payload["matrices"]) == 4
    assert len(payload["matrices"][0]) == 9          # row-major entries
    assert all(isinstance(s, str) for s in payload["b"])


def test_file_roundtrip(tmp_path):
    E, obs, z = _instance(Mode.REAL)
    path = tmp_path / "inst.json"
    dump_instance(path, E, obs, z, seed=3)
    E2, obs2, z2 = load_instance(path)
    assert (obs2.b == obs.b).all()
    assert (z2.x == z.x).all()


def test_rejects_unknown_version():
    E, obs, z = _instance(Mode.REAL)
    payload = instance_to_payload(E, obs, z)
    payload["schema_version"] = 99
    with pytest.raises(ValueError):
        instance_from_payload(payload)


def test_optional_blocks_absent():
    E, _, _ = _instance(Mode.REAL)
    payload = instance_to_payload(E)
    E2, obs2, z2 = instance_from_payload(payload)
    assert obs2 is None and z2 is None


def test_special_values_roundtrip():
    # hex encoding must survive subnormals and negative zero
    E, obs, z = _instance(Mode.REAL)
    weird = np.array([5e-324, -0.0, 1e308, -1.7976931348623157e308])
    from algphase.model import Observation
    obs = Observation(b=weird)
    payload = instance_to_payload(E, obs)
    _, obs2, _ = instance_from_payload(payload)
    assert (np.signbit(obs2.b) == np.signbit(weird)).all()
    assert (obs2.b == weird).all()
