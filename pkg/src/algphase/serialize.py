"""Versioned JSON schema for ensembles, observations, and signals.

Float payloads are encoded as C99 hex-float strings (``float.hex()``), which
round-trip bit-exactly and avoid any decimal formatting ambiguity. Schema:

```
{
  "schema_version": 1,
  "mode": "real" | "complex_split",
  "n": int, "k": int, "r": int | null,
  "matrices": [ [hex, ...] ]                      # real: row-major A_i
             | [ {"B": [hex...], "C": [hex...]} ] # split pairs
  "b": [hex, ...], "sigma": hex,
  "b_clean": [hex, ...] | null,
  "seed": int | null,
  "signal": {"x": [hex...], "y": [hex...] | null} | null
}
```

The ``signal`` block is optional; it lets benchmarking tools report errors
against ground truth.
"""

from __future__ import annotations

import json

import numpy as np

from .model import (
    MeasurementEnsemble,
    MeasurementMatrix,
    Mode,
    Observation,
    Signal,
)

__all__ = [
    "SCHEMA_VERSION",
    "instance_to_payload",
    "instance_from_payload",
    "dump_instance",
    "load_instance",
]

SCHEMA_VERSION = 1


def _enc(a):
    return [float(v).hex() for v in np.asarray(a, dtype=float).ravel()]


def _dec(entries, shape=None):
    a = np.array([float.fromhex(s) for s in entries], dtype=float)
    return a.reshape(shape) if shape is not None else a


def instance_to_payload(ensemble: MeasurementEnsemble,
                        observation: Observation | None = None,
                        signal: Signal | None = None,
                        seed: int | None = None) -> dict:
    n, k = ensemble.n, ensemble.k
    if ensemble.mode is Mode.REAL:
        matrices = [_enc(m.A) for m in ensemble.matrices]
    else:
        matrices = [{"B": _enc(m.B), "C": _enc(m.C)} for m in ensemble.matrices]
    rank = ensemble.matrices[0].rank_bound
    payload = {
        "schema_version": SCHEMA_VERSION,
        "mode": ensemble.mode.value,
        "n": n,
        "k": k,
        "r": rank,
        "matrices": matrices,
        "seed": seed if seed is not None else ensemble.seed,
        "b": None,
        "sigma": float(0.0).hex(),
        "b_clean": None,
        "signal": None,
    }
    if observation is not None:
        payload["b"] = _enc(observation.b)
        payload["sigma"] = float(observation.noise_sigma).hex()
        if observation.clean is not None:
            payload["b_clean"] = _enc(observation.clean)
    if signal is not None:
        payload["signal"] = {
            "x": _enc(signal.x),
            "y": _enc(signal.y) if signal.mode is Mode.COMPLEX_SPLIT else None,
        }
    return payload


def instance_from_payload(payload: dict):
    """Inverse of :func:`instance_to_payload`.

    Returns (ensemble, observation | None, signal | None).
    """
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {version!r}")
    mode = Mode(payload["mode"])
    n, k = int(payload["n"]), int(payload["k"])
    rank = payload.get("r")
    mats = []
    for entry in payload["matrices"]:
        if mode is Mode.REAL:
            mats.append(MeasurementMatrix(
                mode=mode, A=_dec(entry, (n, n)), rank_bound=rank))
        else:
            mats.append(MeasurementMatrix(
                mode=mode, B=_dec(entry["B"], (n, n)), C=_dec(entry["C"], (n, n)),
                rank_bound=rank))
    if len(mats) != k:
        raise ValueError("matrix count does not match k")
    ensemble = MeasurementEnsemble(matrices=tuple(mats), seed=payload.get("seed"))

    observation = None
    if payload.get("b") is not None:
        clean = payload.get("b_clean")
        observation = Observation(
            b=_dec(payload["b"]),
            noise_sigma=float.fromhex(payload["sigma"]),
            clean=_dec(clean) if clean is not None else None,
        )

    signal = None
    sig = payload.get("signal")
    if sig is not None:
        if mode is Mode.REAL:
            signal = Signal.real(_dec(sig["x"]))
        else:
            signal = Signal.complex_split(_dec(sig["x"]), _dec(sig["y"]))
    return ensemble, observation, signal


def dump_instance(path, ensemble, observation=None, signal=None, seed=None):
    payload = instance_to_payload(ensemble, observation, signal, seed)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_instance(path):
    with open(path) as fh:
        return instance_from_payload(json.load(fh))
