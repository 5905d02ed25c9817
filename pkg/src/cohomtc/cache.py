"""Persistent on-disk cache for resolutions and cohomology bases.

Layout: one JSON file per entry inside the cache directory, named by the
hex SHA-256 key of (schema version, group key, prime, max degree, kind).
Payload matrices are row-major 0/1 integer arrays; an integrity checksum
over the canonical payload encoding is verified on load, and resolutions
additionally get a cheap d.d = 0 re-check.  Corrupt or version-skewed
files are recomputed and overwritten with a warning.  Writes go through a
temp file and an atomic rename.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import warnings

import numpy as np

from .gf2 import FpMatrix

SCHEMA_VERSION = 1
ENV_VAR = "COHOMTC_CACHE_DIR"


class CacheCorrupt(RuntimeError):
    pass


def cache_key(group_key: str, prime: int, max_degree: int, kind: str) -> str:
    blob = json.dumps(
        [SCHEMA_VERSION, group_key, prime, max_degree, kind],
        separators=(",", ":"),
    ).encode()
    return hashlib.sha256(blob).hexdigest()


def _encode_matrix(m: FpMatrix):
    return {
        "shape": [m.nrows, m.ncols],
        "rows": m.to_dense().astype(int).tolist(),
    }


def _decode_matrix(obj, p):
    rows = np.array(obj["rows"], dtype=np.uint8)
    rows = rows.reshape(obj["shape"][0], obj["shape"][1])
    return FpMatrix.from_dense(rows, p=p)


def _payload_bytes(payload) -> bytes:
    return json.dumps(payload, separators=(",", ":"), sort_keys=True).encode()


def cache_store(cache_dir, key: str, payload: dict) -> str:
    os.makedirs(cache_dir, exist_ok=True)
    body = _payload_bytes(payload)
    entry = {
        "schema_version": SCHEMA_VERSION,
        "checksum": hashlib.sha256(body).hexdigest(),
        "payload": payload,
    }
    path = os.path.join(cache_dir, key)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(entry, fh, separators=(",", ":"), sort_keys=True)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def cache_load(cache_dir, key: str):
    """Payload dict, or None on miss/corruption (corruption warns)."""
    path = os.path.join(cache_dir, key)
    if not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            entry = json.load(fh)
        if entry.get("schema_version") != SCHEMA_VERSION:
            return None
        body = _payload_bytes(entry["payload"])
        if hashlib.sha256(body).hexdigest() != entry["checksum"]:
            raise CacheCorrupt("checksum mismatch")
        return entry["payload"]
    except (CacheCorrupt, KeyError, ValueError, json.JSONDecodeError) as exc:
        warnings.warn(f"cache entry {key} is corrupt ({exc}); recomputing")
        return None


class ResolutionCache:
    """Store/load the differential matrices of a free resolution."""

    def __init__(self, cache_dir):
        self.cache_dir = cache_dir

    def store(self, R):
        key = cache_key(R.group.key, R.p, R.max_degree, "resolution")
        payload = {
            "kind": "resolution",
            "group": R.group.name,
            "prime": R.p,
            "ranks": list(R.ranks),
            "diffs": [_encode_matrix(d) for d in R.diff[1:]],
            "augmentation": _encode_matrix(R.augmentation),
        }
        gens = getattr(R, "gens", None)
        if gens is not None:
            payload["gens"] = [[list(g) for g in level] for level in gens]
        return cache_store(self.cache_dir, key, payload)

    def load(self, group, prime, max_degree):
        """Rebuild a resolution from a cached payload, or None."""
        from .resolution import FreeResolution

        key = cache_key(group.key, prime, max_degree, "resolution")
        payload = cache_load(self.cache_dir, key)
        if payload is None:
            return None
        diffs = [_decode_matrix(obj, prime) for obj in payload["diffs"]]
        aug = _decode_matrix(payload["augmentation"], prime)
        # cheap structural re-check: consecutive differentials compose to 0
        for k in range(len(diffs) - 1):
            if not (diffs[k + 1] @ diffs[k]).is_zero():
                warnings.warn(
                    f"cached resolution for {group.name} fails d.d = 0; "
                    "recomputing")
                return None
        if not (diffs[0] @ aug).is_zero():
            warnings.warn(
                f"cached resolution for {group.name} fails d then "
                "augmentation = 0; recomputing")
            return None
        R = FreeResolution(group, prime, payload["ranks"],
                           [None] + diffs, aug)
        if "gens" in payload:
            R.gens = [[tuple(g) for g in level] for level in payload["gens"]]
        return R


class CohomologyBasisCache:
    """Store/load the canonical basis cocycles of one cohomology group."""

    def __init__(self, cache_dir):
        self.cache_dir = cache_dir

    def _key(self, group_key, module_key, prime, r):
        return cache_key(f"{group_key}|{module_key}|r{r}", prime, r,
                         "cohomology")

    def store(self, group_key, module_key, H):
        key = self._key(group_key, module_key, H.module.p, H.degree)
        payload = {
            "kind": "cohomology",
            "degree": H.degree,
            "dim": H.dim,
            "basis": [_encode_matrix(b) for b in H.basis],
        }
        return cache_store(self.cache_dir, key, payload)

    def load(self, group_key, module_key, prime, r):
        payload = cache_load(self.cache_dir,
                             self._key(group_key, module_key, prime, r))
        if payload is None:
            return None
        return [_decode_matrix(obj, prime) for obj in payload["basis"]]


def resolve_cache_dir(flag_value=None, config=None):
    """Precedence: command-line flag, then COHOMTC_CACHE_DIR, then the
    cache_dir key of cohomtc.cfg, then None (no caching)."""
    if flag_value:
        return flag_value
    env = os.environ.get(ENV_VAR)
    if env:
        return env
    if config and config.get("cache_dir"):
        return config["cache_dir"]
    return None
