"""On-disk cache: integrity, atomic layout, directory resolution."""

import json
import os
import warnings

import pytest

from cohomtc.cache import (
    ENV_VAR,
    CohomologyBasisCache,
    ResolutionCache,
    cache_key,
    cache_load,
    cache_store,
    resolve_cache_dir,
)
from cohomtc.groups import make_cyclic, make_quaternion
from cohomtc.workspace import Workspace


def test_cache_key_is_stable_and_distinct():
    k1 = cache_key("G", 2, 8, "resolution")
    assert k1 == cache_key("G", 2, 8, "resolution")
    assert k1 != cache_key("G", 2, 7, "resolution")
    assert k1 != cache_key("G", 2, 8, "cohomology")
    assert len(k1) == 64 and all(c in "0123456789abcdef" for c in k1)


def test_store_load_roundtrip(tmp_path):
    payload = {"kind": "test", "rows": [[1, 0], [0, 1]]}
    key = cache_key("toy", 2, 1, "test")
    path = cache_store(str(tmp_path), key, payload)
    assert os.path.basename(path) == key
    assert cache_load(str(tmp_path), key) == payload
    # no stray temp files remain
    assert [f for f in os.listdir(tmp_path) if f.startswith(".tmp-")] == []


def test_missing_entry_is_none(tmp_path):
    assert cache_load(str(tmp_path), cache_key("no", 2, 1, "test")) is None


def test_corrupt_entry_warns_and_misses(tmp_path):
    key = cache_key("toy", 2, 1, "test")
    path = cache_store(str(tmp_path), key, {"kind": "test", "v": 1})
    blob = bytearray(open(path, "rb").read())
    blob[len(blob) // 2] ^= 1
    open(path, "wb").write(bytes(blob))
    with pytest.warns(UserWarning, match="corrupt"):
        assert cache_load(str(tmp_path), key) is None


def test_schema_version_skew_misses(tmp_path):
    key = cache_key("toy", 2, 1, "test")
    path = cache_store(str(tmp_path), key, {"kind": "test", "v": 1})
    entry = json.load(open(path))
    entry["schema_version"] = 999
    json.dump(entry, open(path, "w"))
    with warnings.catch_warnings():
        warnings.simplefilter("error")  # a version miss is silent
        assert cache_load(str(tmp_path), key) is None


def test_resolution_roundtrip(tmp_path):
    ws = Workspace(cache_dir=str(tmp_path))
    Q = make_quaternion(1)
    R = ws.res(Q)
    cache = ResolutionCache(str(tmp_path))
    R2 = cache.load(Q, 2, R.max_degree)
    assert R2 is not None
    assert list(R2.ranks) == list(R.ranks)
    assert all(R2.diff[n] == R.diff[n] for n in range(1, R.max_degree + 1))
    assert R2.augmentation == R.augmentation
    R2.verify()


def test_resolution_gens_metadata_roundtrip(tmp_path):
    """Tensor resolutions carry generator-split metadata that must
    survive the cache (cup products over product groups need it)."""
    ws = Workspace(cache_dir=str(tmp_path))
    P = ws.square(make_cyclic(2))
    R = ws.res(P)
    assert getattr(R, "gens", None) is not None
    cache = ResolutionCache(str(tmp_path))
    R2 = cache.load(P, 2, R.max_degree)
    assert R2.gens == R.gens


def test_warm_workspace_reuses_cache(tmp_path):
    ws1 = Workspace(cache_dir=str(tmp_path))
    Q = make_quaternion(2)
    R1 = ws1.res(Q)
    before = sorted(os.listdir(tmp_path))
    ws2 = Workspace(cache_dir=str(tmp_path))
    R2 = ws2.res(Q)
    assert sorted(os.listdir(tmp_path)) == before  # nothing rewritten
    assert all(R1.diff[n] == R2.diff[n] for n in range(1, R1.max_degree + 1))


def test_cohomology_basis_cache_roundtrip(tmp_path):
    ws = Workspace()
    Q = make_quaternion(1)
    H = ws.cohomology(Q, ws.trivial(Q), 2)
    cache = CohomologyBasisCache(str(tmp_path))
    cache.store(Q.key, ws.trivial(Q).key, H)
    basis = cache.load(Q.key, ws.trivial(Q).key, 2, H.degree)
    assert basis is not None
    assert len(basis) == H.dim
    assert all(basis[i] == H.basis[i] for i in range(H.dim))


def test_resolve_cache_dir_precedence(monkeypatch):
    monkeypatch.delenv(ENV_VAR, raising=False)
    assert resolve_cache_dir(None, {}) is None
    assert resolve_cache_dir(None, {"cache_dir": "cfg"}) == "cfg"
    monkeypatch.setenv(ENV_VAR, "env")
    assert resolve_cache_dir(None, {"cache_dir": "cfg"}) == "env"
    assert resolve_cache_dir("flag", {"cache_dir": "cfg"}) == "flag"
