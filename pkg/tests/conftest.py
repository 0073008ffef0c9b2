import os

import pytest

from qsk.synthesis import DEFAULT_GATE_SET, cached_build_net


@pytest.fixture(scope="session")
def net_cache_dir(tmp_path_factory):
    """Directory for the session's net cache; honours QSK_CACHE_DIR if set."""
    return os.environ.get("QSK_CACHE_DIR") or str(tmp_path_factory.mktemp("netcache"))


@pytest.fixture(scope="session")
def default_net(net_cache_dir):
    """The standard h-t-tdg net at length bound 10, built once per session."""
    return cached_build_net(DEFAULT_GATE_SET, 10, net_cache_dir)


@pytest.fixture()
def cli_cache_env(net_cache_dir, monkeypatch):
    """Point CLI invocations at the session net cache."""
    monkeypatch.setenv("QSK_CACHE_DIR", str(net_cache_dir))
    return net_cache_dir
