import json

import pytest

from centroid_sections import RunConfig, get_context, run_construction


@pytest.fixture(scope="session")
def ctx5():
    """Shared default-parameter construction context (n=5, auto a)."""
    return get_context(RunConfig())


@pytest.fixture(scope="session")
def construct_result(ctx5):
    """One full default construction run shared across tests."""
    return run_construction(RunConfig())


@pytest.fixture(scope="session")
def cert5(construct_result):
    return construct_result["certificate"]


@pytest.fixture(scope="session")
def cli_outdir(tmp_path_factory):
    """Default cmd_construct output tree, produced once via the CLI."""
    from centroid_sections import cli

    out = tmp_path_factory.mktemp("construct")
    rc = cli.main(["construct", "--outdir", str(out)])
    assert rc == 0, "default construct must succeed"
    assert json.loads((out / "certificate.json").read_text())["valid"]
    return out
