import os
import shutil
import subprocess
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[2]


def packbench_cli():
    explicit = os.environ.get("PACKBENCH_CLI")
    if explicit:
        return explicit
    local = ROOT / "build" / "tools" / "packbench"
    if local.exists():
        return str(local)
    found = shutil.which("packbench")
    if not found:
        pytest.skip("packbench CLI not found; set PACKBENCH_CLI")
    return found


@pytest.fixture(scope="session")
def dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("ds")
    subprocess.run(
        [packbench_cli(), "evolve", "--packs", "5", "--pool-size", "6", "--population", "8",
         "--generations", "5", "--seed", "4", "--out", str(out)],
        check=True, capture_output=True,
    )
    return str(out / "dataset.jsonl")
