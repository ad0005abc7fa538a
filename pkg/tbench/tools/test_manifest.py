#
# SP Few-Shot - Run Manifest Tests
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

import json
from pathlib import Path

import pytest

from sp_fewshot import __version__
from sp_fewshot.common.config import Mechanism
from sp_fewshot.common.errors import ParseError
from sp_fewshot.tools.manifest import MANIFEST_NAME, RunManifest, read_manifest, write_manifest


def test_round_trip_into_directory(tmp_path):
    m = RunManifest(
        command="eval",
        params={"ways": 5, "out": Path("runs/x"), "layers": (1, 2)},
        seed=4,
        config={"eval": {"mechanism": Mechanism.CI}},
        artifacts={"report": "runs/x/report.txt"},
    )
    path = write_manifest(tmp_path / "run", m)
    assert path == tmp_path / "run" / MANIFEST_NAME

    back = read_manifest(tmp_path / "run")
    assert back.command == "eval" and back.seed == 4
    assert back.params == {"ways": 5, "out": "runs/x", "layers": [1, 2]}
    assert back.config == {"eval": {"mechanism": "ci"}}
    assert back.version == __version__


def test_explicit_json_path(tmp_path):
    path = write_manifest(tmp_path / "heat.manifest.json", RunManifest("attention", {}))
    assert path.name == "heat.manifest.json"
    assert read_manifest(path).command == "attention"


@pytest.mark.parametrize("data", [
    {"format": 99, "command": "eval", "params": {}},
    {"format": 1, "params": {}},
    {"format": 1, "command": "eval", "params": 3},
])
def test_bad_manifests(tmp_path, data):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(data))
    with pytest.raises(ParseError):
        read_manifest(path)


def test_unreadable_manifest(tmp_path):
    with pytest.raises(ParseError):
        read_manifest(tmp_path / "missing.json")
    path = tmp_path / "broken.json"
    path.write_text('{\n  "format": 1,\n  oops\n}')
    with pytest.raises(ParseError) as e:
        read_manifest(path)
    assert e.value.line_number == 3
