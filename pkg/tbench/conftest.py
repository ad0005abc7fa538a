#
# SP Few-Shot - Shared Fixtures
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#

import pytest

from sp_fewshot.data.dataset import save_dataset
from sp_fewshot.data.embeddings import save_embeddings

from tbench.common.randomizer import ShapeRandomizer
from tbench.common.toy import tiny_dataset, tiny_embeddings, toy_model


@pytest.fixture
def rand(request):
    """Seeded randomizer; the seed is the test's node id hash so failures reproduce."""
    seed = sum(request.node.nodeid.encode()) & 0xFFFF
    return ShapeRandomizer(seed=seed)


@pytest.fixture(scope="session")
def tiny_ds():
    return tiny_dataset()


@pytest.fixture(scope="session")
def tiny_table(tiny_ds):
    return tiny_embeddings(tiny_ds)


@pytest.fixture
def model():
    """Fresh BOTH-mechanism toy model injected at the last layer."""
    return toy_model()


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory, tiny_ds, tiny_table):
    """tiny_ds and its embeddings written to disk."""
    root = tmp_path_factory.mktemp("tiny_data")
    save_dataset(tiny_ds, root)
    save_embeddings(tiny_table, root / "embeddings.txt")
    return root
