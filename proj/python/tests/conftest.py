# Copyright 2026 The SalesAssist Authors
# SPDX-License-Identifier: Apache-2.0

import pytest

import salesassist


@pytest.fixture(scope="session")
def seeded_db(tmp_path_factory):
    path = tmp_path_factory.mktemp("kb") / "kb.sqlite"
    salesassist.kb_seed(str(path), seed=0)
    return str(path)
