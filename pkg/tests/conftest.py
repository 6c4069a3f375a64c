from __future__ import annotations

import pytest

from clca.io import load_project


@pytest.fixture(scope="session")
def project():
    return load_project("paris-2019")


@pytest.fixture(scope="session")
def study(project):
    return project.study()


@pytest.fixture(scope="session")
def report(study):
    return study.assess()
