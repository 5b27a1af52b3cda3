import pytest

from gatesynth import data
from gatesynth.formulas import (
    BOOLEAN, ENUM, RESOURCE, SUBJECT, AttributeDecl, AttributeSignature,
)
from gatesynth.model import ResourceStructure, load_config, load_model
from gatesynth.rules import parse_requirements


@pytest.fixture(scope="session")
def office():
    return load_model(data.path(data.OFFICE_MODEL))


@pytest.fixture(scope="session")
def office_reqs(office):
    with open(data.path(data.OFFICE_REQUIREMENTS)) as fh:
        return parse_requirements(fh.read(), office.sig)


@pytest.fixture(scope="session")
def office_safe_reqs(office):
    with open(data.path(data.OFFICE_REQUIREMENTS_SAFE)) as fh:
        return parse_requirements(fh.read(), office.sig)


@pytest.fixture(scope="session")
def office_published(office):
    return load_config(data.path(data.OFFICE_PUBLISHED_CONFIG), office)


@pytest.fixture(scope="session")
def firm():
    return load_model(data.path(data.FIRM_MODEL))


@pytest.fixture(scope="session")
def firm_reqs(firm):
    with open(data.path(data.FIRM_REQUIREMENTS)) as fh:
        return parse_requirements(fh.read(), firm.sig)


@pytest.fixture(scope="session")
def triangle():
    """Three spaces, five controlled doors, one secured space.

    The smallest structure on which the until encodings produce
    non-trivial guard formulas: out -> cor -> bur plus the shortcut
    out -> bur and the two return doors.
    """
    sig = AttributeSignature([
        AttributeDecl("role", SUBJECT, ENUM, ("employee", "visitor")),
        AttributeDecl("id", RESOURCE, ENUM, ("out", "cor", "bur")),
        AttributeDecl("sec_zone", RESOURCE, BOOLEAN),
    ])
    labels = {
        "out": {"id": "out", "sec_zone": False},
        "cor": {"id": "cor", "sec_zone": False},
        "bur": {"id": "bur", "sec_zone": True},
    }
    edges = {
        ("out", "cor"): None,
        ("cor", "bur"): None,
        ("out", "bur"): None,
        ("cor", "out"): None,
        ("bur", "cor"): None,
    }
    S = ResourceStructure(sig, "out", labels, edges)
    S.validate()
    return S
