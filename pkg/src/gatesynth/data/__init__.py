"""Bundled example models, requirement files, and configurations.

The office is the small walkthrough model: five spaces, five controlled
doors, five requirements. The firm is the larger benchmark: twenty
spaces, forty-one controlled doors, ten requirements.
"""

from importlib import resources

OFFICE_MODEL = "office.json"
OFFICE_REQUIREMENTS = "office.rules"
OFFICE_REQUIREMENTS_SAFE = "office_safe.rules"   # adds the keep-moving line
OFFICE_PUBLISHED_CONFIG = "office_published.config.json"
FIRM_MODEL = "firm.json"
FIRM_REQUIREMENTS = "firm.rules"


def path(name: str) -> str:
    """Filesystem path of a bundled data file."""
    return str(resources.files(__name__).joinpath(name))
