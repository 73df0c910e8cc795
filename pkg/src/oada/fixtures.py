"""Bundled FCIDUMP fixtures with recorded reference energies.

Each file carries `# REF_HF=` / `# REF_FCI=` comment lines stamped by the
external generation tool (see tools/make_fixtures.py in the repository).
"""

from importlib import resources

__all__ = ["fixture_path", "available_fixtures"]

_PACKAGE = "oada.data"


def available_fixtures():
    out = []
    for entry in resources.files(_PACKAGE).iterdir():
        if entry.name.endswith(".fcidump"):
            out.append(entry.name[: -len(".fcidump")])
    return sorted(out)


def fixture_path(name):
    """Filesystem path of a bundled fixture, e.g. 'h2_0.7414' or 'h6_3.0'."""
    if not name.endswith(".fcidump"):
        name = name + ".fcidump"
    path = resources.files(_PACKAGE) / name
    if not path.is_file():
        raise FileNotFoundError(
            f"no bundled fixture {name!r}; available: {', '.join(available_fixtures())}")
    return str(path)
