"""Random walks on finitely generated groups and the capacity of their range."""

import json

from . import _rangecap
from ._rangecap import ResourceError, ValidationError, __version__

__all__ = [
    "ResourceError",
    "ValidationError",
    "__version__",
    "capacity",
    "equilibrium",
    "green",
    "growth",
    "lattice",
    "run",
    "simulate",
]


def lattice(dim):
    """Integer lattice Z^dim with the standard generators."""
    return {"backend": "lattice", "dim": dim}


def _group(group):
    return group if isinstance(group, str) else json.dumps(group)


def simulate(group, n, seed, index=0):
    return json.loads(_rangecap.simulate(_group(group), n, seed, index))


def growth(group, rmax):
    return json.loads(_rangecap.growth(_group(group), rmax))


def green(group, target, horizon=None):
    """Green function value; exact for standard lattices when horizon is None."""
    g = json.loads(_rangecap.normalize_group(_group(group)))
    if horizon is None:
        return _rangecap.green_lattice(g["dim"], json.dumps(list(target)))
    return json.loads(_rangecap.green_truncated(_group(group), json.dumps(list(target)), horizon))


def capacity(group, elements, method="escape-mc", **options):
    """Capacity estimate of a finite set, as a dict."""
    elements = json.dumps([list(e) for e in elements])
    return json.loads(_rangecap.capacity(_group(group), elements, method, **options))


def equilibrium(group, elements, green_horizon=800):
    elements = json.dumps([list(e) for e in elements])
    return json.loads(_rangecap.equilibrium(_group(group), elements, green_horizon))


def run(*args):
    """Run a CLI subcommand in-process; returns (exit_code, stdout, stderr)."""
    return _rangecap.run([str(a) for a in args])
