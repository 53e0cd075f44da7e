"""coverkit: decide, verify, enumerate, and construct graph covering
projections of multigraphs with loops and semi-edges."""

from .covering import CoverMap, FiberReport, Lists, compose, fiber_report  # noqa: F401
from .covering import respects_lists, verify_cover, verify_partial_cover  # noqa: F401
from .multigraph import Edge, Multigraph, are_isomorphic  # noqa: F401
from .solver import SolveOutcome, brute_force, enumerate_covers, solve  # noqa: F401

__version__ = "0.1.0"
