"""Numerical gauge-theory kernel for structure-group reduction.

Library layout:

* :mod:`gauge_reduce.algebra`, :mod:`gauge_reduce.groups` - matrix Lie
  algebras with reductive splits and the three registered group models.
* :mod:`gauge_reduce.grid`, :mod:`gauge_reduce.atlas`,
  :mod:`gauge_reduce.fields` - discretized base torus, chart covers with
  group-valued transitions, and chart-wise field containers.
* :mod:`gauge_reduce.connection` - connection coefficients, gauge
  transforms, covariant differentials, and the h/f Cartan split.
* :mod:`gauge_reduce.reduction` - adapted (reduced) atlases, global
  section construction, vertical automorphisms.
* :mod:`gauge_reduce.composite` - matter fields over the coset bundle,
  the vertical covariant differential, and the universal connection
  solved from a gauge potential.
* :mod:`gauge_reduce.scenarios`, :mod:`gauge_reduce.cli` - the check
  registry, reports, and the ``gauge-reduce`` command line tool.
"""

from .algebra import AlgebraBasis
from .groups import GroupModel, get_group_model, list_group_models
from .grid import BaseGrid, build_grid

__all__ = [
    "AlgebraBasis",
    "GroupModel",
    "get_group_model",
    "list_group_models",
    "BaseGrid",
    "build_grid",
]
