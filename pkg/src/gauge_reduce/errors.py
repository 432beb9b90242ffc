"""Exception types shared across the package."""


class GaugeReduceError(Exception):
    """Base class for all package errors."""


class DimensionError(GaugeReduceError, ValueError):
    """Array or index set has the wrong size for the requested operation."""


class MembershipError(GaugeReduceError, ValueError):
    """A matrix failed a group (or subgroup) membership test."""


class ChartDomainError(GaugeReduceError, ValueError):
    """A coset point lies outside every usable section chart."""


class StructureError(GaugeReduceError, ValueError):
    """Atlas or field data is internally inconsistent (missing overlaps, bad cover)."""


class AtlasMismatchError(GaugeReduceError, ValueError):
    """Two fields tagged with different atlases were combined without re-gauging."""


class UnsupportedModelError(GaugeReduceError, ValueError):
    """Operation requires a hypothesis the group model does not satisfy."""


class ModelInconsistencyError(GaugeReduceError, ValueError):
    """A derived quantity violated a structural guarantee (wrong section/chart bookkeeping)."""


class UsageError(GaugeReduceError, ValueError):
    """Bad configuration: unknown scenario, unknown group, malformed option."""
