"""Contains errors and warnings for domclust."""
from warnings import warn


class DomclustInputError(ValueError):
    """Invalid user input. The CLI reports these with exit status 1."""

    stage: str = "input"


class EmbeddingFormatError(DomclustInputError):
    """An embedding file or an in-memory embedding set violates its contract."""

    stage = "parse"


class ClusteringFormatError(DomclustInputError):
    """A clustering or external assignment file cannot be used."""

    stage = "parse"


class AffinityError(DomclustInputError):
    """An affinity matrix cannot be built or is not a valid affinity matrix."""

    stage = "affinity"


class LabelingError(DomclustInputError):
    """Clusters cannot be mapped to ground-truth labels."""

    stage = "labeling"


class DisconnectedGraphError(ValueError):
    """The graph has no edges, so ``xᵀAx = 0`` at the barycenter."""

    stage = "solver"


class SolverError(RuntimeError):
    """The replicator dynamics produced non-finite values."""

    stage = "solver"


class EigensolverError(RuntimeError):
    """The Jacobi eigensolver did not converge within its sweep cap."""

    stage = "solver"


class InvariantViolation(AssertionError):
    """An internal invariant does not hold. The CLI exits with status 2."""

    stage = "internal"


class ConvergenceWarning(UserWarning):
    """An iterative solver stopped at its iteration cap."""


def warn_if_not_converged(
    converged: bool, iterations: int, what: str, raise_error: bool = False
) -> None:
    """Report a solver run that hit its iteration cap.

    Args:
        converged: Whether the solver met its stopping criterion.
        iterations: Number of iterations that were carried out.
        what: Description of the solver run, used in the message.
        raise_error: Whether to raise an error, alternatively warn.
            Default: ``False``.

    Raises:
        SolverError: if the run did not converge and ``raise_error`` is set
    """
    if not converged:
        message = (
            f"{what} did not converge within {iterations} iterations. "
            "Continuing with the last iterate."
        )
        if raise_error:
            raise SolverError(message)
        else:
            warn(message, ConvergenceWarning)
