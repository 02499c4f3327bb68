"""Default hooks of the iterative solvers and the sweep."""


def no_op(*args, **kwargs):
    """Hook that ignores the solver state it is called with.

    Args:
        *args: positional hook arguments, e.g. ``(iteration, x, payoff)``
        **kwargs: keyword hook arguments
    """
    pass
