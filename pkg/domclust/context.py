"""Context class for domclust."""


class CTX:
    """Global class holding the diagnostics state of the clustering pipeline."""

    debug: bool = False
    affinity_builds: int = 0

    @staticmethod
    def get_debug() -> bool:
        """Whether debug mode is active.

        Returns:
            whether debug mode is active
        """
        return CTX.debug

    @staticmethod
    def set_debug(debug: bool) -> None:
        """Set debug mode.

        Args:
            debug: the mode to set
        """
        CTX.debug = debug

    @staticmethod
    def count_affinity_build() -> None:
        """Record that an affinity matrix has been built from embeddings."""
        CTX.affinity_builds += 1

    @staticmethod
    def get_affinity_builds() -> int:
        """Number of affinity matrices built since the last reset.

        Returns:
            number of affinity builds
        """
        return CTX.affinity_builds

    @staticmethod
    def reset_affinity_builds() -> None:
        """Reset the affinity build counter."""
        CTX.affinity_builds = 0
