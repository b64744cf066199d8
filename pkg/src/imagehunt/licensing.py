"""Usage-rights filter labels and the matching rule between them.

Labels form a small permissiveness lattice: a commercial label implies the
corresponding noncommercial one, and a with-modification label implies the
plain-reuse one. An asset tagged with a permissive label therefore satisfies
every weaker filter.
"""

from __future__ import annotations

from enum import Enum


class LicenseFilter(Enum):
    REUSE_WITH_MODIFICATION = "reuse-with-modification"
    REUSE = "reuse"
    NONCOMMERCIAL_REUSE_WITH_MODIFICATION = "noncommercial-reuse-with-modification"
    NONCOMMERCIAL_REUSE = "noncommercial-reuse"
    NOT_FILTERED = "not-filtered-by-license"

    @property
    def label(self) -> str:
        return self.value

    @classmethod
    def from_label(cls, label: str) -> "LicenseFilter":
        try:
            return cls(label.strip().lower())
        except ValueError:
            raise ValueError(f"unknown license label: {label!r}") from None


# Rights granted by each label (beyond baseline noncommercial reuse).
_GRANTS = {
    LicenseFilter.REUSE_WITH_MODIFICATION: frozenset({"commercial", "modification"}),
    LicenseFilter.REUSE: frozenset({"commercial"}),
    LicenseFilter.NONCOMMERCIAL_REUSE_WITH_MODIFICATION: frozenset({"modification"}),
    LicenseFilter.NONCOMMERCIAL_REUSE: frozenset(),
}


def permits(asset_label: LicenseFilter | None, requested: LicenseFilter) -> bool:
    """Whether an asset carrying ``asset_label`` satisfies ``requested``.

    ``NOT_FILTERED`` matches everything, including unlabeled assets. Any
    restrictive filter matches only labeled assets whose label grants at
    least the rights the filter asks for.
    """
    if requested is LicenseFilter.NOT_FILTERED:
        return True
    if asset_label is None or asset_label is LicenseFilter.NOT_FILTERED:
        return False
    return _GRANTS[requested] <= _GRANTS[asset_label]
