"""Outage analysis of multi-relay OFDM selection."""

from ._mcrelay import (
    SingularityError,
    cdf,
    diversity_order,
    estimate_curve,
    estimate_outage,
    invert_at,
    outage,
    pdf,
    sx,
    wilson,
)

__all__ = [
    "SingularityError",
    "cdf",
    "diversity_order",
    "estimate_curve",
    "estimate_outage",
    "invert_at",
    "outage",
    "pdf",
    "sx",
    "wilson",
]
