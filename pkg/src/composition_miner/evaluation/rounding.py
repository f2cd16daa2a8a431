"""Exact percentage arithmetic for reported metrics.

All scorers accumulate integer (or half-integer) counts, so percentages
are computed as exact fractions and rounded half-up to two decimals only
at the reporting boundary.
"""

from __future__ import annotations

from decimal import Decimal, ROUND_HALF_UP, localcontext
from fractions import Fraction


def round_half_up(value: Fraction, digits: int = 2) -> float:
    with localcontext() as ctx:
        ctx.prec = 50
        dec = Decimal(value.numerator) / Decimal(value.denominator)
        quantum = Decimal(1).scaleb(-digits)
        return float(dec.quantize(quantum, rounding=ROUND_HALF_UP))


def pct(numerator: int | Fraction, denominator: int | Fraction) -> float:
    """100 * numerator / denominator, rounded half-up to two decimals."""
    return round_half_up(Fraction(numerator) * 100 / Fraction(denominator))
