"""BBP and polylogarithm series evaluation, and the multisection engine.

Multisection turns ``part(Li_s(p e^{i pi m/d}))`` for p = 1/sqrt(3) or 1/3 into
an integer-coefficient BBP table. Weights ``p^k trig(k x)`` are kept exact as
``(rational, carries sqrt3)`` pairs; the sqrt3 factor must be common to every
nonzero weight and is returned separately as the radical.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Literal, Sequence

from . import hp
from .hp import BigComplex, BigReal, trunc_div, trig_pi6
from .models import BbpFormula, EvalReport, Part, PolylogPoint, Radical
from .notation import formula_from_terms

logger = logging.getLogger(__name__)

# Extra bits beyond the requested precision when choosing the term count.
GUARD_BITS = 32

MAX_DIRECT_MODULUS = Fraction(99, 100)


class SeriesError(ValueError):
    """A series cannot be evaluated as requested."""


class MultisectionError(ValueError):
    """The point or requested layout is outside the supported classes."""


# ---------------------------------------------------------------------------
# BBP evaluation
# ---------------------------------------------------------------------------


def terms_needed(base: int, prec_bits: int) -> int:
    return max(1, math.ceil((prec_bits + GUARD_BITS) / math.log2(abs(base))))


def split_range(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    """Contiguous, possibly empty, blocks covering [lo, hi)."""
    size = max(0, hi - lo)
    bounds = [lo + size * i // parts for i in range(parts + 1)]
    return list(zip(bounds[:-1], bounds[1:]))


def _bbp_block(
    coeffs: tuple[int, ...],
    degree: int,
    base: int,
    length: int,
    scale_bits: int,
    k_lo: int,
    k_hi: int,
) -> int:
    """Fixed-point sum of blocks k_lo <= k < k_hi, each term truncated."""
    mag = abs(base)
    bk = mag**k_lo
    total = 0
    for k in range(k_lo, k_hi):
        acc = 0
        for j, a in enumerate(coeffs, start=1):
            if a:
                acc += trunc_div(a << scale_bits, (k * length + j) ** degree * bk)
        total += -acc if base < 0 and k % 2 else acc
        bk *= mag
    return total


def _ceil_fixed(q: Fraction, scale_bits: int) -> BigReal:
    return BigReal(-((-q.numerator << scale_bits) // q.denominator), scale_bits)


def eval_bbp(
    f: BbpFormula,
    prec_bits: int,
    *,
    workers: int = 1,
    terms: int | None = None,
) -> EvalReport:
    """Truncated sum of f with a rigorous bound on the omitted tail.

    ``terms`` overrides the block count K; ``workers`` > 1 sums contiguous
    k-ranges in a process pool. Every term is truncated on its own, so the
    result does not depend on the partition.
    """
    K = terms if terms is not None else terms_needed(f.base_b, prec_bits)
    scale_bits = prec_bits + 8 + (K * f.length_n).bit_length()
    args = (f.coeffs, f.degree_s, f.base_b, f.length_n, scale_bits)

    if workers > 1 and K > 1:
        blocks = split_range(0, K, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_bbp_block, *args, lo, hi) for lo, hi in blocks]
            total = sum(fut.result() for fut in futures)
    else:
        total = _bbp_block(*args, 0, K)

    value = BigReal(total, scale_bits, prec_bits) * f.scale
    mag = abs(f.base_b)
    tail = abs(f.scale) * sum(abs(a) for a in f.coeffs) * Fraction(mag, (mag - 1) * mag**K)
    logger.debug(
        "eval_bbp s=%d b=%d n=%d: K=%d at %d bits, tail <= %.3e",
        f.degree_s, f.base_b, f.length_n, K, scale_bits, float(tail),
    )
    return EvalReport(value=value, terms_used=K, tail_bound=_ceil_fixed(tail, scale_bits))


# ---------------------------------------------------------------------------
# Polylogarithm series
# ---------------------------------------------------------------------------


def point_value(pt: PolylogPoint, prec_bits: int) -> BigComplex:
    """z = (1/sqrt(q)) e^{i pi m/d} for angles that are multiples of pi/6."""
    if (6 * pt.angle_m) % pt.angle_d:
        raise SeriesError(f"angle pi*{pt.angle_m}/{pt.angle_d} is not a multiple of pi/6")
    t = 6 * pt.angle_m // pt.angle_d
    w = prec_bits + 16
    sqrt3 = hp.sqrt(BigReal.from_int(3), w).at_scale(w)
    inv_sqrt_q = hp.div(BigReal.from_int(1, w), hp.sqrt(BigReal.from_int(pt.modulus_q), w), w)

    def component(kind: Literal["cos", "sin"]) -> BigReal:
        r, root = trig_pi6(t, kind)
        if pt.modulus_q == 3 and root:
            return BigReal.from_fraction(r, w)
        base = sqrt3 * r if root else BigReal.from_fraction(r, w)
        return base * inv_sqrt_q

    return BigComplex(component("cos"), component("sin"))


def polylog_series(z: BigComplex, s: int, prec_bits: int) -> BigComplex:
    """Li_s(z) = sum z^k / k^s by direct summation, for |z| <= 0.99."""
    if s < 1:
        raise SeriesError(f"degree must be positive, got {s}")
    mod2 = z.abs_squared().to_fraction()
    if mod2 > MAX_DIRECT_MODULUS**2:
        raise SeriesError(
            f"|z| = {math.sqrt(float(mod2)):.6f} is too close to 1 for the direct series; "
            "use the oracle's Hurwitz-zeta route for unit-circle values"
        )
    if mod2 == 0:
        return BigComplex.zero(prec_bits)
    r = min(float(MAX_DIRECT_MODULUS), math.sqrt(float(mod2)) + 1e-9)
    K = math.ceil((prec_bits + 8 + math.log2(1 / (1 - r))) / -math.log2(r)) + 1
    w = prec_bits + 16 + K.bit_length()
    zw = BigComplex(z.re.at_scale(w), z.im.at_scale(w))

    total = BigComplex.zero(w)
    power = zw
    for k in range(1, K + 1):
        total = total + power * Fraction(1, k**s)
        power = power * zw
    logger.debug("polylog_series s=%d: %d terms at %d bits", s, K, w)
    return total


def polylog_part(pt: PolylogPoint, part: Part, prec_bits: int) -> BigReal:
    """Re or Im of Li_s at the point, s taken from the point."""
    value = polylog_series(point_value(pt, prec_bits + 16), pt.degree_s, prec_bits)
    return value.re if part is Part.RE else value.im


# ---------------------------------------------------------------------------
# Multisection
# ---------------------------------------------------------------------------

Surd = tuple[Fraction, bool]


def _check_supported(pt: PolylogPoint) -> None:
    if pt.modulus_q == 3:
        if pt.angle_d not in (1, 2, 3, 6):
            raise MultisectionError(
                f"angle pi*{pt.angle_m}/{pt.angle_d}: modulus 1/sqrt(3) needs d in {{1,2,3,6}}"
            )
    elif pt.modulus_q == 9:
        if pt.angle_d != 1:
            raise MultisectionError(
                f"angle pi*{pt.angle_m}/{pt.angle_d}: modulus 1/3 supports angles 0 and pi only"
            )
    else:
        raise MultisectionError(
            f"modulus 1/sqrt({pt.modulus_q}) unsupported; use 1/sqrt(3) or 1/3"
        )


def series_weight(pt: PolylogPoint, part: Part, k: int) -> Surd:
    """p^k * cos(kx) (Re) or p^k * sin(kx) (Im), exactly."""
    t = 6 * pt.angle_m * k // pt.angle_d
    r, root = trig_pi6(t, "cos" if part is Part.RE else "sin")
    if pt.modulus_q == 9:
        return (r / 3**k, root)
    r = r / 3 ** ((k + 1) // 2)
    if k % 2 and root:
        return (r * 3, False)
    return (r, bool(k % 2) or root)


def _period_ratio(weights: Sequence[Surd], period: int, check: int) -> Fraction | None:
    """c with w[k+period] = c*w[k] for 1 <= k <= check, if one exists."""
    ratio: Fraction | None = None
    for k in range(1, check + 1):
        (r0, root0), (r1, root1) = weights[k], weights[k + period]
        if r0 == 0 or r1 == 0:
            if r0 != r1:
                return None
            continue
        if root0 != root1:
            return None
        c = r1 / r0
        if ratio is None:
            ratio = c
        elif c != ratio:
            return None
    return ratio


def _ratio_base(ratio: Fraction | None) -> int | None:
    if not ratio:
        return None
    inv = 1 / ratio
    return int(inv) if inv.denominator == 1 and abs(inv) >= 2 else None


def _natural_base(pt: PolylogPoint) -> int:
    return (3 if pt.modulus_q == 3 else 9) ** pt.angle_d


def multisect(
    pt: PolylogPoint,
    part: Part,
    *,
    base: int | None = None,
    length: int | None = None,
) -> tuple[BbpFormula, Radical]:
    """BBP form of part(Li_s(pt)): ``part = radical * value(formula)``.

    Without a layout the natural period L = 2d is used, switching to the
    negative base over L/2 when the second half of the period is the first
    half negated and rescaled. An explicit ``base``/``length`` is honoured
    exactly, spreading the natural block when ``length`` is a multiple of it.
    """
    _check_supported(pt)
    if (base is None) != (length is None):
        raise MultisectionError("an explicit layout needs both base and length")
    if base is not None and length is not None and (abs(base) < 2 or length < 1):
        raise MultisectionError(f"invalid layout base={base}, length={length}")

    s = pt.degree_s
    natural = 2 * pt.angle_d
    span = max(natural, length or 0)
    weights: list[Surd] = [(Fraction(0), False)] + [
        series_weight(pt, part, k) for k in range(1, 2 * span + 1)
    ]

    roots = {root for r, root in weights[1:] if r != 0}
    if not roots:
        n = length or natural
        b = base or _natural_base(pt)
        return BbpFormula(scale=1, degree_s=s, base_b=b, length_n=n, coeffs=(0,) * n), Radical.ONE
    if len(roots) > 1:
        raise MultisectionError(
            f"{part.value} Li{s} at this point mixes rational and sqrt3 weights"
        )
    radical = Radical.SQRT3 if roots == {True} else Radical.ONE

    if base is None or length is None:
        half = _period_ratio(weights, natural // 2, natural)
        if half is not None and half < 0 and _ratio_base(half) is not None:
            block, base = natural // 2, _ratio_base(half)
        else:
            block, base = natural, _ratio_base(_period_ratio(weights, natural, natural))
        if base is None:
            raise MultisectionError(f"no integer base for {part.value} Li{s} at this point")
        spread = 1
    else:
        target = Fraction(1, base)
        candidates = [
            L
            for L in range(1, length + 1)
            if length % L == 0 and _period_ratio(weights, L, max(L, natural)) == target
        ]
        if not candidates:
            raise MultisectionError(
                f"{part.value} Li{s} at modulus 1/sqrt({pt.modulus_q}), "
                f"angle pi*{pt.angle_m}/{pt.angle_d} has no base-{base} length-{length} form"
            )
        block = candidates[0]
        spread = length // block

    vector = [Fraction(0)] * (block * spread)
    for j in range(1, block + 1):
        vector[spread * j - 1] = weights[j][0] * spread**s
    formula = formula_from_terms((s, base, block * spread), vector)
    logger.debug(
        "multisect %s Li%d [q=%d, %d/%d]: base %d length %d",
        part.value, s, pt.modulus_q, pt.angle_m, pt.angle_d, base, block * spread,
    )
    return formula, radical
