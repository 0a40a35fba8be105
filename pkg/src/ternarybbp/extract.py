"""Ternary digits of a base +-3^m BBP formula from an arbitrary position.

For b = sigma*3^m, t = d*m + r and scale c/e::

    frac(3^t * alpha) = frac(3^r * sum_k sum_j sigma^k c a_j 3^(m(d-k)) / (e (kn+j)^s))

Blocks k <= d are reduced exactly with modular exponentiation (the scale is
folded into the modulus e (kn+j)^s); blocks k > d are summed in fixed point
until they vanish. Every truncation is counted, so each pass knows its error
bound and only reports digits that the bound cannot flip.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from typing import NamedTuple

import gmpy2

from .models import BbpFormula, ExtractionRequest, ExtractionResult, ternary_exponent
from .series import split_range

logger = logging.getLogger(__name__)

# Position offset of the confirmation pass, capped by the position itself.
CONFIRM_OFFSET = 8


class ExtractionError(ValueError):
    """Digits cannot be extracted from this formula."""


class IndeterminateDigitsError(ExtractionError):
    """The error bound straddles a digit boundary; more guard digits are needed."""


class ConfirmationMismatchError(ExtractionError):
    """The confirmation pass disagrees with the primary pass."""


class _Window(NamedTuple):
    low: str
    high: str
    terms: int

    def settled(self) -> int:
        """Length of the prefix on which both error-bound readings agree."""
        n = 0
        for a, b in zip(self.low, self.high):
            if a != b:
                break
            n += 1
        return n


def working_bits(count: int, guard: int) -> int:
    return math.ceil((count + guard) * math.log2(3)) + 16


def _head_block(
    coeffs: tuple[int, ...],
    c: int,
    e: int,
    sigma: int,
    power_m: int,
    n: int,
    s: int,
    d: int,
    work_bits: int,
    k_lo: int,
    k_hi: int,
) -> tuple[int, int]:
    """Fixed-point sum mod 1 of the exact blocks k_lo <= k < k_hi, and its term count."""
    total = gmpy2.mpz(0)
    terms = 0
    nonzero = [(j, c * a) for j, a in enumerate(coeffs, start=1) if a]
    for k in range(k_lo, k_hi):
        sign = -1 if sigma < 0 and k % 2 else 1
        for j, ca in nonzero:
            modulus = e * (k * n + j) ** s
            residue = (sign * ca * gmpy2.powmod(power_m, d - k, modulus)) % modulus
            total += (residue << work_bits) // modulus
            terms += 1
    return int(total % (1 << work_bits)), terms


def _tail(
    coeffs: tuple[int, ...],
    c: int,
    e: int,
    sigma: int,
    power_m: int,
    n: int,
    s: int,
    d: int,
    work_bits: int,
) -> tuple[int, int]:
    """Fixed-point sum of blocks k > d until a block falls below 2**-(work_bits+8)."""
    weight = sum(abs(c * a) for a in coeffs)
    total = 0
    terms = 0
    k = d + 1
    denom3 = power_m
    while weight << (work_bits + 8) >= e * denom3:
        sign = -1 if sigma < 0 and k % 2 else 1
        for j, a in enumerate(coeffs, start=1):
            if a:
                num = (sign * c * a) << work_bits
                den = e * (k * n + j) ** s * denom3
                total += num // den if num >= 0 else -((-num) // den)
                terms += 1
        k += 1
        denom3 *= power_m
    return total, terms


def _pass(f: BbpFormula, position: int, digits: int, work_bits: int, workers: int) -> _Window:
    m = ternary_exponent(f.base_b)
    if m is None:
        raise ExtractionError(f"base {f.base_b} is not +-3^m; ternary digits cannot be extracted")
    sigma = 1 if f.base_b > 0 else -1
    d, r = divmod(position, m)
    c, e = f.scale.numerator, f.scale.denominator
    args = (f.coeffs, c, e, sigma, 3**m, f.length_n, f.degree_s, d, work_bits)

    if workers > 1:
        blocks = split_range(0, d + 1, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_head_block, *args, lo, hi) for lo, hi in blocks]
            parts = [fut.result() for fut in futures]
    else:
        parts = [_head_block(*args, 0, d + 1)]
    tail, tail_terms = _tail(*args)

    one = 1 << work_bits
    x = (sum(p for p, _ in parts) + tail) % one
    terms = sum(t for _, t in parts) + tail_terms
    # one ulp per truncated term, one for the dropped tail, one for the final product
    eps = (terms + 1) * 3**r + 1
    x = (x * 3**r) % one

    def read(v: int) -> str:
        return gmpy2.mpz((v % one) * 3**digits >> work_bits).digits(3).zfill(digits)

    return _Window(read(x - eps), read(x + eps), terms)


def _run(req: ExtractionRequest, workers: int) -> ExtractionResult:
    f, t, count, guard = req.formula, req.position, req.count, req.guard
    start = time.perf_counter()
    primary = _pass(f, t, count + guard, working_bits(count, guard), workers)
    settled = primary.settled()
    if settled <= count:
        raise IndeterminateDigitsError(
            f"digits at position {t} are indeterminate (only {settled} of {count} settled); "
            f"increase guard beyond {guard}"
        )
    digits = primary.low[:settled]
    margin = settled - count

    offset = min(t, CONFIRM_OFFSET)
    if offset:
        confirm = _pass(f, t - offset, count + offset + guard, working_bits(count + offset, guard), workers)
        shared = min(confirm.settled() - offset, settled)
        if shared <= 0:
            raise IndeterminateDigitsError(
                f"confirmation pass at position {t - offset} settled no shared digits; increase guard"
            )
        if confirm.low[offset : offset + shared] != digits[:shared]:
            raise ConfirmationMismatchError(
                f"position {t}: primary {digits[:shared]} vs confirmation "
                f"{confirm.low[offset : offset + shared]}"
            )
        margin = shared - count
        if margin < 1:
            raise IndeterminateDigitsError(
                f"confirmation pass at position {t - offset} agrees on only {shared} of {count} digits; "
                f"increase guard beyond {guard}"
            )
    logger.info(
        "Extracted %d digits at position %d with %d terms in %.3fs",
        count, t, primary.terms, time.perf_counter() - start,
    )
    return ExtractionResult(
        digits=digits[:count],
        position=t,
        confidence_margin=margin,
        terms_used=primary.terms,
    )


def extract(req: ExtractionRequest) -> ExtractionResult:
    """``req.count`` ternary digits starting at fractional position ``req.position``."""
    return _run(req, 1)


def extract_parallel(req: ExtractionRequest, workers: int) -> ExtractionResult:
    """Same digits as extract; the exact blocks are split over a process pool."""
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    return _run(req, workers)
