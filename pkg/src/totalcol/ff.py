"""Prime field Z_p arithmetic and modulus selection."""

from __future__ import annotations

from enum import Enum


class NotPrime(ValueError):
    pass


class PrimeSource(str, Enum):
    BOUND = "bound"
    OVERRIDE = "override"


class Prime(int):
    """A prime modulus tagged with how it was chosen.

    Behaves as a plain ``int`` everywhere; ``source`` records whether it is
    the smallest prime above ``m^2 (2*delta + 2)`` or a user override, and
    ``bound`` keeps that threshold so reports can flag scaled runs.
    """

    source: PrimeSource
    bound: int | None

    def __new__(cls, value: int, source: PrimeSource = PrimeSource.OVERRIDE, bound: int | None = None):
        if not is_prime(value):
            raise NotPrime(f"{value} is not prime")
        obj = super().__new__(cls, value)
        obj.source = PrimeSource(source)
        obj.bound = bound
        return obj

    @property
    def below_bound(self) -> bool:
        return self.bound is not None and int(self) < self.bound

    def __repr__(self) -> str:
        return f"Prime({int(self)}, {self.source.value})"

    def __reduce__(self):
        return (Prime, (int(self), self.source, self.bound))


def is_prime(n: int) -> bool:
    """Deterministic trial division; moduli here stay well below 10^9."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    k = 5
    while k * k <= n:
        if n % k == 0 or n % (k + 2) == 0:
            return False
        k += 6
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


def size_bound(m: int, delta: int) -> int:
    return m * m * (2 * delta + 2)


def select_prime(m: int, delta: int, override: int | None = None) -> Prime:
    """Pick the field size for a graph with ``m`` edges and max degree ``delta``.

    Without ``override`` this is the smallest prime >= m^2 (2 delta + 2).
    An override is accepted as long as it is prime; callers check
    ``Prime.below_bound`` and warn.
    """
    if m < 1 or delta < 1:
        raise ValueError(f"need m >= 1 and delta >= 1, got m={m}, delta={delta}")
    bound = size_bound(m, delta)
    if override is not None:
        if override < 1 or not is_prime(override):
            raise NotPrime(f"override {override} is not prime")
        return Prime(override, PrimeSource.OVERRIDE, bound)
    return Prime(next_prime(bound), PrimeSource.BOUND, bound)


def pow_mod(a: int, k: int, p: int) -> int:
    """a^k mod p by square-and-multiply."""
    if k < 0:
        raise ValueError("negative exponent")
    result = 1 % p
    base = a % p
    while k:
        if k & 1:
            result = result * base % p
        base = base * base % p
        k >>= 1
    return result


def inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow_mod(a, p - 2, p)
