"""Exact domain model for n-buyer, two-item auctions with two-point IID values.

Every number in the computational path is a fractions.Fraction: values,
probabilities, allocations, utilities, revenues.  Floats appear only in
rendered output, never in computation.

A buyer type is a 2-character string over {'a','b'}: character j says
whether the buyer's value for item j is the low value a or the high
value b.  A profile is a tuple of n such strings, buyer 0 first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

#: Per-buyer types in canonical (lexicographic) order: (a,a) < (a,b) < (b,a) < (b,b).
TYPES = ("aa", "ab", "ba", "bb")

#: Default ceiling on the number of profiles handled exhaustively.
DEFAULT_PROFILE_CAP = 4 ** 10


class CapExceeded(ValueError):
    """Instance too large for exhaustive mode."""


class InvalidSpec(ValueError):
    """Auction parameters outside the supported family."""


def rat(x) -> Fraction:
    """Parse an exact rational: Fraction, int, or a 'num/den' / integer string.

    Decimal strings are rejected; use `rat_allow_decimal` where a caller has
    explicitly opted in to exact decimal parsing.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if "." in s or "e" in s.lower():
            raise ValueError(f"decimal input is not allowed here: {x!r}")
        return Fraction(s)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rat_allow_decimal(x) -> Fraction:
    """Like `rat` but also accepts finite decimal strings (parsed exactly)."""
    if isinstance(x, str) and ("." in x or "e" in x.lower()):
        return Fraction(Decimal(x.strip()))
    return rat(x)


def rat_str(x: Fraction) -> str:
    """Canonical 'num/den' rendering (always carries the denominator)."""
    return f"{x.numerator}/{x.denominator}"


def decimal_str(x: Fraction, digits: int = 12) -> str:
    """Decimal rendering to `digits` significant digits, for display only."""
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(x.numerator) / Decimal(x.denominator)
    return str(d)


@dataclass(frozen=True)
class AuctionSpec:
    """A two-item instance: n buyers, values a < b, low value drawn w.p. p.

    All 2n buyer-item values are IID.  n >= 2 unless the instance is marked
    exploratory (the single-buyer case carries no formula claims and is
    accepted only by the LP oracle).
    """

    n: int
    p: Fraction
    a: Fraction
    b: Fraction
    exploratory: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "p", rat(self.p))
        object.__setattr__(self, "a", rat(self.a))
        object.__setattr__(self, "b", rat(self.b))
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidSpec("n must be a positive integer")
        if self.n < 2 and not self.exploratory:
            raise InvalidSpec("n must be at least 2 (use an exploratory spec for n=1)")
        if not (0 < self.p < 1):
            raise InvalidSpec("p must lie in (0,1)")
        if self.a < 0:
            raise InvalidSpec("a must be nonnegative")
        if not (self.a < self.b):
            raise InvalidSpec("b must exceed a")

    def value(self, c: str) -> Fraction:
        return self.a if c == "a" else self.b

    def type_values(self, t: str) -> tuple[Fraction, Fraction]:
        return (self.value(t[0]), self.value(t[1]))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "p": rat_str(self.p),
            "a": rat_str(self.a),
            "b": rat_str(self.b),
        }


def exploratory_spec(n, p, a, b) -> AuctionSpec:
    """Spec accepting n=1; only the LP oracle consumes these."""
    return AuctionSpec(n, p, a, b, exploratory=True)


Profile = tuple  # tuple of n type strings


def profile_probability(spec: AuctionSpec, profile: Sequence[str]) -> Fraction:
    """p^(#a entries) * (1-p)^(#b entries), by independence of all 2n draws."""
    low = sum(t.count("a") for t in profile)
    return spec.p ** low * (1 - spec.p) ** (2 * len(profile) - low)


def enumerate_profiles(
    spec: AuctionSpec, cap: int = DEFAULT_PROFILE_CAP
) -> list[tuple[Profile, Fraction]]:
    """All 4^n profiles in lexicographic order, each with its exact probability.

    Buyer 0 varies slowest; per buyer, types follow the TYPES order.
    """
    count = 4 ** spec.n
    if count > cap:
        raise CapExceeded(
            f"instance too large for exhaustive mode: 4^{spec.n} = {count} profiles "
            f"exceeds the cap of {cap}"
        )
    return [
        (t, profile_probability(spec, t))
        for t in itertools.product(TYPES, repeat=spec.n)
    ]


# ---------------------------------------------------------------------------
# Hierarchy allocation schemes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HierarchyScheme:
    """Ranked levels of buyer types; an item goes to the minimum-rank buyers.

    Each level may contain several types (the built-in mechanisms only ever
    use singleton levels).  Types absent from every level have infinite rank
    and never receive the item.
    """

    levels: tuple

    def __post_init__(self):
        levels = tuple(
            (level,) if isinstance(level, str) else tuple(level)
            for level in self.levels
        )
        object.__setattr__(self, "levels", levels)
        seen = set()
        for level in levels:
            for t in level:
                if t not in TYPES:
                    raise ValueError(f"unknown buyer type {t!r}")
                if t in seen:
                    raise ValueError(f"type {t!r} appears in two levels")
                seen.add(t)

    def rank(self, t: str):
        """0-based rank of a type, or None for unlisted (infinite-rank) types."""
        for d, level in enumerate(self.levels):
            if t in level:
                return d
        return None

    def to_json(self) -> list:
        return [list(level) for level in self.levels]


def allocate_hierarchy(
    scheme: HierarchyScheme, profile: Sequence[str]
) -> tuple[Fraction, ...]:
    """Per-buyer shares of one item: split equally among minimum-rank buyers."""
    ranks = [scheme.rank(t) for t in profile]
    finite = [r for r in ranks if r is not None]
    if not finite:
        return tuple(Fraction(0) for _ in profile)
    best = min(finite)
    winners = [i for i, r in enumerate(ranks) if r == best]
    share = Fraction(1, len(winners))
    return tuple(share if i in winners else Fraction(0) for i in range(len(profile)))


# ---------------------------------------------------------------------------
# Profile classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProfileClass:
    """Classification of a profile by its cheap items and active buyers.

    label is one of "S0" (the all-low profile), "S1" (one cheap item, one
    active buyer), "S2" (one cheap item, two or more active buyers), or
    "other".  active_buyers lists the 0-based buyers whose type is not (a,a).
    """

    label: str
    cheap_items: tuple[bool, bool]
    active_buyers: tuple[int, ...]


def cheap_items(profile: Sequence[str]) -> tuple[bool, bool]:
    """Item j is cheap iff every buyer values it at the low value."""
    return (
        all(t[0] == "a" for t in profile),
        all(t[1] == "a" for t in profile),
    )


def active_buyers(profile: Sequence[str]) -> tuple[int, ...]:
    """Buyers whose type is not the all-low (a,a)."""
    return tuple(i for i, t in enumerate(profile) if t != "aa")


def classify_profile(profile: Sequence[str]) -> ProfileClass:
    cheap = cheap_items(profile)
    active = active_buyers(profile)
    if cheap[0] and cheap[1]:
        label = "S0"
    elif cheap[0] != cheap[1]:
        label = "S1" if len(active) == 1 else "S2"
    else:
        label = "other"
    return ProfileClass(label, cheap, active)


def class_probabilities(spec: AuctionSpec) -> tuple[Fraction, Fraction, Fraction]:
    """Exact masses of the S0, S1, S2 profile classes.

    p0 = p^(2n); p1 = 2n p^(2n-1)(1-p); p2 = 2 p^n (1 - p^n - n p^(n-1)(1-p)).
    """
    n, p = spec.n, spec.p
    p0 = p ** (2 * n)
    p1 = 2 * n * p ** (2 * n - 1) * (1 - p)
    p2 = 2 * p ** n * (1 - p ** n - n * p ** (n - 1) * (1 - p))
    return (p0, p1, p2)


# ---------------------------------------------------------------------------
# Canonical JSON forms
# ---------------------------------------------------------------------------


def profile_to_json(profile: Sequence[str]) -> list[str]:
    return list(profile)


def profile_from_json(data: Iterable[str]) -> Profile:
    profile = tuple(data)
    for t in profile:
        if t not in TYPES:
            raise ValueError(f"unknown buyer type {t!r}")
    return profile


def scheme_from_json(data: Iterable) -> HierarchyScheme:
    return HierarchyScheme(tuple(tuple(level) for level in data))
