"""Built-in reconstructions of the published instances and pinned schemes.

Fixtures live as JSON files under ``cdscover/data`` in the same formats the
CLI reads and writes; each file carries a ``provenance`` field recording
which edges are stated in prose and which were inferred. They are loaded,
never generated, at runtime.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .graph import CdsInstance, parse_instance
from .scheme import LinearScheme, parse_scheme, rate

INSTANCE_NAMES = ("fig2", "fig5", "fig8", "fig9", "matching2")
SCHEME_NAMES = (
    "fig5-synth",
    "fig2-rate-2-5",
    "fig8-rate-7-18",
    "broken-leaky",
    "broken-garbled",
    "broken-fig5-leaky",
)

# instance each pinned scheme is built for
SCHEME_INSTANCE = {
    "fig5-synth": "fig5",
    "fig2-rate-2-5": "fig2",
    "fig8-rate-7-18": "fig8",
    "broken-leaky": "fig2",
    "broken-garbled": "fig2",
    "broken-fig5-leaky": "fig5",
}


class UnknownFixture(KeyError):
    pass


def _read(name: str) -> str:
    path = resources.files("cdscover").joinpath("data", f"{name}.json")
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise UnknownFixture(f"no catalog fixture named {name!r}") from e


@lru_cache(maxsize=None)
def builtin_instance(name: str) -> CdsInstance:
    if name not in INSTANCE_NAMES:
        raise UnknownFixture(f"unknown instance {name!r}; known: {', '.join(INSTANCE_NAMES)}")
    return parse_instance(_read(name))


@lru_cache(maxsize=None)
def builtin_scheme(name: str) -> LinearScheme:
    if name not in SCHEME_NAMES:
        raise UnknownFixture(f"unknown scheme {name!r}; known: {', '.join(SCHEME_NAMES)}")
    return parse_scheme(_read(f"scheme-{name}"))


def instance_text(name: str) -> str:
    if name not in INSTANCE_NAMES:
        raise UnknownFixture(f"unknown instance {name!r}")
    return _read(name)


def scheme_text(name: str) -> str:
    if name not in SCHEME_NAMES:
        raise UnknownFixture(f"unknown scheme {name!r}")
    return _read(f"scheme-{name}")


@dataclass(frozen=True)
class KnownResult:
    """What the literature pins down for one catalog instance."""

    name: str
    exact_capacity: Fraction | None = None
    open: bool = False
    scheme_names: tuple[str, ...] = ()

    def best_scheme_rate(self) -> Fraction | None:
        rates = [rate(builtin_scheme(s)) for s in self.scheme_names]
        return max(rates) if rates else None


def known_results() -> tuple[KnownResult, ...]:
    return (
        # fig2's capacity is settled by the rate-2/5 scheme matching the bound.
        KnownResult(name="fig2", scheme_names=("fig2-rate-2-5",)),
        # fig8's capacity 7/18 comes from a bespoke converse below the covering bound.
        KnownResult(name="fig8", exact_capacity=Fraction(7, 18), scheme_names=("fig8-rate-7-18",)),
        # fig9's linear capacity is open; best known converse is the covering bound.
        KnownResult(name="fig9", open=True),
    )
