import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pfoliate.derivation import Derivation
from pfoliate.gfpoly import Poly, Ring

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

PRIMES = (2, 3, 5, 7)


def rings(names=("x", "y", "z"), primes=PRIMES):
    return st.builds(lambda p, n: Ring(names[:n], p), st.sampled_from(primes), st.integers(1, len(names)))


def polys(ring, max_degree=3, max_terms=5):
    exps = st.tuples(*[st.integers(0, max_degree) for _ in ring.names])
    return st.dictionaries(exps, st.integers(0, ring.p - 1), max_size=max_terms).map(lambda d: Poly(ring, d))


def derivations(ring, max_degree=2, max_terms=3):
    return st.lists(polys(ring, max_degree, max_terms), min_size=ring.nvars, max_size=ring.nvars).map(
        lambda cs: Derivation(ring, cs)
    )


@st.composite
def ring_and_polys(draw, k=2, max_degree=3, names=("x", "y", "z")):
    ring = draw(rings(names))
    return (ring,) + tuple(draw(polys(ring, max_degree)) for _ in range(k))
