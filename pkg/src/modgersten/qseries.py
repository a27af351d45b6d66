"""Truncated q-expansions graded by a discriminant group.

A series is a sparse map (element, exponent) -> coefficient together with a
truncation T: every coefficient with exponent <= T is known exactly, nothing
above T is stored.
"""

import json
from fractions import Fraction

from .lattice import NotDefiniteError, short_vectors


class GradingMismatch(ValueError):
    pass


class GradedQSeries:
    def __init__(self, disc, coeffs, trunc):
        self.disc = disc
        self.trunc = Fraction(trunc)
        self.coeffs = {k: Fraction(v) for k, v in coeffs.items()
                       if v != 0 and k[1] <= self.trunc}
        level = 2 * disc.size
        assert all(level % e.denominator == 0 for _, e in self.coeffs), "exponent off the level grid"

    def component(self, el):
        return sorted((e, c) for (x, e), c in self.coeffs.items() if x == el)

    def coefficient(self, el, e):
        return self.coeffs.get((el, Fraction(e)), Fraction(0))

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return (isinstance(other, GradedQSeries) and self.disc.orders == other.disc.orders
                and self.trunc == other.trunc and self.coeffs == other.coeffs)

    def __repr__(self):
        return "GradedQSeries(%d terms, trunc=%s)" % (len(self.coeffs), self.trunc)

    def items(self):
        return sorted(self.coeffs.items())


def combine(a, b, ca=1, cb=1):
    """ca*a + cb*b, truncated at the smaller of the two truncations."""
    if a.disc.orders != b.disc.orders:
        raise GradingMismatch("series are graded by different groups")
    out = {}
    for s, c in ((a, Fraction(ca)), (b, Fraction(cb))):
        for k, v in s.coeffs.items():
            out[k] = out.get(k, 0) + c * v
    return GradedQSeries(a.disc, out, min(a.trunc, b.trunc))


def zero_series(disc, trunc):
    return GradedQSeries(disc, {}, trunc)


def theta_series(K, trunc):
    """Theta series of K(-1) for a negative definite K.

    The component at delta counts x in delta + K by q^{-(x,x)/2}.
    """
    if not K.is_negative_definite:
        raise NotDefiniteError("theta series needs a negative definite lattice")
    trunc = Fraction(trunc)
    P = K.scaled(-1)
    D = K.disc
    coeffs = {}
    for el in D.elements:
        shift = D.lift(el)
        for _, nrm in short_vectors(P, 2 * trunc, shift=shift, include_zero=True):
            key = (el, nrm / 2)
            coeffs[key] = coeffs.get(key, 0) + 1
    return GradedQSeries(D, coeffs, trunc)


def up_arrow(series, gd):
    """Lift a series on A_L to A_sub x A_comp along the glue data ``gd``.

    Returns a dict ((beta, delta), e) -> coefficient; components outside
    L^v/(sub + comp) are zero and not stored.
    """
    pre = preimages(gd)
    out = {}
    for (lam, e), c in series.coeffs.items():
        for mu in pre.get(lam, ()):
            out[(mu, e)] = c
    return out


def preimages(gd):
    pre = {}
    for mu, lam in sorted(gd.coset_lift_map.items()):
        pre.setdefault(lam, []).append(mu)
    return pre


# ---------------------------------------------------------------------------
# series files


def series_record(s):
    rows = []
    for (el, e), c in s.items():
        rows.append([list(el), [e.numerator, e.denominator], [c.numerator, c.denominator]])
    return {"orders": list(s.disc.orders), "trunc": [s.trunc.numerator, s.trunc.denominator],
            "terms": rows}


def dumps_series(s):
    return json.dumps(series_record(s), sort_keys=True, separators=(",", ":"))


def loads_series(text, disc):
    rec = json.loads(text)
    if tuple(rec["orders"]) != disc.orders:
        raise GradingMismatch("series file graded by %s, expected %s" % (rec["orders"], disc.orders))
    coeffs = {(tuple(el), Fraction(*e)): Fraction(*c) for el, e, c in rec["terms"]}
    return GradedQSeries(disc, coeffs, Fraction(*rec["trunc"]))
