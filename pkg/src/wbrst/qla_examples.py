"""Bundled quantum Lie algebra datasets.

Three small data sets that satisfy the full axiom list and exercise the
three qualitatively different braid matrices we know of: a plain
permutation (ordinary Lie algebra), a super-permutation, and an
involutive non-(super)permutation braiding.  No example with a
non-permutation braid matrix and nonzero structure constants is bundled;
we are not aware of one with a unitary braid matrix.
"""

from __future__ import annotations

import itertools

from .tensors import (QlaData, Tensor, TwistData, lie_super_twist,
                      super_permutation, twist_from_phi)


def _perm_sign(p):
    sgn = 1
    for a in range(len(p)):
        for b in range(a + 1, len(p)):
            if p[a] > p[b]:
                sgn = -sgn
    return sgn


def so3():
    """The rotation algebra: 3 even generators, C^k_{ij} = epsilon_{ijk}."""
    parities = (0, 0, 0)
    entries = {}
    for i, j, k in itertools.permutations(range(3)):
        entries[(k, i, j)] = _perm_sign((i, j, k))
    data = QlaData(3, parities, super_permutation(parities),
                   Tensor(3, 3, entries))
    phi, _ = lie_super_twist(parities)
    return data, twist_from_phi(phi)


def super_ef():
    """A two-generator superalgebra: E even, F odd, [E, F] = F."""
    parities = (0, 1)
    c = Tensor(3, 2, {(1, 0, 1): 1, (1, 1, 0): -1})
    data = QlaData(2, parities, super_permutation(parities), c)
    phi, _ = lie_super_twist(parities)
    return data, twist_from_phi(phi)


def lyubashenko_involutive():
    """An involutive braiding that is not a (super-)permutation on two
    generators, built from the order-2 map f(1) = 2, f(2) = 1:
    sigma^{kl}_{ij} = delta^k_{f(j)} delta^l_{f^{-1}(i)}, with C = 0 and
    phi = sigma."""
    f = {0: 1, 1: 0}
    entries = {}
    for i in range(2):
        for j in range(2):
            entries[(f[j], f[i], i, j)] = 1
    sigma = Tensor(4, 2, entries)
    data = QlaData(2, (0, 0), sigma, Tensor(3, 2, {}))
    return data, twist_from_phi(sigma)


BUNDLED = {
    "so3": so3,
    "super_ef": super_ef,
    "lyubashenko": lyubashenko_involutive,
}
