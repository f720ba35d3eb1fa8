"""Quick consistency checks run by the ``selftest`` experiment kind."""

from __future__ import annotations

import numpy as np

from .. import curves, kernels, model, predict
from ..ffq import field_create
from ..rng import rng_stream, stream_key


def _philox() -> bool:
    if kernels.numba_backend is None:
        return True
    k0, k1 = stream_key(7)
    got = kernels.numba_backend.stream_words(np.uint64(k0), np.uint64(k1), np.uint64(3), 64)
    want = rng_stream(7, 3).bit_generator.random_raw(64)
    return bool(np.array_equal(got, want))


def _backends() -> bool:
    if kernels.numba_backend is None:
        return True
    F = field_create(3)
    a = model.model_block(F, 3, 1, 0, 16, True, "numba")
    b = model.model_block(F, 3, 1, 0, 16, True, "numpy")
    return bool(np.array_equal(a, b))


def _exhaustive() -> bool:
    space = model.SymplecticSpace(field_create(2), 1)
    hist = model.exhaustive_counts(space, full=False)
    n = sum(hist.values())
    for r in range(2):
        got = sum(c for k, c in hist.items() if k[0] == r)
        if got * 1 != predict.finite_g_anumber_prob(2, 1, r) * n:
            return False
    return True


def _lagrangians() -> bool:
    space = model.SymplecticSpace(field_create(3), 2)
    return len(model.all_lagrangians(space)) == predict.lagrangians(3, 2) == predict.lagrangians_product(3, 2)


def _hyper_zeta() -> bool:
    F = field_create(3)
    rng = rng_stream(11, 0)
    for _ in range(5):
        C = curves.HyperCurve(F, curves.sample_monic_squarefree(F, 5, rng))
        inv = curves.hyper_invariants(C)
        if (inv.d >= 1) != (curves.naive_zeta(C).jac_order % 3 == 0):
            return False
    return True


def _plane_zeta() -> bool:
    F = field_create(2)
    rng = rng_stream(11, 1)
    for _ in range(5):
        X = curves.sample_plane_curve(F, 3, rng)
        inv = curves.plane_invariants(X)
        if (inv.d >= 1) != (curves.plane_zeta(X).jac_order % 2 == 0):
            return False
    return True


CHECKS = {
    "philox_stream": _philox,
    "backend_agreement": _backends,
    "exhaustive_model_g1_q2": _exhaustive,
    "lagrangian_count": _lagrangians,
    "hyper_zeta_oracle": _hyper_zeta,
    "plane_zeta_oracle": _plane_zeta,
}


def run_checks() -> list[tuple[str, bool]]:
    return [(name, bool(fn())) for name, fn in CHECKS.items()]
