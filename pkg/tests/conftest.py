import numpy as np
import pytest

from mtxt import SpdMatrix, TParams


def identity_params(nu: float, d: int, m: int) -> TParams:
    return TParams(nu=nu, sigma=SpdMatrix(np.eye(d)), omega=SpdMatrix(np.eye(m)))


def params_from(nu: float, sigma, omega) -> TParams:
    return TParams(nu=nu, sigma=SpdMatrix(sigma), omega=SpdMatrix(omega))


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def random_spd(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((dim, dim))
    return a @ a.T + dim * np.eye(dim)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
