import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from ibpdca.exceptions import NonFiniteError, ShapeMismatchError, SymmetryViolationError
from ibpdca.linalg import (conj_transpose, dft_tubes, fourier_singular_values, idft_tubes,
                           singular_values, svd, t_identity, tensor_nuclear_norm, tprod, tsvd)

from oracles import dft_direct, singular_values_charpoly_2x2, tprod_bcirc

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


# ---- svd -------------------------------------------------------------------

def test_svd_identity():
    np.testing.assert_allclose(svd(np.eye(2)).sigma, [1.0, 1.0])


def test_svd_diagonal():
    np.testing.assert_allclose(svd(np.diag([3.0, 1.0])).sigma, [3.0, 1.0])


def test_svd_nilpotent_matches_charpoly():
    A = np.array([[0.0, 2.0], [0.0, 0.0]])
    expected = singular_values_charpoly_2x2(A)
    np.testing.assert_allclose(expected, [2.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(svd(A).sigma, expected, atol=1e-12)


@pytest.mark.parametrize("shape", [(1, 1), (3, 5), (6, 2), (7, 7)])
def test_svd_contract(rng, shape):
    A = rng.standard_normal(shape)
    U, s, Vt = svd(A)
    r = min(shape)
    assert U.shape == (shape[0], r) and s.shape == (r,) and Vt.shape == (r, shape[1])
    assert np.all(s[:-1] >= s[1:]) and np.all(s >= 0)
    assert np.linalg.norm(U * s @ Vt - A) <= 1e-10 * max(1.0, np.linalg.norm(A))
    assert np.linalg.norm(U.T @ U - np.eye(r)) <= 1e-10
    assert np.linalg.norm(Vt @ Vt.T - np.eye(r)) <= 1e-10


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=finite))
def test_svd_contract_property(A):
    U, s, Vt = svd(A)
    assert np.all(np.diff(s) <= 1e-12 * max(1.0, s[0])) and np.all(s >= 0)
    assert np.linalg.norm(U * s @ Vt - A) <= 1e-10 * max(1.0, np.linalg.norm(A))


def test_svd_rejects_nonfinite():
    with pytest.raises(NonFiniteError):
        svd(np.array([[1.0, np.nan]]))


def test_svd_rejects_wrong_rank():
    with pytest.raises(ShapeMismatchError):
        svd(np.ones(3))


# ---- tube DFT --------------------------------------------------------------

def test_dft_constant_fiber():
    T = np.full((1, 1, 5), 2.5)
    out = dft_tubes(T)[0, 0]
    np.testing.assert_allclose(out, [12.5, 0, 0, 0, 0], atol=1e-12)


def test_dft_delta_fiber():
    T = np.zeros((1, 1, 6))
    T[0, 0, 0] = 1.0
    np.testing.assert_allclose(dft_tubes(T)[0, 0], np.ones(6), atol=1e-12)


def test_idft_constant_and_delta():
    spectrum = np.zeros((1, 1, 4), complex)
    spectrum[0, 0, 0] = 4 * 1.5
    np.testing.assert_allclose(idft_tubes(spectrum)[0, 0], np.full(4, 1.5), atol=1e-12)
    np.testing.assert_allclose(idft_tubes(np.ones((1, 1, 4), complex))[0, 0], [1, 0, 0, 0],
                               atol=1e-12)


def test_dft_matches_direct_sum(rng):
    T = rng.standard_normal((2, 3, 7))
    out = dft_tubes(T)
    for i in range(2):
        for j in range(3):
            np.testing.assert_allclose(out[i, j], dft_direct(T[i, j]), atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 16), st.integers(0, 2 ** 32 - 1))
def test_dft_roundtrip(n3, seed):
    T = np.random.default_rng(seed).standard_normal((3, 2, n3))
    back = idft_tubes(dft_tubes(T))
    assert np.linalg.norm(back - T) <= 1e-12 * np.linalg.norm(T)


def test_idft_rejects_asymmetric_spectrum():
    spectrum = np.zeros((1, 1, 4), complex)
    spectrum[0, 0, 1] = 1.0            # no conjugate partner at index 3
    with pytest.raises(SymmetryViolationError):
        idft_tubes(spectrum)


# ---- t-product and friends -------------------------------------------------

def test_tprod_identity(rng):
    A = rng.standard_normal((3, 4, 5))
    np.testing.assert_allclose(tprod(A, t_identity(4, 5)), A, atol=1e-12)
    np.testing.assert_allclose(tprod(t_identity(3, 5), A), A, atol=1e-12)


def test_tprod_n3_one_is_matrix_product(rng):
    A, B = rng.standard_normal((3, 4, 1)), rng.standard_normal((4, 2, 1))
    np.testing.assert_allclose(tprod(A, B)[:, :, 0], A[:, :, 0] @ B[:, :, 0], atol=1e-12)


@pytest.mark.parametrize("shape", [(2, 2, 2), (3, 2, 5), (2, 4, 4)])
def test_tprod_matches_bcirc(rng, shape):
    A = rng.standard_normal(shape)
    B = rng.standard_normal((shape[1], 3, shape[2]))
    np.testing.assert_allclose(tprod(A, B), tprod_bcirc(A, B), atol=1e-12)


def test_tprod_shape_mismatch(rng):
    with pytest.raises(ShapeMismatchError):
        tprod(rng.standard_normal((2, 3, 2)), rng.standard_normal((2, 3, 2)))


def test_conj_transpose_n3_one(rng):
    A = rng.standard_normal((3, 2, 1))
    np.testing.assert_array_equal(conj_transpose(A)[:, :, 0], A[:, :, 0].T)


def test_conj_transpose_involution(rng):
    A = rng.standard_normal((3, 2, 4))
    np.testing.assert_array_equal(conj_transpose(conj_transpose(A)), A)


def test_conj_transpose_reverses_products(rng):
    A, B = rng.standard_normal((3, 2, 4)), rng.standard_normal((2, 5, 4))
    lhs = conj_transpose(tprod_bcirc(A, B))
    rhs = tprod_bcirc(conj_transpose(B), conj_transpose(A))
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_conj_transpose_is_bcirc_transpose(rng):
    from oracles import bcirc
    A = rng.standard_normal((3, 2, 5))
    np.testing.assert_allclose(bcirc(conj_transpose(A)), bcirc(A).T, atol=0)


def test_tsvd_fdiagonal_constant():
    G = np.zeros((3, 3, 4))
    for i, c in enumerate([3.0, 2.0, 1.0]):
        G[i, i, :] = c
    U, Gamma, Vt = tsvd(G)
    np.testing.assert_allclose(tprod(tprod(U, Gamma), Vt), G, atol=1e-10)


def test_tsvd_n3_one_matches_svd(rng):
    A = rng.standard_normal((4, 3, 1))
    _, Gamma, _ = tsvd(A)
    np.testing.assert_allclose(np.diag(Gamma[:, :, 0]), svd(A[:, :, 0]).sigma, atol=1e-12)


@pytest.mark.parametrize("shape", [(4, 3, 2), (3, 5, 3), (5, 5, 6)])
def test_tsvd_reconstruction_and_structure(rng, shape):
    T = rng.standard_normal(shape)
    U, Gamma, Vt = tsvd(T)
    R = tprod(tprod(U, Gamma), Vt)
    assert np.linalg.norm(R - T) <= 1e-8 * np.linalg.norm(T)
    Gbar = np.fft.fft(Gamma, axis=2)
    for k in range(shape[2]):
        d = np.diag(Gbar[:, :, k])
        off = Gbar[:, :, k] - np.diag(d)
        assert np.abs(off).max() <= 1e-10
        assert np.abs(d.imag).max() <= 1e-10
        assert np.all(d.real >= -1e-12) and np.all(np.diff(d.real) <= 1e-12)
    # U is t-orthogonal
    UtU = tprod(conj_transpose(U), U)
    np.testing.assert_allclose(UtU, t_identity(min(shape[:2]), shape[2]), atol=1e-10)


def test_fourier_singular_values_and_tnn(rng):
    T = rng.standard_normal((3, 4, 5))
    s = fourier_singular_values(T)
    bar = np.fft.fft(T, axis=2)
    for k in range(5):
        np.testing.assert_allclose(s[:, k], np.linalg.svd(bar[:, :, k], compute_uv=False),
                                   atol=1e-12)
    assert tensor_nuclear_norm(T) == pytest.approx(s.sum() / 5, rel=1e-14)


def test_tnn_n3_one_is_nuclear_norm(rng):
    A = rng.standard_normal((4, 3))
    assert tensor_nuclear_norm(A[:, :, None]) == pytest.approx(singular_values(A).sum())


def test_tnn_known_fourier_singular_values():
    # f-diagonal tensor built from prescribed real, conjugate-symmetric slices
    n3 = 4
    d = np.array([[4.0, 1.0, 2.0, 1.0], [3.0, 0.5, 1.0, 0.5]])   # (r, n3), symmetric in k
    Gbar = np.zeros((2, 2, n3), complex)
    for k in range(n3):
        Gbar[0, 0, k], Gbar[1, 1, k] = d[0, k], d[1, k]
    T = idft_tubes(Gbar)
    assert tensor_nuclear_norm(T) == pytest.approx(d.sum() / n3, rel=1e-12)
