import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import fourier_atom, spike
from prosparse.bases import (
    DICT_KINDS, BandedBasis, CanonicalBasis, DCTBasis, Dictionary, FourierBasis,
    GaussianBasis, LocalFourierBasis, dictionary_params, make_dictionary, max_support_length,
    mutual_coherence, recover_segment, support_length, synthesize,
)
from prosparse.fixtures import make_bp_counterexample
from prosparse.prony import Reject, prony_fit, fourier_coeffs_from_model


def fc(N):
    return Dictionary(FourierBasis(N), CanonicalBasis(N))


def test_spike_synthesis():
    y = synthesize(fc(8), np.zeros(8), spike(8, 5))
    assert np.allclose(y, spike(8, 5))


def test_fourier_atom_synthesis():
    y = synthesize(fc(8), spike(8, 2), np.zeros(8))
    assert np.allclose(y, fourier_atom(8, 2), atol=1e-15)


def test_counterexample_pair_synthesizes_equal():
    ce = make_bp_counterexample(4)
    d = fc(ce.N)
    a = synthesize(d, ce.x[:ce.N], ce.x[ce.N:])
    b = synthesize(d, ce.x_tilde[:ce.N], ce.x_tilde[ce.N:])
    assert np.max(np.abs(a - b)) < 1e-10


@pytest.mark.parametrize("basis", [FourierBasis(12), CanonicalBasis(12), LocalFourierBasis(12, 4),
                                   BandedBasis(12, 3, seed=2), DCTBasis(12),
                                   GaussianBasis(12, seed=1)])
def test_synth_analyze_inverse(basis):
    r = np.random.default_rng(0)
    c = r.standard_normal(12) + 1j * r.standard_normal(12)
    assert np.allclose(basis.analyze(basis.synth(c)), c, atol=1e-9)
    assert np.allclose(basis.matrix @ c, basis.synth(c), atol=1e-12)


def test_local_lengths():
    assert CanonicalBasis(16).local_length == 1
    assert LocalFourierBasis(16, 4).local_length == 4
    assert max_support_length(LocalFourierBasis(16, 8).matrix) == 8
    assert BandedBasis(16, 5).local_length == 5
    assert support_length(np.array([0, 0, 1, 0, 1, 0])) == 3
    assert support_length(np.zeros(4)) == 0


def test_local_fourier_block_must_divide():
    with pytest.raises(ValueError):
        LocalFourierBasis(10, 4)


def test_capability_flags():
    assert FourierBasis(8).tau == 0 and FourierBasis(8).sampling_factor(3) == 6
    assert DCTBasis(8).tau == 1 and DCTBasis(8).sampling_factor(3) == 12
    assert GaussianBasis(8).tau == 0
    assert not CanonicalBasis(8).segment_recoverable
    with pytest.raises(NotImplementedError):
        CanonicalBasis(8).sampling_factor(1)


@pytest.mark.parametrize("N", [16, 144])
def test_fourier_canonical_coherence(N):
    assert math.isclose(mutual_coherence(fc(N)), 1 / math.sqrt(N), rel_tol=1e-12)


def test_coherence_144_is_one_twelfth():
    assert math.isclose(mutual_coherence(fc(144)), 1 / 12, rel_tol=1e-12)


@pytest.mark.parametrize("N,L", [(16, 4), (64, 8)])
def test_local_fourier_coherence(N, L):
    d = Dictionary(FourierBasis(N), LocalFourierBasis(N, L))
    assert math.isclose(mutual_coherence(d), math.sqrt(L / N), rel_tol=1e-12)


def test_dct_canonical_coherence_brute_force():
    # The closed form sqrt(2/N) is an upper bound; at N = 32 the largest
    # |cos(pi n (m + 1/2) / N)| over n >= 1 is cos(pi / 64), not 1.
    N = 32
    mu = mutual_coherence(Dictionary(DCTBasis(N), CanonicalBasis(N)))
    n = np.arange(1, N)[:, None]
    m = np.arange(N)[None, :]
    oracle = math.sqrt(2 / N) * np.max(np.abs(np.cos(np.pi * n * (m + 0.5) / N)))
    assert math.isclose(mu, oracle, rel_tol=1e-12)
    assert mu <= math.sqrt(2 / N)
    assert math.isclose(mu, 0.25, rel_tol=2e-3)


def test_dispatch_fourier_matches_prony():
    N = 32
    c = np.zeros(N, complex)
    c[[1, 7, 30]] = 1
    y = FourierBasis(N).synth(c)
    via_basis = recover_segment(FourierBasis(N), y[:6], 0, 3)
    via_prony = fourier_coeffs_from_model(prony_fit(y[:6], 3, N), N)
    assert np.allclose(via_basis, via_prony, atol=1e-12)


def test_dispatch_dct_window_of_four():
    N = 16
    b = DCTBasis(N)
    c = np.zeros(N)
    c[9] = -1.5
    y = b.synth(c)
    for start in range(N - 3):
        assert np.allclose(recover_segment(b, y[start:start + 4], start, 1), c, atol=1e-9)


def test_recover_segment_wrong_length():
    with pytest.raises(ValueError):
        recover_segment(FourierBasis(16), np.ones(5), 0, 2)


def test_recover_segment_not_recoverable():
    with pytest.raises(ValueError):
        recover_segment(CanonicalBasis(16), np.ones(2), 0, 1)


def test_gaussian_sampling_factor_bounds():
    for N in (16, 64, 200):
        b = GaussianBasis(N, c1=4.0)
        prev = 0
        for K in range(1, N + 1):
            S = b.sampling_factor(K)
            assert math.ceil(3 * math.log(N) - 1e-12) <= S <= N
            assert S >= prev
            prev = S


def test_gaussian_p_floor_applies():
    b = GaussianBasis(64, c1=0.1)
    assert b.sampling_factor(1) == math.ceil(3 * math.log(64))


def test_gaussian_segment_recovery(gaussian_cal):
    b = gaussian_cal.basis()
    N, K = 64, 2
    S = b.sampling_factor(K)
    r = np.random.default_rng(99)
    ok = 0
    C, starts = [], []
    for _ in range(200):
        c = np.zeros(N, complex)
        c[r.choice(N, K, replace=False)] = np.exp(2j * np.pi * r.random(K))
        C.append(c)
        starts.append(int(r.integers(N)))
    segs = np.stack([b.segments(b.synth(c), S, [s])[0] for c, s in zip(C, starts)])
    for c, got in zip(C, b.recover_windows(segs, np.array(starts), K)):
        if isinstance(got, Reject):
            continue
        if (np.array_equal(np.flatnonzero(got), np.flatnonzero(c))
                and np.allclose(got, c, atol=1e-6)):
            ok += 1
    assert ok / 200 >= 0.95


def test_calibration_provenance(gaussian_cal):
    assert 1 <= gaussian_cal.c1 <= 12
    assert all(r >= 0.95 for r in gaussian_cal.rates.values())
    d = gaussian_cal.to_dict()
    assert d["N"] == 64 and d["K_range"] == [1, 2, 3, 4]


@pytest.mark.parametrize("kind", DICT_KINDS)
def test_make_dictionary_roundtrip(kind):
    d = make_dictionary(kind, 16, L=4, basis_seed=3)
    again = make_dictionary(kind, 16, **dictionary_params(d))
    assert np.array_equal(d.matrix(), again.matrix())


def test_unknown_dictionary():
    with pytest.raises(ValueError):
        make_dictionary("wavelet", 16)


def test_bad_preconditioner():
    with pytest.raises(ValueError):
        Dictionary(FourierBasis(4), CanonicalBasis(4), np.zeros((4, 4)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_preconditioned_synthesis(seed):
    r = np.random.default_rng(seed)
    N = 8
    A = np.eye(N) + 0.1 * r.standard_normal((N, N))
    d = Dictionary(FourierBasis(N), CanonicalBasis(N), A)
    xp, xq = r.standard_normal(N), r.standard_normal(N)
    y = d.synthesize(xp, xq)
    assert np.allclose(d.unprecondition(y), d.base().synthesize(xp, xq), atol=1e-10)
