import numpy as np
import pytest

from noon_coherence import (
    LossSetting,
    apply_loss,
    cross_moment,
    detected_moment,
    moment,
    to_density_matrix,
)
from noon_coherence.channels import kraus_operators, lossy_number_distribution
from noon_coherence.states import make_binomial_splitter, make_noon

from helpers import close, random_fixed_state, random_mixture


def test_loss_setting_validation():
    with pytest.raises(ValueError):
        LossSetting(1.2, 0.5)
    assert LossSetting.uniform(0.7).is_uniform
    assert not LossSetting(0.7, 0.6).is_uniform


@pytest.mark.parametrize("eta", [0.0, 0.3, 0.9, 1.0])
def test_kraus_completeness(eta):
    ops = kraus_operators(eta, 7)
    total = sum(k.conj().T @ k for k in ops)
    assert np.max(np.abs(total - np.eye(7))) < 1e-12


def test_identity_channel():
    rho = to_density_matrix(make_noon(4))
    out = apply_loss(rho, LossSetting.uniform(1.0))
    assert np.max(np.abs(out.entries - rho.entries)) < 1e-12


def test_total_loss_gives_vacuum():
    rho = to_density_matrix(make_noon(3))
    out = apply_loss(rho, LossSetting.uniform(0.0))
    expected = np.zeros_like(out.entries)
    expected[0, 0] = 1.0
    assert np.max(np.abs(out.entries - expected)) < 1e-12


def test_channel_reproduces_moment_scaling():
    rng = np.random.default_rng(21)
    for eta in (0.3, 0.7):
        for n_tot in (2, 5, 8):
            state = random_fixed_state(n_tot, rng)
            rho = to_density_matrix(state)
            lossy = apply_loss(rho, LossSetting.uniform(eta))
            for order in range(1, n_tot + 1):
                assert close(
                    cross_moment(lossy, order), eta**order * cross_moment(state, order)
                )


def test_channel_trace_and_hermiticity():
    rng = np.random.default_rng(22)
    rho = random_mixture(5, rng)
    out = apply_loss(rho, LossSetting(0.6, 0.4))
    assert close(np.trace(out.entries).real, 1.0)
    assert np.max(np.abs(out.entries - out.entries.conj().T)) < 1e-12


def test_channel_composition():
    rng = np.random.default_rng(23)
    for _ in range(5):
        rho = to_density_matrix(random_fixed_state(int(rng.integers(2, 7)), rng))
        once = apply_loss(apply_loss(rho, LossSetting.uniform(0.8)), LossSetting.uniform(0.5))
        direct = apply_loss(rho, LossSetting.uniform(0.4))
        assert np.max(np.abs(once.entries - direct.entries)) < 1e-10


def test_detected_moment_noon():
    value = detected_moment(make_noon(5), (5, 0, 0, 5), LossSetting.uniform(0.8))
    assert close(value, 0.8**5 * 60.0, tol=1e-12)


def test_detected_moment_unit_transmission():
    state = make_binomial_splitter(4)
    assert close(
        detected_moment(state, (2, 0, 0, 2), LossSetting.uniform(1.0)),
        cross_moment(state, 2),
    )


def test_detected_moment_large_splitter():
    # first-order moment N/2 = 50 scaled by eta = 0.5
    value = detected_moment(make_binomial_splitter(100), (1, 0, 0, 1), LossSetting.uniform(0.5))
    assert close(value, 25.0, tol=1e-12)


def test_detected_moment_unequal_transmissions():
    rng = np.random.default_rng(24)
    state = random_fixed_state(4, rng)
    loss = LossSetting(0.9, 0.5)
    for order in (1, 2):
        via_kraus = detected_moment(state, (order, 0, 0, order), loss)
        analytic = (loss.eta_a * loss.eta_b) ** (order / 2) * cross_moment(state, order)
        assert close(via_kraus, analytic)


def test_detected_moment_rejects_general_monomials():
    with pytest.raises(ValueError):
        detected_moment(make_noon(2), (1, 1, 0, 0), LossSetting.uniform(0.5))


def test_lossy_distribution_matches_full_channel():
    rng = np.random.default_rng(25)
    for state in (make_noon(5), random_fixed_state(4, rng)):
        loss = LossSetting(0.6, 0.8)
        fast = lossy_number_distribution(state, loss)
        grid = apply_loss(to_density_matrix(state), loss).diagonal_probabilities()
        na, nb = np.indices(grid.shape)
        for diff, prob in fast.items():
            assert close(prob, float(grid[na - nb == diff].sum()), tol=1e-12)
        assert close(sum(fast.values()), 1.0, tol=1e-12)
