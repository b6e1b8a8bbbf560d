import itertools
import math

import numpy as np
import pandas as pd
import pytest

from timechange.errors import DomainError, PreconditionError, ValidationError
from timechange.self_similar import (
    IFS,
    box_dimension,
    children_counts,
    enumerate_lambda_n,
    fourier_product,
    gibbs_weights,
    lambda_n_moment_exponent,
    legendre_transform,
    lq_spectrum,
    measure_quadrature,
    predicted_graph_dim,
    preset_ifs,
    tau_curve,
    tau_derivative,
)

CANTOR_DIM = math.log(2) / math.log(3)
FULL_Q_GRID = np.round(np.arange(-10.0, 10.0 + 1e-9, 0.01), 10)


def brute_force_cut_set(ifs, t, n, max_len=8):
    threshold = t**n * (1 + 1e-12)
    words = set()
    for length in range(max_len + 1):
        for word in itertools.product(range(ifs.size), repeat=length):
            r = math.prod(ifs.ratios[i] for i in word)
            parent = math.prod(ifs.ratios[i] for i in word[:-1]) if word else math.inf
            if r <= threshold < parent:
                words.add(word)
    return words


# ------------------ IFS ------------------


def test_ifs_validation():
    with pytest.raises(ValidationError):
        IFS((0.5, 0.5), (0.0, 0.5), (0.6, 0.6))
    with pytest.raises(ValidationError):
        IFS((0.5, 1.0), (0.0, 0.5), (0.5, 0.5))
    with pytest.raises(ValidationError):
        IFS((0.5,), (0.0,), (1.0,))
    with pytest.raises(ValidationError):
        preset_ifs("sierpinski")


def test_preset_properties():
    assert preset_ifs("cantor3").convex_osc
    assert preset_ifs("uneven-2-4").convex_osc
    assert not preset_ifs("golden-bernoulli").convex_osc
    assert preset_ifs("golden-bernoulli").full_support
    assert not preset_ifs("uneven-2-4").full_support


# ------------------ L^q SPECTRUM ------------------


@pytest.mark.parametrize("q", [-3.0, -1.0, 0.0, 0.5, 1.0, 2.0, 5.0])
def test_cantor_tau_closed_form(q):
    assert lq_spectrum(preset_ifs("cantor3"), q) == pytest.approx((1 - q) * -CANTOR_DIM, abs=1e-10)


def test_uneven_tau_values():
    ifs = preset_ifs("uneven-2-4")
    assert lq_spectrum(ifs, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert lq_spectrum(ifs, 2.0) == pytest.approx(math.log2((-1 + math.sqrt(17)) / 2), abs=1e-10)
    # 2^tau + 4^tau = 1 at q = 0
    assert box_dimension(ifs) == pytest.approx(math.log2((1 + math.sqrt(5)) / 2), abs=1e-10)


def test_tau_is_increasing_and_concave():
    tau = tau_curve(preset_ifs("uneven-2-4"), np.arange(-3.0, 3.01, 0.5))
    assert isinstance(tau, pd.Series)
    assert np.all(np.diff(tau.values) > 0)
    assert np.all(np.diff(tau.values, n=2) <= 1e-10)


def test_tau_derivative_matches_closed_form():
    ifs = preset_ifs("cantor3")
    assert tau_derivative(ifs, 1.0) == pytest.approx(CANTOR_DIM, abs=1e-6)


def test_overlapping_ifs_is_rejected():
    with pytest.raises(PreconditionError):
        lq_spectrum(preset_ifs("golden-bernoulli"), 2.0)


def test_gibbs_weights():
    ifs = preset_ifs("uneven-2-4")
    assert math.fsum(gibbs_weights(ifs, 2.0).weights) == pytest.approx(1.0, abs=1e-12)
    assert gibbs_weights(ifs, 1.0).weights == pytest.approx(ifs.weights)


# ------------------ LEGENDRE ------------------


def test_legendre_linear_tau():
    tau = tau_curve(preset_ifs("cantor3"), FULL_Q_GRID)
    assert legendre_transform(tau, CANTOR_DIM).value == pytest.approx(CANTOR_DIM, abs=1e-9)
    assert legendre_transform(tau, CANTOR_DIM + 0.5).at_boundary


def test_legendre_at_derivative_of_one():
    ifs = preset_ifs("uneven-2-4")
    tau = tau_curve(ifs, FULL_Q_GRID)
    result = legendre_transform(tau, tau_derivative(ifs, 1.0))
    assert not result.at_boundary
    assert -1e-9 <= result.value <= box_dimension(ifs) + 1e-9
    assert result.q_star == pytest.approx(1.0, abs=0.02)


def test_legendre_grid_requirements():
    coarse = tau_curve(preset_ifs("cantor3"), np.arange(-10.0, 10.01, 0.1))
    with pytest.raises(DomainError):
        legendre_transform(coarse, 0.6)
    narrow = tau_curve(preset_ifs("cantor3"), np.arange(-2.0, 2.001, 0.01))
    with pytest.raises(DomainError):
        legendre_transform(narrow, 0.6)


# ------------------ WORD SETS ------------------


def test_cantor_lambda_two():
    words = enumerate_lambda_n(preset_ifs("cantor3"), 1 / 3, 2)
    assert set(words.words) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert np.allclose(words.ratios, 1 / 9)
    assert np.all(np.diff(words.left) > 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_uneven_cut_set_matches_brute_force(n):
    ifs = preset_ifs("uneven-2-4")
    words = enumerate_lambda_n(ifs, 0.5, n)
    assert set(words.words) == brute_force_cut_set(ifs, 0.5, n)


@pytest.mark.parametrize("name", ["cantor3", "uneven-2-4", "dyadic-uniform", "golden-bernoulli"])
def test_cut_set_masses_sum_to_one(name):
    ifs = preset_ifs(name)
    for n in (1, 4, 8, 12):
        assert math.fsum(enumerate_lambda_n(ifs, max(ifs.ratios), n).masses) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("name, t", [("cantor3", 1 / 3), ("uneven-2-4", 0.5)])
def test_children_counts_are_bounded_uniformly(name, t):
    ifs = preset_ifs(name)
    maxima = {int(children_counts(ifs, t, n).max()) for n in range(1, 9)}
    assert maxima == {2}


def test_moment_exponent_approaches_tau():
    ifs = preset_ifs("uneven-2-4")
    for q in (0.5, 2.0, 3.0):
        tau = lq_spectrum(ifs, q)
        gap_6 = abs(lambda_n_moment_exponent(ifs, q, 0.5, 6) - tau)
        gap_12 = abs(lambda_n_moment_exponent(ifs, q, 0.5, 12) - tau)
        assert gap_12 <= gap_6 + 1e-12


def test_cut_set_input_validation():
    with pytest.raises(DomainError):
        enumerate_lambda_n(preset_ifs("cantor3"), 1.5, 2)
    with pytest.raises(DomainError):
        enumerate_lambda_n(preset_ifs("cantor3"), 0.5, 0)


# ------------------ QUADRATURE ------------------


def test_cantor_quadrature_level_one():
    quad = measure_quadrature(preset_ifs("cantor3"), 1)
    assert np.allclose(quad.points, [1 / 6, 5 / 6])
    assert np.allclose(quad.weights, [0.5, 0.5])


def test_cantor_quadrature_moments():
    quad = measure_quadrature(preset_ifs("cantor3"), 3)
    assert quad.integrate(lambda x: x) == pytest.approx(0.5, abs=1 / 27)
    assert quad.integrate(np.ones_like) == pytest.approx(1.0)


def test_quadrature_needs_convex_osc():
    with pytest.raises(PreconditionError):
        measure_quadrature(preset_ifs("golden-bernoulli"), 3)


# ------------------ GRAPH DIMENSION AND FOURIER ------------------


def test_predicted_graph_dimension_for_cantor():
    ifs = preset_ifs("cantor3")
    dims = [predicted_graph_dim(ifs, h) for h in (0.3, 0.5, 0.7)]
    assert dims[1] == pytest.approx(1 + CANTOR_DIM / 2, abs=1e-9)
    assert dims[0] > dims[1] > dims[2]
    assert all(1.0 < d < 1.0 + CANTOR_DIM for d in dims)


def test_predicted_graph_dimension_for_lebesgue():
    ifs = preset_ifs("dyadic-uniform")
    for h in (0.3, 0.5, 0.7):
        assert predicted_graph_dim(ifs, h) == pytest.approx(2 - h, abs=1e-9)
    with pytest.raises(DomainError):
        predicted_graph_dim(ifs, 1.0)


def test_cantor_fourier_product_does_not_decay_on_powers_of_three():
    ifs = preset_ifs("cantor3")
    assert fourier_product(ifs, 0.0) == pytest.approx(1.0)
    for n in (2, 5, 8):
        assert abs(fourier_product(ifs, 3.0**n)) == pytest.approx(0.3714, abs=1e-3)


def test_fourier_product_needs_equal_ratios():
    with pytest.raises(PreconditionError):
        fourier_product(preset_ifs("uneven-2-4"), 10.0)
