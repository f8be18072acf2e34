import math

import pytest

import popsync


def pair(k, second=(1.0, 2.0), n=100):
    return popsync.System(
        k,
        [popsync.Population(n, 1.0, 2.0), popsync.Population(n, *second)],
    )


def test_identical_closed_form():
    s = popsync.identical_critical([[3, 1], [-3.5, -1]], 1.0, 2.0)
    assert s.eta_star == pytest.approx([2 * (2 - math.sqrt(2)), 2 * (2 + math.sqrt(2))], abs=1e-12)
    assert s.relevant_positive == pytest.approx(2 * (2 - math.sqrt(2)))
    assert s.relevant_negative is None
    assert popsync.identical_critical([[1, -1], [2, -1]], 1.0, 2.0).empty()


def test_heterogeneous_scan():
    s = popsync.find_critical_couplings(pair([[-1, -1], [1, 2]], second=(0.5, 4.0)))
    assert s.eta_star == pytest.approx([-2.809, 0.515], abs=5e-3)
    for sol in s.solutions:
        system = pair([[-1, -1], [1, 2]], second=(0.5, 4.0))
        assert abs(popsync.evaluate_determinant(system, sol.eta_star, sol.v_star)) < 1e-6


def test_analyze_uses_closed_form_for_identical_pairs():
    s = popsync.analyze(pair([[1, -1], [1, 0]]))
    assert s.eta_star == [4.0]


def test_dispersion_roots_single_population():
    system = popsync.System([[1.0]], [popsync.Population(10, 1.0, 0.0)])
    roots = popsync.dispersion_roots_at(system, 0.0)
    assert roots == [pytest.approx(2.0)]


def test_trial_and_sweep():
    params = popsync.SimParams()
    params.t_transient = 5
    params.t_average = 5
    system = pair([[1, -1], [1, 0]], n=50)
    system.eta = 6.0
    trial = popsync.run_trial(system, params)
    assert len(trial.r_mean) == 2
    assert all(0.0 <= r <= 1.0 for r in trial.r_mean)

    sweep = popsync.sweep_eta(system, [0.0, 6.0], params, threads=1)
    assert sweep.eta == [0.0, 6.0]
    again = popsync.sweep_eta(system, [0.0, 6.0], params, threads=2)
    assert sweep.r_mean == again.r_mean
    assert isinstance(popsync.detect_onset(sweep, 0), list)


def test_distributions():
    d = popsync.Lorentzian(omega0=2.0, delta=1.0)
    assert popsync.lorentzian_pdf(d, 2.0) == pytest.approx(1 / math.pi)
    assert popsync.lorentzian_quantile(d, 0.75) == pytest.approx(3.0)
    w = popsync.sample_frequencies(d, 5)
    assert w[2] == 2.0
    assert w[0] == pytest.approx(4.0 - w[4])


def test_errors():
    with pytest.raises(popsync.ConfigError):
        popsync.System([[1.0]], [popsync.Population(10, -1.0, 0.0)])
    with pytest.raises(ValueError):
        popsync.lorentzian_quantile(popsync.Lorentzian(0.0, 1.0), 1.5)
