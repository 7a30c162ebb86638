import math

import numpy as np
import pytest

from app.core.exceptions import DegenerateChannelError, InvalidParameterError
from app.schemas.schemas import ChannelParams, CodeParams, TrinaryPairDist
from app.services.metrics import (
    QBER_ZERO_KEY,
    binary_entropy,
    chain_metrics,
    encoded_error_rate,
    key_rate,
    key_rate_per_second,
    qber,
    repeater_metrics,
    secret_fraction,
    success_probability,
)


def test_binary_entropy():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0)
    assert binary_entropy(0.11) == pytest.approx(binary_entropy(0.89))


def test_zero_key_qber():
    assert QBER_ZERO_KEY == pytest.approx(0.110028, abs=1e-6)
    assert secret_fraction(QBER_ZERO_KEY) == pytest.approx(0.0, abs=1e-12)


def test_success_probability_large_n():
    p = TrinaryPairDist.from_table({(1, 1): 0.9999, (0, 1): 1e-4})
    assert success_probability(p, 6667) == pytest.approx(0.51338, rel=1e-4)
    assert success_probability(p, 1) == pytest.approx(0.9999)


def test_success_probability_all_heralded():
    p = TrinaryPairDist.from_table({(0, 0): 1.0})
    assert success_probability(p, 10) == 0.0


def test_success_probability_requires_station():
    p = TrinaryPairDist.from_table({(1, 1): 1.0})
    with pytest.raises(InvalidParameterError):
        success_probability(p, 0)


def test_qber_symmetric_table():
    p = TrinaryPairDist.from_table({(1, 1): 0.999, (-1, -1): 0.0005, (0, 0): 0.0005})
    s = 0.9995
    expected = 0.5 * (1 - (1 - 2 * 0.0005 / s) ** 100)
    q_x, q_z, q = qber(p, 100)
    assert q_x == pytest.approx(expected, rel=1e-10)
    assert q_z == pytest.approx(expected, rel=1e-10)
    assert q == pytest.approx(0.0476, abs=1e-3)


def test_qber_separates_channels():
    # alpha = -1 은 X 쪽, beta = -1 은 Z 쪽
    p = TrinaryPairDist.from_table({(1, 1): 0.99, (-1, 1): 0.01})
    q_x, q_z, q = qber(p, 1)
    assert q_x == pytest.approx(0.01)
    assert q_z == 0.0
    assert q == pytest.approx(0.005)


def test_qber_tends_to_half():
    p = TrinaryPairDist.from_table({(1, 1): 0.9, (1, -1): 0.1})
    _, q_z, _ = qber(p, 5000)
    assert q_z == pytest.approx(0.5)


def test_qber_without_successes():
    p = TrinaryPairDist.from_table({(0, 1): 0.5, (1, 0): 0.5})
    with pytest.raises(DegenerateChannelError):
        qber(p, 3)


def test_key_rate():
    assert key_rate(0.8, 0.02) == pytest.approx(0.573695, abs=1e-6)
    assert key_rate(0.8, 0.02, t0=2.0) == pytest.approx(0.573695 / 2, abs=1e-6)
    assert key_rate(1.0, 0.2) == 0.0
    assert key_rate(1.0, 0.0) == 1.0


def test_key_rate_rejects_bad_input():
    with pytest.raises(InvalidParameterError):
        key_rate(1.5, 0.01)
    with pytest.raises(InvalidParameterError):
        key_rate(0.5, 0.01, t0=0.0)


def test_key_rate_per_second():
    assert key_rate_per_second(0.59, 1e-6) == pytest.approx(5.9e5)


def test_encoded_error_rate_keeps_small_values():
    p = TrinaryPairDist.from_table({(1, 1): 1.0 - 3e-17, (0, 1): 3e-17})
    assert encoded_error_rate(p) == pytest.approx(3e-17)


def test_repeater_metrics_fields():
    p = TrinaryPairDist.from_table({(1, 1): 0.99, (0, 1): 0.01})
    result = repeater_metrics(p, 10, t0=1e-6)
    assert result.p_succ == pytest.approx(0.99**10)
    assert result.q == 0.0
    assert result.r_t0 == pytest.approx(result.p_succ)
    assert result.rate == pytest.approx(result.p_succ / 1e-6)
    assert result.eps_en == pytest.approx(0.01)


# (n, m, eps, p_c, L0, L_tot, 두 자리 R*t0, 네 자리 R*t0)
REFERENCE_CHAINS = [
    (7, 4, 1e-4, 0.0, 1.7, 1000, 0.72, 0.7163),
    (9, 5, 1e-4, 0.0, 1.3, 1e4, 0.80, 0.8091),
    (10, 5, 1e-3, 0.0, 2.0, 1000, 0.74, 0.7429),
    (13, 6, 1e-3, 0.0, 1.5, 1e4, 0.78, 0.7822),
    (21, 6, 1e-4, 0.1, 1.6, 1000, 0.60, 0.6036),
    (28, 7, 1e-4, 0.1, 1.0, 1e4, 0.57, 0.5737),
    (31, 7, 1e-3, 0.1, 1.8, 1000, 0.67, 0.6668),
    (41, 8, 1e-3, 0.1, 1.2, 1e4, 0.59, 0.5888),
]


@pytest.mark.parametrize("n, m, eps, p_c, l0, l_tot, rounded, computed", REFERENCE_CHAINS)
def test_reference_chain_rates(n, m, eps, p_c, l0, l_tot, rounded, computed):
    channel = ChannelParams(eps_direct=eps, p_c=p_c, l0=l0)
    result = chain_metrics(CodeParams(n=n, m=m), channel, l_tot)
    assert result.r_t0 == pytest.approx(computed, abs=1e-3)
    assert result.r_t0 == pytest.approx(rounded, abs=0.03)


def test_chain_metrics_details():
    channel = ChannelParams(eps_direct=1e-3, l0=1.5)
    result = chain_metrics(CodeParams(n=13, m=6), channel, 1e4)
    assert result.n_stations == 6667
    assert result.l0_eff == pytest.approx(1e4 / 6667)
    assert result.eta == pytest.approx(math.exp(-(1e4 / 6667) / 20))
    assert result.eta == pytest.approx(0.927747, abs=1e-6)
    assert result.p_succ == pytest.approx(0.8411, abs=1e-3)
    assert result.eps == 1e-3
    assert 0.0 < result.q < QBER_ZERO_KEY


def test_chain_metrics_exact_spacing():
    channel = ChannelParams(eps_direct=1e-3, l0=2.0)
    result = chain_metrics(CodeParams(n=10, m=5), channel, 1000)
    assert result.n_stations == 500
    assert result.l0_eff == pytest.approx(2.0)


def test_no_key_for_bad_channel():
    channel = ChannelParams(eps_direct=0.3, l0=1.5)
    result = chain_metrics(CodeParams(n=2, m=2), channel, 1e4)
    assert result.r_t0 == 0.0
    assert result.rate == 0.0


def test_error_free_chain_has_zero_qber():
    channel = ChannelParams(eps_direct=0.0, l0=1.0)
    result = chain_metrics(CodeParams(n=5, m=4), channel, 5000)
    assert result.q_x == result.q_z == 0.0
    assert result.r_t0 == pytest.approx(result.p_succ)


def test_key_rate_non_increasing_in_qber():
    rates = [key_rate(0.9, q) for q in np.linspace(0.0, QBER_ZERO_KEY, 400)]
    assert all(later <= earlier for earlier, later in zip(rates, rates[1:]))
    assert rates[-1] == pytest.approx(0.0, abs=1e-12)
