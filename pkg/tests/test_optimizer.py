import math

import pytest

from app.core.exceptions import InvalidParameterError
from app.schemas.schemas import ChannelParams, CodeParams, CostResult, SearchConfig, SweepConfig
from app.services import channel_model, dist_engine, metrics, optimizer


def _record(**overrides) -> CostResult:
    values = dict(
        l_tot=1000.0, n=10, m=5, l0=2.0, n_stations=500, eta=0.9, eps=1e-3,
        p_succ=0.9, q_x=0.01, q_z=0.01, q=0.01, r_t0=0.7, cost=1e5, cost_coeff=100.0,
    )
    values.update(overrides)
    return CostResult(**values)


def test_cost_reference_point():
    channel = ChannelParams(eps_direct=1e-3, l0=1.5)
    result = optimizer.cost(CodeParams(n=13, m=6), channel, 1e4)
    assert result.n_stations == 6667
    assert result.r_t0 == pytest.approx(0.7822, abs=1e-3)
    assert result.cost_coeff == pytest.approx(132.96, abs=0.1)
    assert result.cost == pytest.approx(result.cost_coeff * 1e4)
    assert not result.no_key


def test_generalized_cost_exponent():
    channel = ChannelParams(eps_direct=1e-3, l0=1.5)
    full = optimizer.cost(CodeParams(n=13, m=6), channel, 1e4, k=1.0)
    none = optimizer.cost(CodeParams(n=13, m=6), channel, 1e4, k=0.0)
    assert none.cost_coeff == pytest.approx(full.cost_coeff / 156)
    assert none.k == 0.0


def test_cost_without_key_is_infinite():
    channel = ChannelParams(eps_direct=0.3, l0=1.5)
    result = optimizer.cost(CodeParams(n=2, m=2), channel, 1e4)
    assert result.no_key
    assert math.isinf(result.cost) and math.isinf(result.cost_coeff)


def test_cost_rejects_bad_exponent():
    with pytest.raises(InvalidParameterError):
        optimizer.cost(CodeParams(n=2, m=2), ChannelParams(eps_direct=1e-3), 100.0, k=1.5)


def test_tie_key_order():
    cheap = _record(cost_coeff=90.0)
    fewer_qubits = _record(n=9, m=5)
    smaller_n = _record(n=5, m=10)
    longer_spacing = _record(l0=2.1)
    base = _record()
    ordered = sorted([base, longer_spacing, smaller_n, fewer_qubits, cheap], key=lambda r: r.tie_key())
    assert ordered == [cheap, fewer_qubits, smaller_n, longer_spacing, base]


def test_cost_grid_order_and_size():
    config = SearchConfig(
        n_range=(2, 4), m_range=(2, 3), l0_grid=(1.0, 2.0),
        channel=ChannelParams(eps_direct=1e-3), l_tot=100.0,
    )
    grid = optimizer.cost_grid(config)
    assert len(grid) == 3 * 2 * 2
    assert [(r.m, r.l0, r.n) for r in grid[:4]] == [(2, 1.0, 2), (2, 1.0, 3), (2, 1.0, 4), (2, 2.0, 2)]


def test_grid_columns_match_single_points():
    config = SearchConfig(
        n_range=(3, 6), m_range=(3, 4), l0_grid=(1.2,),
        channel=ChannelParams(eps_direct=1e-3, p_c=0.05), l_tot=300.0,
    )
    for record in optimizer.cost_grid(config):
        single = optimizer.cost(
            CodeParams(n=record.n, m=record.m), config.channel.with_spacing(1.2), 300.0
        )
        assert record.cost_coeff == pytest.approx(single.cost_coeff, rel=1e-12)


@pytest.mark.parametrize(
    "l_tot, eps, p_c, n_range, m_range, expected, l0, coeff",
    [
        (1000, 1e-3, 0.0, (4, 16), (3, 8), (10, 5), 2.0, 67.30),
        (500, 1e-3, 0.0, (3, 12), (3, 6), (7, 4), 1.8, 51.05),
        (10000, 1e-3, 0.0, (8, 18), (4, 8), (13, 6), 1.5, 132.96),
        (1000, 1e-4, 0.1, (15, 28), (4, 8), (21, 6), 1.6, 260.95),
    ],
)
def test_minimize_cost_reference_optima(l_tot, eps, p_c, n_range, m_range, expected, l0, coeff):
    config = SearchConfig(
        n_range=n_range, m_range=m_range,
        channel=ChannelParams(eps_direct=eps, p_c=p_c), l_tot=l_tot,
    )
    best = optimizer.minimize_cost(config)
    assert (best.n, best.m) == expected
    assert best.l0 == pytest.approx(l0)
    assert best.cost_coeff == pytest.approx(coeff, abs=0.05)
    assert optimizer.verify_minimum(config, best, samples=100) == []


def test_verify_minimum_tolerates_rounding():
    config = SearchConfig(
        n_range=(10, 10), m_range=(5, 5), l0_grid=(2.0,),
        channel=ChannelParams(eps_direct=1e-3), l_tot=1000.0,
    )
    best = optimizer.minimize_cost(config)
    # 같은 점을 다시 계산하면 마지막 자리만 다를 수 있음
    nudged = best.model_copy(update={"cost_coeff": best.cost_coeff * (1 + 1e-13)})
    assert optimizer.verify_minimum(config, nudged, samples=10) == []

    inflated = best.model_copy(update={"cost_coeff": best.cost_coeff * 2})
    assert len(optimizer.verify_minimum(config, inflated, samples=10)) == 10


def test_minimize_cost_parallel_matches_serial():
    base = dict(
        n_range=(3, 10), m_range=(3, 5), l0_grid=(1.0, 1.5, 2.0),
        channel=ChannelParams(eps_direct=1e-3), l_tot=800.0,
    )
    serial = optimizer.minimize_cost(SearchConfig(threads=1, **base))
    parallel = optimizer.minimize_cost(SearchConfig(threads=2, **base))
    assert serial == parallel


def test_minimize_cost_without_key():
    config = SearchConfig(
        n_range=(2, 3), m_range=(2, 3), l0_grid=(3.0,),
        channel=ChannelParams(eps_direct=0.3), l_tot=1e4,
    )
    best = optimizer.minimize_cost(config)
    assert best.no_key
    assert math.isinf(best.cost_coeff)


@pytest.mark.slow
def test_minimize_cost_full_grid():
    config = SearchConfig(channel=ChannelParams(eps_direct=1e-3), l_tot=1e4)
    best = optimizer.minimize_cost(config)
    assert (best.n, best.m) == (13, 6)
    assert best.l0 == pytest.approx(1.5)


def test_threshold_small_target():
    result = optimizer.threshold_code(1e-2, 0.0, 1e-3, max_n=60, max_m=15)
    assert result.achievable
    assert (result.n, result.m) == (7, 5)
    assert result.qubits == 35
    assert result.eps_en == pytest.approx(2.3464e-4, rel=1e-3)


def test_threshold_trivial_target():
    result = optimizer.threshold_code(1e-3, 0.0, 1.0)
    assert (result.n, result.m) == (1, 1)
    assert result.eps_en == pytest.approx(1.5e-3)


@pytest.mark.parametrize(
    "eps, loss, max_n, expected, eps_en",
    [
        (1e-3, 0.0, 60, (19, 11), 1.0723e-14),
        (1e-4, 0.0, 60, (11, 9), 2.5727e-16),
        (1e-3, 0.01, 80, (27, 13), 9.79e-15),
    ],
)
def test_threshold_deep_target(eps, loss, max_n, expected, eps_en):
    result = optimizer.threshold_code(eps, loss, 2e-14, max_n=max_n)
    assert (result.n, result.m) == expected
    assert result.eps_en == pytest.approx(eps_en, rel=1e-2)
    assert result.eps_en <= 2e-14


def test_threshold_at_operating_level():
    # eps_en 약 1e-14 수준에서 247 큐비트 코드와 15% 이내
    result = optimizer.threshold_code(1e-3, 0.0, 1e-14, max_n=60)
    assert (result.n, result.m) == (21, 11)
    assert abs(result.qubits - 247) / 247 <= 0.15
    assert result.eps_en <= 1e-14

    code = CodeParams(n=19, m=13)
    qd = channel_model.qubit_pair_dist_from_loss(0.0, 1e-3)
    p = dist_engine.encoded_pair_dist(code, dist_engine.row_pair_dist(code, qd))
    assert metrics.encoded_error_rate(p) == pytest.approx(1.0196e-14, rel=1e-2)


def test_threshold_unreachable():
    result = optimizer.threshold_code(0.2, 0.3, 1e-12, max_n=8, max_m=4)
    assert not result.achievable
    assert result.qubits is None


def test_threshold_rejects_bad_target():
    with pytest.raises(InvalidParameterError):
        optimizer.threshold_code(1e-3, 0.0, 0.0)


def test_sweep_over_distance():
    config = SweepConfig(
        base=SearchConfig(n_range=(3, 12), m_range=(3, 6), channel=ChannelParams(eps_direct=1e-3)),
        axis="l_tot",
        values=(250.0, 500.0, 1000.0),
    )
    results = optimizer.sweep(config)
    assert [r.l_tot for r in results] == [250.0, 500.0, 1000.0]
    assert (results[1].n, results[1].m) == (7, 4)
    coeffs = [r.cost_coeff for r in results]
    assert coeffs == sorted(coeffs)

    fit = optimizer.polylog_fit(results)
    assert fit.points == 3
    assert fit.monotone


def test_sweep_over_error_rate():
    config = SweepConfig(
        base=SearchConfig(
            n_range=(3, 16), m_range=(3, 7), channel=ChannelParams(eps_direct=1e-3), l_tot=1000.0
        ),
        axis="eps",
        values=(1e-4, 1e-3),
    )
    results = optimizer.sweep(config)
    assert [r.eps for r in results] == [1e-4, 1e-3]
    assert results[0].cost_coeff < results[1].cost_coeff


def test_sweep_keeps_no_key_points():
    config = SweepConfig(
        base=SearchConfig(
            n_range=(2, 4), m_range=(2, 3), l0_grid=(1.0,), channel=ChannelParams(eps_direct=1e-3), l_tot=500.0
        ),
        axis="eps",
        values=(1e-3, 0.3),
    )
    results = optimizer.sweep(config)
    assert len(results) == 2
    assert not results[0].no_key
    assert results[1].no_key


def test_polylog_fit_needs_two_distances():
    with pytest.raises(InvalidParameterError):
        optimizer.polylog_fit([_record()])


@pytest.mark.slow
def test_default_distance_sweep():
    results = optimizer.sweep(SweepConfig())
    assert len(results) == 20
    assert not any(r.no_key for r in results)
    by_distance = {r.l_tot: (r.n, r.m) for r in results}
    assert by_distance[500.0] == (7, 4)
    assert by_distance[1000.0] == (10, 5)
    assert by_distance[10000.0] == (13, 6)
    assert all(1.3 <= r.l0 <= 2.1 for r in results)
    # 전 구간에서 소수의 코드만 최적점으로 나타남
    assert 3 <= len(set(by_distance.values())) <= 5
    assert optimizer.polylog_fit(results).monotone
