import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import THRESHOLD_MAX_M, THRESHOLD_MAX_N, VERIFY_REL_TOL
from app.core.exceptions import InvalidParameterError
from app.schemas.schemas import (
    ChainParams,
    ChannelParams,
    CodeParams,
    CostResult,
    PolylogFit,
    SearchConfig,
    SweepConfig,
    ThresholdResult,
    TrinaryPairDist,
)
from app.services import channel_model, dist_engine, metrics

logger = logging.getLogger(__name__)


def _cost_record(
    code: CodeParams,
    p: TrinaryPairDist,
    chain: ChainParams,
    channel: ChannelParams,
    eta: float,
    eps: float,
    k: float,
) -> CostResult:
    """블록 분포 하나로부터 비용 레코드를 만듭니다. 키가 없으면 비용은 무한대입니다."""
    if p.success_mass > 0.0:
        p_succ = metrics.success_probability(p, chain.n_stations)
        q_x, q_z, q = metrics.qber(p, chain.n_stations)
        r_t0 = metrics.key_rate(p_succ, q)
    else:
        # 모든 결과가 헤럴드 실패인 경우
        p_succ, q_x, q_z, q, r_t0 = 0.0, 0.5, 0.5, 0.5, 0.0

    no_key = r_t0 <= 0.0
    if no_key:
        cost = cost_coeff = math.inf
    else:
        # C' = (2nm)^k / (R t0 L0),  C = C' * L_tot
        cost_coeff = (2 * code.n * code.m) ** k / (r_t0 * chain.l0_eff)
        cost = cost_coeff * chain.l_tot

    return CostResult(
        l_tot=chain.l_tot,
        n=code.n,
        m=code.m,
        l0=chain.l0,
        n_stations=chain.n_stations,
        eta=eta,
        eps=eps,
        p_c=channel.p_c,
        p_succ=p_succ,
        q_x=q_x,
        q_z=q_z,
        q=q,
        r_t0=r_t0,
        cost=cost,
        cost_coeff=cost_coeff,
        k=k,
        no_key=no_key,
    )


def _spaced_channel(channel: ChannelParams, l_tot: float, l0: float):
    chain = ChainParams.from_spacing(l_tot, l0)
    spaced = channel.with_spacing(chain.l0_eff)
    return chain, spaced


def cost(code: CodeParams, channel: ChannelParams, l_tot: float, k: float = 1.0) -> CostResult:
    """
    한 점 (n, m, L0) 의 비용을 계산합니다.

    Args:
        code: 코드 파라미터
        channel: 채널 파라미터 (channel.l0 가 중계기 간격)
        l_tot: 전체 거리 (km)
        k: 일반화 비용의 지수 (k = 1 이 기본 비용)

    Returns:
        CostResult: R = 0 이면 no_key = True, 비용은 무한대
    """
    if not 0.0 <= k <= 1.0:
        raise InvalidParameterError(f"k 는 [0, 1] 범위여야 합니다: {k!r}")
    chain, spaced = _spaced_channel(channel, l_tot, channel.l0)
    qd = channel_model.qubit_pair_dist(spaced)
    q = dist_engine.row_pair_dist(code, qd)
    p = dist_engine.encoded_pair_dist(code, q)
    return _cost_record(
        code,
        p,
        chain,
        channel,
        channel_model.transmission(spaced),
        channel_model.effective_epsilon(spaced),
        k,
    )


def _evaluate_column(args) -> List[CostResult]:
    """같은 (m, L0) 에서 n 을 늘려 가며 한 번의 DP 로 평가합니다."""
    m, l0, n_range, channel, l_tot, k = args
    n_lo, n_hi = n_range
    chain, spaced = _spaced_channel(channel, l_tot, l0)
    eta = channel_model.transmission(spaced)
    eps = channel_model.effective_epsilon(spaced)

    qd = channel_model.qubit_pair_dist(spaced)
    q = dist_engine.row_pair_dist(CodeParams(n=1, m=m), qd)

    column = []
    for n, p in dist_engine.encoded_pair_dists(q, n_hi):
        if n < n_lo:
            continue
        column.append(_cost_record(CodeParams(n=n, m=m), p, chain, channel, eta, eps, k))
    logger.debug(f"m={m} L0={l0} 열 평가 완료 ({len(column)}개)")
    return column


def _columns(config: SearchConfig) -> List[tuple]:
    m_lo, m_hi = config.m_range
    return [
        (m, l0, config.n_range, config.channel, config.l_tot, config.k)
        for m in range(m_lo, m_hi + 1)
        for l0 in config.l0_grid
    ]


def _map_columns(config: SearchConfig, reducer):
    # 수집은 열 순서대로 하고, 감소는 항상 수집 이후에 같은 순서로 적용
    columns = _columns(config)
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            return [reducer(column) for column in pool.map(_evaluate_column, columns)]
    return [reducer(_evaluate_column(args)) for args in columns]


def _best(results: Sequence[CostResult]) -> CostResult:
    return min(results, key=lambda r: r.tie_key())


def cost_grid(config: SearchConfig) -> List[CostResult]:
    """탐색 범위의 모든 격자점을 (m, L0, n) 순서로 반환합니다."""
    columns = _map_columns(config, lambda column: column)
    return [result for column in columns for result in column]


def minimize_cost(config: SearchConfig) -> CostResult:
    """
    (n, m, L0) 격자 전체를 탐색해 최소 비용 점을 찾습니다.

    동률은 적은 큐비트 수, 작은 n, 큰 L0 순서로 결정합니다. 어떤 점에서도 키가
    나오지 않으면 no_key = True 인 레코드를 반환합니다.
    """
    best = _best(_map_columns(config, _best))
    if best.no_key:
        logger.warning(f"L_tot={config.l_tot} km: 탐색 범위 안에 키를 얻을 수 있는 점이 없습니다")
    else:
        logger.info(
            f"L_tot={config.l_tot} km 최적점: ({best.n},{best.m}) L0={best.l0} "
            f"R*t0={best.r_t0:.4f} C'={best.cost_coeff:.4f}"
        )
    return best


def verify_minimum(
    config: SearchConfig, result: CostResult, samples: int = 100, seed: int = 0
) -> List[CostResult]:
    """격자에서 임의의 점을 다시 계산해 최적점보다 비용이 낮은 점들을 반환합니다 (정상이면 빈 목록)."""
    rng = np.random.default_rng(seed)
    n_lo, n_hi = config.n_range
    m_lo, m_hi = config.m_range

    violations = []
    for _ in range(samples):
        code = CodeParams(n=int(rng.integers(n_lo, n_hi + 1)), m=int(rng.integers(m_lo, m_hi + 1)))
        l0 = config.l0_grid[int(rng.integers(len(config.l0_grid)))]
        point = cost(code, config.channel.with_spacing(l0), config.l_tot, config.k)
        # 열 DP 와 단일 점 계산의 반올림 차이는 위반으로 보지 않음
        if point.cost_coeff < result.cost_coeff * (1.0 - VERIFY_REL_TOL):
            violations.append(point)
    return violations


def threshold_code(
    eps: float,
    loss: float,
    target: float,
    max_n: int = THRESHOLD_MAX_N,
    max_m: int = THRESHOLD_MAX_M,
) -> ThresholdResult:
    """
    단일 홉 eps_en <= target 을 만족하는 가장 작은 코드를 찾습니다.

    큐비트 수 n*m 이 가장 작은 코드를, 같으면 n 이 작은 코드를 고릅니다.
    """
    if not 0.0 < target <= 1.0:
        raise InvalidParameterError(f"목표 오류율은 (0, 1] 범위여야 합니다: {target!r}")
    qd = channel_model.qubit_pair_dist_from_loss(loss, eps)

    best: Optional[Tuple[int, int, int, float]] = None
    for m in range(1, max_m + 1):
        q = dist_engine.row_pair_dist(CodeParams(n=1, m=m), qd)
        for n, p in dist_engine.encoded_pair_dists(q, max_n):
            if best is not None and (n * m, n) >= best[:2]:
                break
            eps_en = metrics.encoded_error_rate(p)
            if eps_en <= target:
                best = (n * m, n, m, eps_en)
                break

    if best is None:
        logger.warning(f"eps={eps} loss={loss}: n <= {max_n}, m <= {max_m} 범위에서 목표 {target} 에 도달하지 못했습니다")
        return ThresholdResult(eps=eps, loss=loss, target=target, achievable=False)

    _, n, m, eps_en = best
    logger.info(f"eps={eps} loss={loss} 목표 {target}: ({n},{m}) 큐비트 {n * m}개, eps_en={eps_en:.3e}")
    return ThresholdResult(eps=eps, loss=loss, target=target, achievable=True, n=n, m=m, eps_en=eps_en)


def _point_config(config: SweepConfig, value: float) -> SearchConfig:
    base = config.base
    if config.axis == "l_tot":
        return base.model_copy(update={"l_tot": value})
    if config.axis == "eps":
        return base.model_copy(update={"channel": base.channel.with_eps(value)})
    if config.axis == "p_c":
        return base.model_copy(update={"channel": base.channel.with_coupling_loss(value)})
    return base.model_copy(update={"k": value})


def sweep(config: SweepConfig) -> List[CostResult]:
    """스윕 축의 값마다 최적화한 결과를 한 행씩 반환합니다. 키가 없는 점도 표에 남깁니다."""
    results = []
    for index, value in enumerate(config.values, start=1):
        point = _point_config(config, value)
        # model_copy 는 검증을 건너뛰므로 다시 검증
        point = SearchConfig.model_validate(point.model_dump())
        logger.info(f"스윕 {config.axis}={value} ({index}/{len(config.values)})")
        results.append(minimize_cost(point))
    return results


def polylog_fit(results: Sequence[CostResult]) -> PolylogFit:
    """log C' 를 log log L_tot 에 대해 1차 회귀합니다 (진단용)."""
    points = [r for r in results if not r.no_key and r.l_tot > math.e]
    if len({r.l_tot for r in points}) < 2:
        raise InvalidParameterError("회귀에는 서로 다른 L_tot 의 유효한 점이 2개 이상 필요합니다")

    x = np.log(np.log([r.l_tot for r in points]))
    y = np.log([r.cost_coeff for r in points])
    slope, intercept = np.polyfit(x, y, 1)
    return PolylogFit(
        slope=float(slope),
        intercept=float(intercept),
        monotone=bool(slope > 0),
        points=len(points),
    )
