import logging
import math
from typing import Optional, Tuple

from app.core.exceptions import DegenerateChannelError, InvalidParameterError
from app.schemas.schemas import (
    ChainParams,
    ChannelParams,
    CodeParams,
    RepeaterMetrics,
    TrinaryPairDist,
)
from app.services import channel_model, dist_engine

logger = logging.getLogger(__name__)


def binary_entropy(q: float) -> float:
    """h(q) = -q log2 q - (1-q) log2 (1-q), 양 끝점은 0"""
    if q <= 0.0 or q >= 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def secret_fraction(q: float) -> float:
    return 1.0 - 2.0 * binary_entropy(q)


def _zero_key_qber(tol: float = 1e-15) -> float:
    # 1 - 2h(Q) = 0 의 근을 [0, 1/2] 에서 이분법으로 구함
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if secret_fraction(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo


# 비밀 비율이 0 이 되는 QBER (약 0.110028)
QBER_ZERO_KEY = _zero_key_qber()


def success_probability(p: TrinaryPairDist, n_stations: int) -> float:
    """
    N 홉 동안 헤럴드 실패가 한 번도 없을 확률 s^N.

    s = 1 - (헤럴드 질량) 이므로 log1p 로 계산해 큰 N 에서도 정확도를 유지합니다.
    """
    if n_stations < 1:
        raise InvalidParameterError(f"스테이션 수는 1 이상이어야 합니다 (N = {n_stations})")
    heralded = p.heralded_mass
    if heralded >= 1.0:
        return 0.0
    return math.exp(n_stations * math.log1p(-heralded))


def _odd_flip_probability(silent: float, s: float, n_stations: int) -> float:
    # 1/2 (1 - r^N), r = 1 - 2 * silent / s
    ratio = 2.0 * silent / s
    if ratio < 1.0:
        return -0.5 * math.expm1(n_stations * math.log1p(-ratio))
    return 0.5 * (1.0 - (1.0 - ratio) ** n_stations)


def qber(p: TrinaryPairDist, n_stations: int) -> Tuple[float, float, float]:
    """
    헤럴드 실패가 없었다는 조건에서 홀수 번 반전될 확률 (Q_X, Q_Z, Q).

    alpha = -1 은 Q_X, beta = -1 은 Q_Z 에 들어갑니다. Q 는 두 값의 평균입니다.
    """
    if n_stations < 1:
        raise InvalidParameterError(f"스테이션 수는 1 이상이어야 합니다 (N = {n_stations})")
    s = p.success_mass
    if s <= 0.0:
        raise DegenerateChannelError("헤럴드 실패가 아닌 결과의 확률이 0 이라 QBER 를 정의할 수 없습니다")

    q_x = _odd_flip_probability(p.silent_x_mass, s, n_stations)
    q_z = _odd_flip_probability(p.silent_z_mass, s, n_stations)
    return q_x, q_z, (q_x + q_z) / 2


def key_rate(p_succ: float, q: float, t0: float = 1.0) -> float:
    """R = max[(1/t0) P_succ (1 - 2h(Q)), 0]"""
    if not 0.0 <= p_succ <= 1.0:
        raise InvalidParameterError(f"P_succ 는 [0, 1] 범위여야 합니다: {p_succ!r}")
    if t0 <= 0.0:
        raise InvalidParameterError(f"t0 는 양수여야 합니다: {t0!r}")
    return max(p_succ * secret_fraction(q) / t0, 0.0)


def key_rate_per_second(r_t0: float, t0_seconds: float) -> float:
    """R*t0 를 초당 비밀 비트로 환산 (예: t0 = 1e-6 s 이면 0.59 -> 5.9e5)"""
    if t0_seconds <= 0.0:
        raise InvalidParameterError(f"t0 는 양수여야 합니다: {t0_seconds!r}")
    return r_t0 / t0_seconds


def encoded_error_rate(p: TrinaryPairDist) -> float:
    # 1 - p_{1,1} 을 빼기 없이 나머지 8개 항목의 합으로 계산
    return min(p.error_mass, 1.0)


def repeater_metrics(
    p: TrinaryPairDist,
    n_stations: int,
    t0: float = 1.0,
    l0_eff: Optional[float] = None,
    eta: Optional[float] = None,
    eps: Optional[float] = None,
) -> RepeaterMetrics:
    """블록 분포 p 와 스테이션 수로부터 체인 전체 지표를 계산합니다."""
    p_succ = success_probability(p, n_stations)
    q_x, q_z, q = qber(p, n_stations)
    rate = key_rate(p_succ, q, t0)
    return RepeaterMetrics(
        n_stations=n_stations,
        l0_eff=l0_eff,
        eta=eta,
        eps=eps,
        p_succ=p_succ,
        q_x=q_x,
        q_z=q_z,
        q=q,
        r_t0=rate * t0,
        rate=rate,
        eps_en=encoded_error_rate(p),
    )


def chain_metrics(code: CodeParams, channel: ChannelParams, l_tot: float) -> RepeaterMetrics:
    """
    eta -> 큐비트 쌍 -> 행 -> 블록 -> 체인 지표까지 전체를 계산합니다.

    N = ceil(L_tot / L0) 로 정하고, 실제 간격 L_tot / N 으로 eta 를 다시 계산합니다.
    """
    chain = ChainParams.from_spacing(l_tot, channel.l0)
    spaced = channel.with_spacing(chain.l0_eff)

    qd = channel_model.qubit_pair_dist(spaced)
    q = dist_engine.row_pair_dist(code, qd)
    p = dist_engine.encoded_pair_dist(code, q)

    result = repeater_metrics(
        p,
        chain.n_stations,
        t0=channel.t0,
        l0_eff=chain.l0_eff,
        eta=channel_model.transmission(spaced),
        eps=channel_model.effective_epsilon(spaced),
    )
    logger.debug(
        f"{code} L0={chain.l0_eff:.4f} N={chain.n_stations} "
        f"P_succ={result.p_succ:.4g} Q={result.q:.3e} R*t0={result.r_t0:.4f}"
    )
    return result
