import logging
import math

from app.core.exceptions import InvalidParameterError
from app.schemas.schemas import ChannelParams, QubitPairDist

logger = logging.getLogger(__name__)

# 이온 트랩 실험값 (2큐비트 게이트, 측정, 단일 큐비트 탈분극)
ION_TRAP_PRESET = ChannelParams(eps_g=0.007, eps_m=1e-4, eps_d=2e-5)


def effective_epsilon(params: ChannelParams) -> float:
    """
    유효 오류율 eps = eps_d + eps_g/2 + 2*eps_m 를 계산합니다.

    eps_direct 가 있으면 그 값을 그대로 사용합니다. 2차 항은 무시하며,
    합이 1을 넘으면 경고를 남기고 1로 자릅니다.
    """
    if params.eps_direct is not None:
        return params.eps_direct

    eps = params.eps_d + params.eps_g / 2 + 2 * params.eps_m
    if eps > 1.0:
        logger.warning(f"유효 오류율 {eps:.6g} 이(가) 1을 넘어 1로 제한합니다")
        return 1.0
    return eps


def transmission(params: ChannelParams) -> float:
    """eta = (1 - p_c) * exp(-L0 / L_att)"""
    return (1.0 - params.p_c) * math.exp(-params.l0 / params.l_att)


def above_capacity(eta: float) -> bool:
    # 소거 채널 용량 max(0, 2*eta - 1) 이 양수인지 여부
    return eta > 0.5


def _pair_dist(eta: float, eps: float) -> QubitPairDist:
    if not 0.0 < eta <= 1.0:
        raise InvalidParameterError(f"전송 확률 eta 는 (0, 1] 범위여야 합니다: {eta!r}")

    eps_i = eta * (1.0 - 1.5 * eps)
    if eps_i < 0.0:
        raise InvalidParameterError(
            f"eps = {eps!r} 에서 eps_I = eta(1 - 3eps/2) 가 음수입니다 (eps <= 2/3 필요)"
        )
    if not above_capacity(eta):
        logger.warning(f"eta = {eta:.6g} <= 1/2: 큰 코드에서도 복호가 실패하는 영역입니다")

    flip = eta * eps / 2
    # 손실 확률은 1 - eta 를 그대로 쓰고, 나머지 네 항목이 eta 를 정확히 나눠 가짐
    return QubitPairDist(eps_e=1.0 - eta, eps_i=eps_i, eps_x=flip, eps_y=flip, eps_z=flip)


def qubit_pair_dist(params: ChannelParams) -> QubitPairDist:
    """
    채널 파라미터로부터 큐비트 쌍 하나의 다섯 가지 사건 확률을 계산합니다.

    Returns:
        QubitPairDist: (eps_e, eps_I, eps_X, eps_Y, eps_Z)
            eps_e = 1 - eta, eps_X = eps_Y = eps_Z = eta*eps/2, eps_I = eta(1 - 3eps/2)
    """
    return _pair_dist(transmission(params), effective_epsilon(params))


def qubit_pair_dist_from_loss(loss: float, eps: float) -> QubitPairDist:
    """손실 확률(1 - eta)을 직접 주는 경우. 임계 코드 표가 이 형태를 씁니다."""
    if not 0.0 <= loss < 1.0:
        raise InvalidParameterError(f"손실 확률은 [0, 1) 범위여야 합니다: {loss!r}")
    if not 0.0 <= eps <= 1.0:
        raise InvalidParameterError(f"오류율은 [0, 1] 범위여야 합니다: {eps!r}")
    return _pair_dist(1.0 - loss, eps)
