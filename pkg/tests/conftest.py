import pytest

from app.schemas.schemas import ChannelParams, QubitPairDist
from app.services import channel_model


def pair_dist(eta: float, eps: float) -> QubitPairDist:
    """전송 확률과 오류율로 큐비트 쌍 분포를 만듭니다."""
    return channel_model.qubit_pair_dist_from_loss(1.0 - eta, eps)


@pytest.fixture
def perfect_pair() -> QubitPairDist:
    return QubitPairDist(eps_e=0.0, eps_i=1.0, eps_x=0.0, eps_y=0.0, eps_z=0.0)


@pytest.fixture
def noisy_pair() -> QubitPairDist:
    return pair_dist(0.95, 1e-2)


@pytest.fixture
def reference_channel() -> ChannelParams:
    # 10000 km 최적점 근처의 기준 채널
    return ChannelParams(eps_direct=1e-3, p_c=0.0, l0=1.5)
