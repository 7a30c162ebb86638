"""
해석적 분포를 독립적으로 확인하기 위한 몬테카를로 표본 추출과 완전 열거.

복호 규칙은 dist_engine.decode_grids 를 그대로 사용하고, 확률을 모으는 방식만 다릅니다.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import ENUMERATION_MAX_QUBITS, LITERAL_ENUMERATION_MAX_QUBITS, QPC_MC_CHUNK
from app.core.exceptions import DegenerateChannelError, InvalidParameterError
from app.schemas.schemas import (
    PAIR_ORDER,
    ChainEstimate,
    CodeParams,
    McConfig,
    McEstimate,
    QubitPairDist,
    TrinaryPairDist,
)
from app.services import channel_model, dist_engine, metrics

logger = logging.getLogger(__name__)

# 난수 스트림 구분용 (블록 표본과 체인 표본이 같은 스트림을 쓰지 않도록)
BLOCK_STREAM = 0
CHAIN_STREAM = 1


def _stream(seed: int, kind: int, chunk: int) -> np.random.Generator:
    # (seed, 종류, 청크 번호) 로 결정되는 독립 스트림. 작업자 수와 무관하게 같은 결과
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(kind, chunk))))


def _chunks(total: int, size: int) -> List[Tuple[int, int]]:
    return [(index, min(size, total - start)) for index, start in enumerate(range(0, total, size))]


def _pair_source(config: McConfig) -> QubitPairDist:
    if config.qubit_pair is not None:
        return config.qubit_pair
    return channel_model.qubit_pair_dist(config.channel)


def _outcome_index(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    return (alpha.astype(np.int64) % 3) * 3 + (beta.astype(np.int64) % 3)


# ---------------------------------------------------------------------------
# 블록 표본 추출
# ---------------------------------------------------------------------------


def _block_chunk(args) -> np.ndarray:
    seed, chunk, size, code, probs = args
    rng = _stream(seed, BLOCK_STREAM, chunk)
    grids = rng.choice(5, size=(size, code.n, code.m), p=probs)
    alpha, beta = dist_engine.decode_grids(grids)
    return np.bincount(_outcome_index(alpha, beta), minlength=len(PAIR_ORDER))


def sample_block(config: McConfig) -> McEstimate:
    """
    큐비트 쌍 사건을 독립적으로 뽑아 격자를 복호하고 (alpha, beta) 빈도를 셉니다.

    같은 seed 면 스레드 수와 관계없이 같은 결과가 나옵니다.
    """
    probs = np.asarray(_pair_source(config).as_tuple())
    tasks = [
        (config.seed, chunk, size, config.code, probs)
        for chunk, size in _chunks(config.samples, QPC_MC_CHUNK)
    ]
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        counts = sum(pool.map(_block_chunk, tasks))

    estimates = counts / config.samples
    std_errors = np.sqrt(estimates * (1.0 - estimates) / config.samples)
    logger.info(f"{config.code} 블록 표본 {config.samples}개 (seed={config.seed})")
    return McEstimate(
        samples=config.samples,
        counts=tuple(int(c) for c in counts),
        estimates=tuple(float(x) for x in estimates),
        std_errors=tuple(float(x) for x in std_errors),
    )


def z_scores(estimate: McEstimate, analytic: TrinaryPairDist) -> Tuple[float, ...]:
    """해석적 값의 이항 표준편차 sqrt(p(1-p)/N) 로 정규화한 편차"""
    scores = []
    for p_hat, p in zip(estimate.estimates, analytic.values):
        sigma = math.sqrt(p * (1.0 - p) / estimate.samples)
        if sigma == 0.0:
            scores.append(0.0 if p_hat == p else math.inf)
        else:
            scores.append((p_hat - p) / sigma)
    return tuple(scores)


# ---------------------------------------------------------------------------
# 완전 열거
# ---------------------------------------------------------------------------


def _bin_totals(indices: Sequence[int], weights: Sequence) -> Dict[Tuple[int, int], object]:
    bins: Dict[int, list] = {i: [] for i in range(len(PAIR_ORDER))}
    for index, weight in zip(indices, weights):
        bins[int(index)].append(weight)

    exact = any(isinstance(w, Fraction) for w in weights)
    return {key: dist_engine.sum_probabilities(bins[i], exact) for i, key in enumerate(PAIR_ORDER)}


def _enumerate_literal(n: int, m: int, probs: Sequence):
    grids = np.array(list(product(range(5), repeat=n * m)), dtype=np.int8).reshape(-1, n, m)
    alpha, beta = dist_engine.decode_grids(grids)
    weights = [math.prod(probs[c] for c in grid.ravel()) for grid in grids]
    return _bin_totals(_outcome_index(alpha, beta), weights)


def _enumerate_orbits(n: int, m: int, probs: Sequence):
    # 복호 결과는 행 안의 큐비트 순서와 행 순서에 무관하므로 궤도 대표만 복호하고 배수를 곱함
    rows = list(combinations_with_replacement(range(5), m))
    row_weights = []
    for row in rows:
        counts = [row.count(c) for c in range(5)]
        multiplicity = math.factorial(m) // math.prod(math.factorial(c) for c in counts)
        row_weights.append(multiplicity * math.prod(probs[c] ** k for c, k in enumerate(counts)))

    blocks = list(combinations_with_replacement(range(len(rows)), n))
    grids = np.array([[rows[r] for r in block] for block in blocks], dtype=np.int8)
    alpha, beta = dist_engine.decode_grids(grids)

    weights = []
    for block in blocks:
        repeats = [block.count(r) for r in set(block)]
        multiplicity = math.factorial(n) // math.prod(math.factorial(c) for c in repeats)
        weights.append(multiplicity * math.prod(row_weights[r] for r in block))
    return _bin_totals(_outcome_index(alpha, beta), weights)


def enumerate_table(n: int, m: int, probs: Sequence, literal: bool = False) -> Dict[Tuple[int, int], object]:
    """
    모든 5^(nm) 격자의 확률을 복호 결과별로 더합니다. Fraction 입력이면 정확한 유리수 결과.

    Args:
        literal: True 면 격자를 하나씩 모두 복호 (nm <= 8), False 면 궤도 대표만 복호
    """
    qubits = n * m
    limit = LITERAL_ENUMERATION_MAX_QUBITS if literal else ENUMERATION_MAX_QUBITS
    if qubits > limit:
        raise InvalidParameterError(f"완전 열거는 n*m <= {limit} 에서만 수행합니다 (n*m = {qubits})")
    if n < 1 or m < 1:
        raise InvalidParameterError(f"n, m 은 1 이상이어야 합니다: {(n, m)}")
    if literal:
        return _enumerate_literal(n, m, probs)
    return _enumerate_orbits(n, m, probs)


def enumerate_block(code: CodeParams, qd: QubitPairDist, literal: bool = False) -> TrinaryPairDist:
    """dist_engine 의 기준이 되는 정확한 p_{alpha,beta}"""
    return TrinaryPairDist.from_table(enumerate_table(code.n, code.m, qd.as_tuple(), literal))


# ---------------------------------------------------------------------------
# 체인
# ---------------------------------------------------------------------------


def chain_oracle(p: TrinaryPairDist, hops: int) -> Tuple[float, float, float]:
    """
    (X parity, Z parity) 위의 정확한 마르코프 체인. 헤럴드 실패는 흡수 상태입니다.

    Returns:
        (P_succ, Q_X, Q_Z)
    """
    if hops < 1:
        raise InvalidParameterError(f"홉 수는 1 이상이어야 합니다 (hops = {hops})")
    table = p.table()
    state = {(0, 0): 1.0, (0, 1): 0.0, (1, 0): 0.0, (1, 1): 0.0}
    for _ in range(hops):
        nxt = dict.fromkeys(state, 0.0)
        for (x, z), weight in state.items():
            for (alpha, beta), prob in table.items():
                if alpha == 0 or beta == 0:
                    continue
                nxt[(x ^ (alpha == -1), z ^ (beta == -1))] += weight * prob
        state = nxt

    p_succ = math.fsum(state.values())
    if p_succ <= 0.0:
        raise DegenerateChannelError("모든 궤적이 헤럴드 실패로 끝났습니다")
    q_x = (state[(1, 0)] + state[(1, 1)]) / p_succ
    q_z = (state[(0, 1)] + state[(1, 1)]) / p_succ
    return p_succ, q_x, q_z


def _chain_chunk(args) -> Tuple[int, int, int]:
    seed, chunk, size, code, probs, hops, forced = args
    rng = _stream(seed, CHAIN_STREAM, chunk)
    grids = rng.choice(5, size=(size, hops, code.n, code.m), p=probs)
    alpha, beta = dist_engine.decode_grids(grids)
    for hop, (forced_alpha, forced_beta) in forced.items():
        alpha[:, hop] = forced_alpha
        beta[:, hop] = forced_beta

    survived = ((alpha != 0) & (beta != 0)).all(axis=1)
    x_odd = (alpha == -1).sum(axis=1) % 2 == 1
    z_odd = (beta == -1).sum(axis=1) % 2 == 1
    return int(survived.sum()), int((survived & x_odd).sum()), int((survived & z_odd).sum())


def _proportion(hits: int, total: int) -> Tuple[Optional[float], Optional[float]]:
    if total == 0:
        return None, None
    estimate = hits / total
    return estimate, math.sqrt(estimate * (1.0 - estimate) / total)


def simulate_chain(config: McConfig, forced: Optional[Dict[int, Tuple[int, int]]] = None) -> ChainEstimate:
    """
    hops 개의 홉을 연속으로 표본 추출합니다.

    어느 홉에서든 0 결과가 나오면 실패, 살아남은 궤적은 alpha = -1 (beta = -1) 횟수의
    parity 로 X (Z) 비트 오류를 판정합니다. forced 는 {홉 번호(0부터): (alpha, beta)} 로
    해당 홉의 결과를 강제로 덮어씁니다.
    """
    forced = dict(forced or {})
    for hop, outcome in forced.items():
        if not 0 <= hop < config.hops:
            raise InvalidParameterError(f"강제 홉 번호가 범위를 벗어났습니다: {hop}")
        if tuple(outcome) not in PAIR_ORDER:
            raise InvalidParameterError(f"강제 결과가 올바르지 않습니다: {outcome}")

    qd = _pair_source(config)
    probs = np.asarray(qd.as_tuple())
    per_chunk = max(1, QPC_MC_CHUNK // config.hops)
    tasks = [
        (config.seed, chunk, size, config.code, probs, config.hops, forced)
        for chunk, size in _chunks(config.samples, per_chunk)
    ]
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        tallies = list(pool.map(_chain_chunk, tasks))
    survivors = sum(t[0] for t in tallies)
    x_errors = sum(t[1] for t in tallies)
    z_errors = sum(t[2] for t in tallies)

    p_succ, p_succ_se = _proportion(survivors, config.samples)
    q_x, q_x_se = _proportion(x_errors, survivors)
    q_z, q_z_se = _proportion(z_errors, survivors)

    analytic = {}
    if not forced:
        q = dist_engine.row_pair_dist(config.code, qd)
        p = dist_engine.encoded_pair_dist(config.code, q)
        analytic["analytic_p_succ"] = metrics.success_probability(p, config.hops)
        if p.success_mass > 0.0:
            a_qx, a_qz, _ = metrics.qber(p, config.hops)
            analytic.update(analytic_q_x=a_qx, analytic_q_z=a_qz)

    logger.info(
        f"{config.code} 체인 {config.hops}홉 궤적 {config.samples}개: 생존 {survivors}, "
        f"X 오류 {x_errors}, Z 오류 {z_errors}"
    )
    return ChainEstimate(
        trajectories=config.samples,
        hops=config.hops,
        survivors=survivors,
        p_succ=p_succ,
        p_succ_se=p_succ_se,
        q_x=q_x,
        q_x_se=q_x_se,
        q_z=q_z,
        q_z_se=q_z_se,
        **analytic,
    )
