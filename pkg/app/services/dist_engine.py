"""
행 단위(q) 와 부호화 블록 단위(p) 의 삼진 결과 분포를 계산합니다.

두 가지 경로를 제공합니다.
    - reference: 다항계수 합을 그대로 계산합니다. 입력이 Fraction 이면 결과도 정확한 유리수입니다.
    - dp: 큐비트(또는 행)를 하나씩 합성곱하는 동적 계획법. 모든 크기에서 사용합니다.
"""
import logging
import math
from fractions import Fraction
from typing import Dict, Iterator, Literal, Sequence, Tuple

import numpy as np

from app.core.config import REFERENCE_MAX_M, REFERENCE_MAX_N
from app.core.exceptions import InvalidParameterError
from app.schemas.schemas import (
    PAIR_ORDER,
    CodeParams,
    QubitOutcome,
    QubitPairDist,
    TrinaryPairDist,
)

logger = logging.getLogger(__name__)

Method = Literal["reference", "dp"]
PairTable = Dict[Tuple[int, int], object]


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def _multinomial(*counts: int) -> int:
    result, total = 1, 0
    for c in counts:
        total += c
        result *= math.comb(total, c)
    return result


def _empty_table() -> PairTable:
    return {key: 0 for key in PAIR_ORDER}


def sum_probabilities(values, exact: bool):
    """유리수 경로는 Fraction 으로 정확히 더하고 (빈 합은 Fraction(0)), 부동소수 경로는 fsum"""
    if exact:
        return sum((Fraction(v) for v in values), Fraction(0))
    return math.fsum(float(v) for v in values)


def _is_exact(values) -> bool:
    return any(isinstance(v, Fraction) for v in values)


def _check_method(method: str):
    if method not in ("reference", "dp"):
        raise InvalidParameterError(f"지원하지 않는 계산 방식입니다: {method!r}")


# ---------------------------------------------------------------------------
# 행 단위 분포 q
# ---------------------------------------------------------------------------


def _row_table_reference(m: int, probs: Sequence) -> PairTable:
    if m > REFERENCE_MAX_M:
        raise InvalidParameterError(
            f"reference 경로는 m <= {REFERENCE_MAX_M} 에서만 계산합니다 (m = {m})"
        )
    exact = _is_exact(probs)
    eps_e, eps_i, eps_x, eps_y, eps_z = probs
    flip, keep = eps_x + eps_y, eps_z + eps_i
    bins = {key: [] for key in PAIR_ORDER}

    # 손실이 하나라도 있으면 alpha = 0. w 는 X 또는 Y (Z 부호 반전) 개수
    for a in range(1, m + 1):
        for w in range(m - a + 1):
            beta = _sign((m - a) - 2 * w)
            bins[(0, beta)].append(
                _multinomial(a, w, m - a - w) * eps_e**a * flip**w * keep ** (m - a - w)
            )

    # 손실이 없는 경우. v = Y + Z 개수 (parity 가 alpha), c = Y 개수, b = X 개수
    for v in range(m + 1):
        alpha = 1 if v % 2 == 0 else -1
        for c in range(v + 1):
            for b in range(m - v + 1):
                beta = _sign(m - 2 * (b + c))
                bins[(alpha, beta)].append(
                    _multinomial(v - c, c, b, m - b - v)
                    * eps_x**b
                    * eps_y**c
                    * eps_z ** (v - c)
                    * eps_i ** (m - b - v)
                )

    return {key: sum_probabilities(values, exact) for key, values in bins.items()}


def _row_table_dp(m: int, probs: Sequence) -> PairTable:
    eps_e, eps_i, eps_x, eps_y, eps_z = probs
    exact = _is_exact(probs)
    dtype = object if exact else np.float64

    # state[a, parity, k]: 손실 a 개, Y/Z 개수의 parity, 살아남은 큐비트 중 X/Y 개수 k
    state = np.zeros((m + 1, 2, m + 1), dtype=dtype)
    state[0, 0, 0] = 1
    for _ in range(m):
        nxt = np.zeros_like(state)
        nxt[1:] += eps_e * state[:-1]
        nxt += eps_i * state
        nxt[:, :, 1:] += eps_x * state[:, :, :-1]
        nxt[:, :, 1:] += eps_y * state[:, ::-1, :-1]
        nxt += eps_z * state[:, ::-1, :]
        state = nxt

    bins = {key: [] for key in PAIR_ORDER}
    for a in range(m + 1):
        for parity in (0, 1):
            alpha = 0 if a > 0 else (1 if parity == 0 else -1)
            for k in range(m - a + 1):
                value = state[a, parity, k]
                if value:
                    bins[(alpha, _sign((m - a) - 2 * k))].append(value)

    return {key: sum_probabilities(values, exact) for key, values in bins.items()}


def row_pair_table(m: int, probs: Sequence, method: Method = "dp") -> PairTable:
    """
    큐비트 쌍 확률 (eps_e, eps_I, eps_X, eps_Y, eps_Z) 로부터 행 분포 q 를 사전으로 반환합니다.

    Fraction 을 넣으면 두 경로 모두 정확한 유리수로 계산합니다.
    """
    _check_method(method)
    if m < 1:
        raise InvalidParameterError(f"m 은 1 이상이어야 합니다 (m = {m})")
    if len(probs) != 5:
        raise InvalidParameterError("큐비트 쌍 확률은 5개 항목이어야 합니다")
    if method == "reference":
        return _row_table_reference(m, probs)
    return _row_table_dp(m, probs)


def row_pair_dist(code: CodeParams, qd: QubitPairDist, method: Method = "dp") -> TrinaryPairDist:
    """행 하나의 (X 곱, Z 다수결) 결과 분포 q_{alpha,beta}. 행 번호와 무관합니다."""
    table = row_pair_table(code.m, qd.as_tuple(), method)
    return TrinaryPairDist.from_table(table)


# ---------------------------------------------------------------------------
# 부호화 블록 단위 분포 p
# ---------------------------------------------------------------------------


def _encoded_table_reference(n: int, q: PairTable) -> PairTable:
    if n > REFERENCE_MAX_N:
        raise InvalidParameterError(
            f"reference 경로는 n <= {REFERENCE_MAX_N} 에서만 계산합니다 (n = {n})"
        )
    bins = {key: [] for key in PAIR_ORDER}
    exact = _is_exact(q.values())

    # beta = 0: Z 결과가 0 인 행이 하나 이상 (a: (0,0), b: (1,0), c: (-1,0)).
    # 나머지 행은 alpha 별로 묶음 (v: alpha 0, w: alpha +1, u: alpha -1)
    zero_x = q[(0, 1)] + q[(0, -1)]
    plus_x = q[(1, 1)] + q[(1, -1)]
    minus_x = q[(-1, 1)] + q[(-1, -1)]
    for a in range(n + 1):
        for b in range(n - a + 1):
            for c in range(n - a - b + 1):
                if a + b + c < 1:
                    continue
                rest = n - a - b - c
                for v in range(rest + 1):
                    for w in range(rest - v + 1):
                        u = rest - v - w
                        alpha = _sign(2 * (b + w) - (n - a - v))
                        bins[(alpha, 0)].append(
                            _multinomial(a, b, c, v, w, u)
                            * q[(0, 0)] ** a
                            * q[(1, 0)] ** b
                            * q[(-1, 0)] ** c
                            * zero_x**v
                            * plus_x**w
                            * minus_x**u
                        )

    # beta != 0: 모든 행의 Z 결과가 +-1. d, e, f = beta +1 행 / g, h, i = beta -1 행
    for d in range(n + 1):
        for e in range(n - d + 1):
            for g in range(n - d - e + 1):
                for h in range(n - d - e - g + 1):
                    for i in range(n - d - e - g - h + 1):
                        f = n - d - e - g - h - i
                        alpha = _sign(2 * (e + h) - (n - d - g))
                        beta = 1 if (g + h + i) % 2 == 0 else -1
                        bins[(alpha, beta)].append(
                            _multinomial(d, e, f, g, h, i)
                            * q[(0, 1)] ** d
                            * q[(1, 1)] ** e
                            * q[(-1, 1)] ** f
                            * q[(0, -1)] ** g
                            * q[(1, -1)] ** h
                            * q[(-1, -1)] ** i
                        )

    return {key: sum_probabilities(values, exact) for key, values in bins.items()}


def _shift_add(dst: np.ndarray, src: np.ndarray, alpha: int, weight):
    # X 합계 축을 alpha 만큼 이동시켜 더함
    if alpha == 1:
        dst[1:] += weight * src[:-1]
    elif alpha == -1:
        dst[:-1] += weight * src[1:]
    else:
        dst += weight * src


def _encoded_states(n_max: int, q: PairTable) -> Iterator[Tuple[int, np.ndarray]]:
    """
    행을 하나씩 추가하며 상태를 갱신합니다.

    state[s + n_max, z]: X 결과 합계 s, Z 결과 곱의 상태 z (0: 짝수 개의 -1, 1: 홀수 개, 2: 0 이 포함됨)
    """
    dtype = object if _is_exact(q.values()) else np.float64
    state = np.zeros((2 * n_max + 1, 3), dtype=dtype)
    state[n_max, 0] = 1

    for rows in range(1, n_max + 1):
        nxt = np.zeros_like(state)
        for (alpha, beta), weight in q.items():
            if not weight:
                continue
            if beta == 1:
                _shift_add(nxt, state, alpha, weight)
            elif beta == -1:
                _shift_add(nxt[:, 0], state[:, 1], alpha, weight)
                _shift_add(nxt[:, 1], state[:, 0], alpha, weight)
                _shift_add(nxt[:, 2], state[:, 2], alpha, weight)
            else:
                _shift_add(nxt[:, 2], state.sum(axis=1), alpha, weight)
        state = nxt
        yield rows, state


def _collapse(state: np.ndarray, n_max: int) -> PairTable:
    # 합계의 부호로 alpha, z 상태로 beta 를 정함. 양수끼리의 합이라 오차가 누적되지 않음
    by_alpha = {
        1: state[n_max + 1 :].sum(axis=0),
        0: state[n_max],
        -1: state[:n_max].sum(axis=0),
    }
    exact = state.dtype == object
    table = {}
    for alpha, row in by_alpha.items():
        for z, beta in enumerate((1, -1, 0)):
            table[(alpha, beta)] = Fraction(row[z]) if exact else float(row[z])
    return table


def encoded_pair_table(n: int, q: PairTable, method: Method = "dp") -> PairTable:
    """행 분포 q (사전) 로부터 n 행 블록의 분포 p 를 사전으로 반환합니다."""
    _check_method(method)
    if n < 1:
        raise InvalidParameterError(f"n 은 1 이상이어야 합니다 (n = {n})")
    q = {key: q.get(key, 0) for key in PAIR_ORDER}
    if method == "reference":
        return _encoded_table_reference(n, q)

    for rows, state in _encoded_states(n, q):
        if rows == n:
            return _collapse(state, n)


def encoded_pair_dist(code: CodeParams, q: TrinaryPairDist, method: Method = "dp") -> TrinaryPairDist:
    """블록의 (sign(X 합), Z 곱) 결과 분포 p_{alpha,beta}"""
    return TrinaryPairDist.from_table(encoded_pair_table(code.n, q.table(), method))


def encoded_pair_dists(q: TrinaryPairDist, n_max: int) -> Iterator[Tuple[int, TrinaryPairDist]]:
    """
    DP 한 번으로 n = 1..n_max 의 블록 분포를 차례로 만들어 냅니다.

    k 행을 처리한 상태가 곧 k 행 블록의 분포이므로 최적화와 임계 코드 탐색에서
    같은 m 에 대해 n 을 늘려 가며 재사용합니다.
    """
    if n_max < 1:
        raise InvalidParameterError(f"n_max 는 1 이상이어야 합니다 (n_max = {n_max})")
    for rows, state in _encoded_states(n_max, q.table()):
        yield rows, TrinaryPairDist.from_table(_collapse(state, n_max))


# ---------------------------------------------------------------------------
# 복호기
# ---------------------------------------------------------------------------


def decode_grids(grids) -> Tuple[np.ndarray, np.ndarray]:
    """
    큐비트 쌍 사건 격자 (..., n, m) 를 (alpha, beta) 배열로 복호합니다.

    격자 값은 QubitOutcome 코드 (0: 손실, 1: I, 2: X, 3: Y, 4: Z) 입니다.
    """
    grids = np.asarray(grids)
    if grids.ndim < 2:
        raise InvalidParameterError("격자는 (n, m) 이상의 차원이어야 합니다")
    m = grids.shape[-1]

    lost = grids == QubitOutcome.LOST
    phase_flips = (grids == QubitOutcome.Y) | (grids == QubitOutcome.Z)
    spin_flips = (grids == QubitOutcome.X) | (grids == QubitOutcome.Y)

    # 행 X 결과: 손실이 있으면 0, 아니면 Y/Z 개수의 parity 로 부호 결정
    row_lost = lost.any(axis=-1)
    parity = phase_flips.sum(axis=-1) % 2
    row_x = np.where(row_lost, 0, np.where(parity == 0, 1, -1))

    # 행 Z 결과: 살아남은 큐비트의 다수결 (동률이면 0)
    survivors = m - lost.sum(axis=-1)
    row_z = np.sign(survivors - 2 * spin_flips.sum(axis=-1))

    alpha = np.sign(row_x.sum(axis=-1))
    beta = np.where((row_z == 0).any(axis=-1), 0, np.prod(row_z, axis=-1))
    return alpha.astype(np.int8), beta.astype(np.int8)


def logical_outcome(pattern) -> Tuple[int, int]:
    """격자 하나를 복호한 (alpha, beta). 오류가 없을 때의 결과 대비 부호입니다."""
    grid = np.asarray(pattern, dtype=np.int8)
    if grid.ndim != 2:
        raise InvalidParameterError("격자는 n x m 2차원이어야 합니다")
    if grid.size and (grid.min() < 0 or grid.max() > 4):
        raise InvalidParameterError("격자 값은 0..4 (손실, I, X, Y, Z) 이어야 합니다")
    alpha, beta = decode_grids(grid)
    return int(alpha), int(beta)
