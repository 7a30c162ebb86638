from typing import Iterable, List, Tuple

from app.schemas.schemas import (
    CodeParams,
    LogicalOperatorDescriptor,
    OverheadVariant,
    ResourceAccount,
    StabilizerDescriptor,
)


def stabilizer_summary(code: CodeParams) -> List[StabilizerDescriptor]:
    """
    (n,m) 코드의 독립 스태빌라이저 목록을 기호 형태로 반환합니다.

    Args:
        code: 코드 파라미터

    Returns:
        List[StabilizerDescriptor]: 행 안의 이웃한 Z_{i,j}Z_{i,j+1} n(m-1)개와
            이웃한 두 행 전체에 걸친 X 곱 (n-1)개. 합계 n*m - 1 개
    """
    descriptors = []

    # 서브블록 내부 ZZ
    for i in range(1, code.n + 1):
        for j in range(1, code.m):
            descriptors.append(StabilizerDescriptor(kind="ZZ", qubits=((i, j), (i, j + 1))))

    # 이웃한 서브블록 사이 XX..X
    for i in range(1, code.n):
        qubits = tuple((row, j) for row in (i, i + 1) for j in range(1, code.m + 1))
        descriptors.append(StabilizerDescriptor(kind="XX", qubits=qubits))

    return descriptors


def logical_operators(code: CodeParams) -> Tuple[LogicalOperatorDescriptor, LogicalOperatorDescriptor]:
    """논리 X 는 한 행 전체의 X 곱, 논리 Z 는 한 열 전체의 Z 곱 (첫 행/첫 열을 대표로 사용)"""
    logical_x = LogicalOperatorDescriptor(
        kind="X", qubits=tuple((1, j) for j in range(1, code.m + 1))
    )
    logical_z = LogicalOperatorDescriptor(
        kind="Z", qubits=tuple((i, 1) for i in range(1, code.n + 1))
    )
    return logical_x, logical_z


def resources(code: CodeParams, variant: OverheadVariant = OverheadVariant.BASELINE) -> ResourceAccount:
    """
    중계 스테이션 한 곳의 큐비트 자원을 계산합니다.

    비용 함수는 항상 메모리 큐비트 2nm 만 사용하며, 준비 단계 오버헤드는 참고용입니다.
    """
    variant = OverheadVariant(variant)
    memory = 2 * code.n * code.m

    if variant == OverheadVariant.PARALLEL_PREP:
        overhead, time_factor = 4 * code.n * code.m, 1
    elif variant == OverheadVariant.SERIAL_PREP:
        # 서브블록을 하나씩 준비하므로 n-1 번의 추가 단계. n=1 이면 1 로 고정
        overhead, time_factor = 4 * code.m, max(code.n - 1, 1)
    else:
        overhead, time_factor = 0, 1

    return ResourceAccount(
        variant=variant,
        memory_qubits_per_station=memory,
        prep_overhead_qubits=overhead,
        prep_time_factor=time_factor,
    )


def loss_recoverable(code: CodeParams, lost_cells: Iterable[Tuple[int, int]]) -> bool:
    """
    손실만 있는 경우 복구 가능 여부.

    모든 서브블록에 큐비트가 하나 이상 남아 있고, 손실이 전혀 없는 서브블록이
    하나 이상 있어야 합니다. 좌표는 1부터 시작하는 (행, 열) 입니다.
    """
    lost_per_row = [0] * code.n
    for row, col in set(lost_cells):
        if not (1 <= row <= code.n and 1 <= col <= code.m):
            raise ValueError(f"코드 {code} 범위를 벗어난 좌표입니다: {(row, col)}")
        lost_per_row[row - 1] += 1

    every_row_survives = all(lost < code.m for lost in lost_per_row)
    some_row_complete = any(lost == 0 for lost in lost_per_row)
    return every_row_survives and some_row_complete
