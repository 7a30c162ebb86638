import pytest

from app.schemas.schemas import CodeParams, OverheadVariant, QubitOutcome
from app.services.code_params import (
    logical_operators,
    loss_recoverable,
    resources,
    stabilizer_summary,
)
from app.services.dist_engine import logical_outcome


def test_single_qubit_has_no_stabilizers():
    assert stabilizer_summary(CodeParams(n=1, m=1)) == []


@pytest.mark.parametrize("n, m, zz, xx", [(3, 3, 6, 2), (13, 6, 65, 12), (2, 5, 8, 1)])
def test_stabilizer_counts(n, m, zz, xx):
    stabilizers = stabilizer_summary(CodeParams(n=n, m=m))
    assert sum(s.kind == "ZZ" for s in stabilizers) == zz
    assert sum(s.kind == "XX" for s in stabilizers) == xx
    assert len(stabilizers) == n * m - 1


def test_stabilizer_shapes():
    stabilizers = stabilizer_summary(CodeParams(n=3, m=4))
    zz = [s for s in stabilizers if s.kind == "ZZ"]
    xx = [s for s in stabilizers if s.kind == "XX"]
    assert zz[0].qubits == ((1, 1), (1, 2))
    assert all(len(s.qubits) == 2 for s in zz)
    # 이웃한 두 행의 모든 큐비트
    assert all(len(s.qubits) == 8 for s in xx)
    assert {row for row, _ in xx[1].qubits} == {2, 3}


def test_orientation_matters_for_stabilizers_not_distance():
    wide, tall = CodeParams(n=2, m=5), CodeParams(n=5, m=2)
    assert wide.distance == tall.distance == 2
    assert len(stabilizer_summary(wide)) == len(stabilizer_summary(tall)) == 9
    wide_zz = sum(s.kind == "ZZ" for s in stabilizer_summary(wide))
    tall_zz = sum(s.kind == "ZZ" for s in stabilizer_summary(tall))
    assert (wide_zz, tall_zz) == (8, 5)


def test_logical_operators():
    logical_x, logical_z = logical_operators(CodeParams(n=3, m=4))
    assert logical_x.qubits == ((1, 1), (1, 2), (1, 3), (1, 4))
    assert logical_z.qubits == ((1, 1), (2, 1), (3, 1))


def test_resources_baseline():
    account = resources(CodeParams(n=3, m=3), OverheadVariant.BASELINE)
    assert account.memory_qubits_per_station == 18
    assert account.prep_overhead_qubits == 0
    assert account.prep_time_factor == 1


def test_resources_parallel_prep():
    account = resources(CodeParams(n=13, m=6), "parallel_prep")
    assert account.memory_qubits_per_station == 156
    assert account.prep_overhead_qubits == 312


def test_resources_serial_prep():
    account = resources(CodeParams(n=13, m=6), OverheadVariant.SERIAL_PREP)
    assert account.memory_qubits_per_station == 156
    assert account.prep_overhead_qubits == 24
    assert account.prep_time_factor == 12


@pytest.mark.parametrize("variant", list(OverheadVariant))
def test_memory_is_always_two_nm(variant):
    for n, m in [(1, 1), (1, 7), (4, 3), (41, 8)]:
        assert resources(CodeParams(n=n, m=m), variant).memory_qubits_per_station == 2 * n * m


def test_loss_recoverable():
    code = CodeParams(n=3, m=3)
    assert loss_recoverable(code, [])
    assert loss_recoverable(code, [(1, 3), (3, 3)])
    # 모든 행에 손실
    assert not loss_recoverable(code, [(1, 1), (2, 2), (3, 3)])
    # 한 행 전체 손실
    assert not loss_recoverable(code, [(2, 1), (2, 2), (2, 3)])


def test_loss_recoverable_rejects_out_of_range():
    with pytest.raises(ValueError):
        loss_recoverable(CodeParams(n=2, m=2), [(3, 1)])


def test_invalid_code_rejected():
    with pytest.raises(ValueError):
        CodeParams(n=0, m=3)


def test_loss_rule_matches_decoder():
    # (3,3) 의 모든 손실 패턴에서 복구 가능 여부와 복호 결과 (+1,+1) 가 일치
    code = CodeParams(n=3, m=3)
    cells = [(row, col) for row in range(1, 4) for col in range(1, 4)]
    for mask in range(2**9):
        lost = [cell for bit, cell in enumerate(cells) if mask >> bit & 1]
        grid = [[QubitOutcome.I] * 3 for _ in range(3)]
        for row, col in lost:
            grid[row - 1][col - 1] = QubitOutcome.LOST
        assert loss_recoverable(code, lost) == (logical_outcome(grid) == (1, 1)), lost
