import argparse
import logging
import math

from app.commands import common
from app.schemas.schemas import (
    PAIR_ORDER,
    QUBIT_OUTCOME_PAIRS,
    DistReport,
    QubitOutcome,
    RunConfig,
)
from app.services import channel_model, dist_engine

logger = logging.getLogger(__name__)

COLUMNS = ["table", "event", "alpha", "beta", "probability", "underflow"]


def run(config: RunConfig) -> int:
    """큐비트 쌍(5), 행(9), 블록(9) 분포와 정규화 검사 행을 출력합니다."""
    code = config.code()
    channel = config.channel()

    qd = channel_model.qubit_pair_dist(channel)
    row = dist_engine.row_pair_dist(code, qd)
    encoded = dist_engine.encoded_pair_dist(code, row)
    eta = channel_model.transmission(channel)

    report = DistReport(
        code=code,
        eta=eta,
        eps=channel_model.effective_epsilon(channel),
        qubit_pair=qd,
        row=row,
        encoded=encoded,
        capacity_ok=channel_model.above_capacity(eta),
    )

    rows = []
    for outcome, probability in zip(QubitOutcome, qd.as_tuple()):
        alpha, beta = QUBIT_OUTCOME_PAIRS[outcome]
        rows.append(["qubit_pair", outcome.name, alpha, beta, *common.probability_cells(probability)])
    for name, table in (("row", row), ("encoded", encoded)):
        for (alpha, beta), probability in zip(PAIR_ORDER, table.values):
            rows.append([name, "", alpha, beta, *common.probability_cells(probability)])

    for name, values in (("qubit_pair", qd.as_tuple()), ("row", row.values), ("encoded", encoded.values)):
        rows.append(["checksum", name, "", "", math.fsum(values), 0])

    common.emit(config, report, COLUMNS, rows)
    logger.info(f"{code} 분포 출력 완료 (eta={eta:.6f}, eps_en={encoded.error_mass:.3e})")
    return 0


def register(subparsers):
    parser: argparse.ArgumentParser = subparsers.add_parser(
        "dist", help="큐비트 쌍 / 행 / 블록 결과 분포"
    )
    common.add_run_arguments(parser)
    parser.set_defaults(handler=run)
