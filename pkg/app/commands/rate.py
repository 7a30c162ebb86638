import logging

from app.commands import common
from app.schemas.schemas import RateReport, RunConfig
from app.services import metrics

logger = logging.getLogger(__name__)

COLUMNS = [
    "n", "m", "L_tot_km", "L0_km", "N", "eta", "eps",
    "p_succ", "q_x", "q_z", "q", "r_t0", "rate", "eps_en", "underflow",
]


def run(config: RunConfig) -> int:
    """한 구성의 P_succ, QBER, 키 생성률, eps_en. 키가 없으면 종료 코드 3"""
    code = config.code()
    result = metrics.chain_metrics(code, config.channel(), config.l_tot)

    p_succ, p_flag = common.probability_cells(result.p_succ)
    eps_en, e_flag = common.probability_cells(result.eps_en)
    row = [
        code.n, code.m, config.l_tot, result.l0_eff, result.n_stations, result.eta, result.eps,
        p_succ, result.q_x, result.q_z, result.q, result.r_t0, result.rate, eps_en,
        "1" if "1" in (p_flag, e_flag) else "0",
    ]
    common.emit(config, RateReport(code=code, metrics=result), COLUMNS, [row])

    if result.r_t0 <= 0.0:
        logger.warning(f"{code} L_tot={config.l_tot} km: 비밀 키를 얻을 수 없습니다 (R = 0)")
        return 3
    logger.info(f"{code} R*t0 = {result.r_t0:.4f}")
    return 0


def register(subparsers):
    parser = subparsers.add_parser("rate", help="체인 성능 지표 (P_succ, Q, R, eps_en)")
    common.add_run_arguments(parser)
    parser.set_defaults(handler=run)
