import logging
from typing import List

from app.commands import common
from app.core.exceptions import InvalidParameterError
from app.schemas.schemas import CostResult, CostTable, RunConfig
from app.services import optimizer

logger = logging.getLogger(__name__)

COST_COLUMNS = [
    "L_tot_km", "n", "m", "L0_km", "N", "eta", "eps", "p_succ", "q_x", "q_z", "q",
    "r_t0", "cost", "cost_coeff", "k", "p_c", "no_key", "underflow",
]

THRESHOLD_COLUMNS = ["eps", "loss", "target", "achievable", "n", "m", "qubits", "eps_en"]


def cost_rows(results: List[CostResult]) -> List[list]:
    rows = []
    for r in results:
        p_succ, flag = common.probability_cells(r.p_succ)
        rows.append([
            r.l_tot, r.n, r.m, r.l0, r.n_stations, r.eta, r.eps, p_succ, r.q_x, r.q_z, r.q,
            r.r_t0, r.cost, r.cost_coeff, r.k, r.p_c, r.no_key, flag,
        ])
    return rows


def run_optimize(config: RunConfig) -> int:
    """(n, m, L0) 격자 최소 비용점. 키를 얻을 수 있는 점이 없으면 종료 코드 3"""
    best = optimizer.minimize_cost(config.search_config())
    common.emit(config, CostTable(rows=[best]), COST_COLUMNS, cost_rows([best]))
    return 3 if best.no_key else 0


def run_threshold(config: RunConfig) -> int:
    result = optimizer.threshold_code(common.resolved_eps(config), config.loss, config.target)
    row = [
        result.eps, result.loss, result.target, result.achievable,
        result.n, result.m, result.qubits, result.eps_en,
    ]
    common.emit(config, result, THRESHOLD_COLUMNS, [row])
    return 0 if result.achievable else 3


def run_sweep(config: RunConfig) -> int:
    """스윕 점마다 최적화 결과 한 행. 키가 없는 점은 no_key 열로 표시하고 종료 코드는 0"""
    sweep_config = config.sweep_config()
    results = optimizer.sweep(sweep_config)

    fit = None
    if sweep_config.axis == "l_tot":
        try:
            fit = optimizer.polylog_fit(results)
            logger.info(f"log C' ~ log log L_tot 기울기 {fit.slope:.4f} (점 {fit.points}개)")
        except InvalidParameterError as exc:
            logger.warning(f"회귀 생략: {exc.detail}")

    table = CostTable(axis=sweep_config.axis, rows=results, polylog=fit)
    common.emit(config, table, COST_COLUMNS, cost_rows(results))
    return 0


def register(subparsers):
    handlers = (
        ("optimize", "최소 비용 코드와 중계기 간격 탐색", run_optimize),
        ("threshold", "목표 부호화 오류율을 만족하는 최소 코드", run_threshold),
        ("sweep", "L_tot / eps / p_c / k 스윕", run_sweep),
    )
    for name, help_text, handler in handlers:
        parser = subparsers.add_parser(name, help=help_text)
        common.add_run_arguments(parser)
        parser.set_defaults(handler=handler)
