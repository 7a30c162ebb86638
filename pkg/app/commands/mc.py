import logging
import math

from app.commands import common
from app.schemas.schemas import PAIR_ORDER, McReport, RunConfig
from app.services import channel_model, dist_engine, mc_oracle

logger = logging.getLogger(__name__)

COLUMNS = ["quantity", "estimate", "std_error", "analytic", "z_score"]

_SIGN = {1: "+1", 0: "0", -1: "-1"}


def _z(estimate, analytic, total):
    if estimate is None or analytic is None or total == 0:
        return None
    sigma = math.sqrt(analytic * (1.0 - analytic) / total)
    if sigma == 0.0:
        return 0.0 if estimate == analytic else math.inf
    return (estimate - analytic) / sigma


def run(config: RunConfig) -> int:
    """몬테카를로 추정치와 해석적 값, z 점수. hops > 1 이면 체인 표본도 함께 출력"""
    mc_config = config.mc_config()
    estimate = mc_oracle.sample_block(mc_config)

    qd = channel_model.qubit_pair_dist(mc_config.channel)
    analytic = dist_engine.encoded_pair_dist(
        mc_config.code, dist_engine.row_pair_dist(mc_config.code, qd)
    )
    scores = mc_oracle.z_scores(estimate, analytic)

    rows = [
        [f"p({_SIGN[a]},{_SIGN[b]})", est, se, exact, z]
        for (a, b), est, se, exact, z in zip(
            PAIR_ORDER, estimate.estimates, estimate.std_errors, analytic.values, scores
        )
    ]

    chain = None
    if mc_config.hops > 1:
        chain = mc_oracle.simulate_chain(mc_config)
        for name, est, se, exact, total in (
            ("chain_p_succ", chain.p_succ, chain.p_succ_se, chain.analytic_p_succ, chain.trajectories),
            ("chain_q_x", chain.q_x, chain.q_x_se, chain.analytic_q_x, chain.survivors),
            ("chain_q_z", chain.q_z, chain.q_z_se, chain.analytic_q_z, chain.survivors),
        ):
            rows.append([name, est, se, exact, _z(est, exact, total)])

    report = McReport(
        code=mc_config.code,
        seed=mc_config.seed,
        block=estimate,
        analytic=analytic,
        z_scores=scores,
        chain=chain,
    )
    common.emit(config, report, COLUMNS, rows)
    logger.info(f"최대 |z| = {max(abs(z) for z in scores):.3f}")
    return 0


def register(subparsers):
    parser = subparsers.add_parser("mc", help="몬테카를로 검증")
    common.add_run_arguments(parser)
    parser.set_defaults(handler=run)
