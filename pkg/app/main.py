import argparse
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from .commands import dist, mc, optimize, rate
from .commands.common import build_run_config
from .core.config import QPC_LOG_LEVEL
from .core.exceptions import QpcError

logger = logging.getLogger(__name__)


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpc",
        description="QPC (n,m) 양자 중계기 성능 계산 및 비용 최적화",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # 하위 명령 등록
    dist.register(subparsers)
    rate.register(subparsers)
    optimize.register(subparsers)
    mc.register(subparsers)
    return parser


def configure_logging():
    # 표준 출력은 CSV/JSON 전용이므로 로그는 stderr 로
    logging.basicConfig(
        level=getattr(logging, QPC_LOG_LEVEL, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    CLI 진입점.

    Returns:
        int: 0 성공, 2 잘못된 설정, 3 계산 불가 (키 없음 / 목표 미달)
    """
    configure_logging()
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse 오류는 2, --help 는 0
        return exc.code if isinstance(exc.code, int) else 2

    try:
        config = build_run_config(args.command, args)
        logger.info(f"{args.command} 시작")
        status = args.handler(config)
        logger.info(f"{args.command} 종료 (코드 {status})")
        return status
    except ValidationError as exc:
        print(f"오류: 설정이 올바르지 않습니다\n{exc}", file=sys.stderr)
        return 2
    except QpcError as exc:
        print(f"오류: {exc.detail}", file=sys.stderr)
        return exc.exit_code
