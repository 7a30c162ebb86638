import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Dict, Iterable, List, Sequence

from pydantic import BaseModel

from app.core.exceptions import InvalidParameterError
from app.schemas.schemas import RunConfig
from app.services import channel_model

# 이보다 작은 확률은 0 으로 기록하고 underflow 열에 표시
UNDERFLOW_LIMIT = 1e-300


# ---------------------------------------------------------------------------
# 인자 변환기
# ---------------------------------------------------------------------------


def count(value: str) -> int:
    """'1e6' 같은 표기도 받는 양의 정수"""
    try:
        number = float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{value!r} 은(는) 숫자가 아닙니다") from exc
    if not number.is_integer() or number < 0:
        raise argparse.ArgumentTypeError(f"{value!r} 은(는) 0 이상의 정수가 아닙니다")
    return int(number)


def float_list(value: str) -> List[float]:
    try:
        return [float(item) for item in value.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{value!r} 은(는) 쉼표로 구분한 숫자 목록이 아닙니다") from exc


def int_range(value: str) -> List[int]:
    """'2:60' 또는 '2,60'"""
    parts = value.replace(":", ",").split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"{value!r} 은(는) lo:hi 형식이 아닙니다")
    try:
        return [int(part) for part in parts]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{value!r} 은(는) 정수 범위가 아닙니다") from exc


# 명령행 플래그 -> RunConfig 필드
FLAGS = [
    ("--n", "n", int, "서브블록(행) 수"),
    ("--m", "m", int, "서브블록당 큐비트 수"),
    ("--eps", "eps", float, "유효 오류율 (직접 지정)"),
    ("--eps-d", "eps_d", float, "전송 큐비트 탈분극 오류"),
    ("--eps-g", "eps_g", float, "2큐비트 게이트 오류"),
    ("--eps-m", "eps_m", float, "측정 오류"),
    ("--pc", "p_c", float, "결합 손실"),
    ("--l0", "l0", float, "중계기 간격 (km)"),
    ("--ltot", "l_tot", float, "전체 거리 (km)"),
    ("--latt", "l_att", float, "감쇠 길이 (km)"),
    ("--t0", "t0", float, "TEC 소요 시간"),
    ("--k", "k", float, "일반화 비용 지수"),
    ("--loss", "loss", float, "임계 코드 탐색의 손실 확률"),
    ("--target", "target", float, "목표 부호화 오류율"),
    ("--samples", "samples", count, "몬테카를로 표본 수"),
    ("--seed", "seed", count, "난수 seed"),
    ("--hops", "hops", count, "체인 표본의 홉 수"),
    ("--values", "values", float_list, "스윕 값 (쉼표 구분)"),
    ("--n-range", "n_range", int_range, "n 탐색 범위 lo:hi"),
    ("--m-range", "m_range", int_range, "m 탐색 범위 lo:hi"),
    ("--l0-grid", "l0_grid", float_list, "L0 격자 (쉼표 구분)"),
    ("--out", "out", str, "출력 파일 (기본: 표준 출력)"),
    ("--threads", "threads", count, "작업자 수 (기본: QPC_THREADS)"),
]


def add_run_arguments(parser: argparse.ArgumentParser):
    """모든 하위 명령이 공유하는 플래그. 기본값은 None 이며 RunConfig 기본값이 적용됩니다."""
    for flag, dest, kind, help_text in FLAGS:
        parser.add_argument(flag, dest=dest, type=kind, default=None, help=help_text)
    parser.add_argument(
        "--sweep-over", dest="sweep_over", choices=["l_tot", "eps", "p_c", "k"], default=None
    )
    parser.add_argument("--format", dest="format", choices=["csv", "json"], default=None)
    parser.add_argument("--config", dest="config", default=None, help="JSON 설정 파일 (플래그가 우선)")


def build_run_config(command: str, args: argparse.Namespace) -> RunConfig:
    """설정 파일을 먼저 읽고 명령행에서 준 플래그로 덮어씁니다."""
    values: Dict[str, Any] = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as handle:
                loaded = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidParameterError(f"설정 파일을 읽을 수 없습니다: {args.config} ({exc})") from exc
        if not isinstance(loaded, dict):
            raise InvalidParameterError("설정 파일의 최상위는 객체여야 합니다")
        values.update(loaded)

    dests = [dest for _, dest, _, _ in FLAGS] + ["sweep_over", "format"]
    for dest in dests:
        value = getattr(args, dest, None)
        if value is not None:
            values[dest] = value
    values["command"] = command
    return RunConfig.model_validate(values)


# ---------------------------------------------------------------------------
# 출력
# ---------------------------------------------------------------------------


def format_number(value) -> str:
    """12 유효자리. 정수와 불리언은 그대로"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.12g}"
    return str(value)


def probability_cells(value: float) -> List[str]:
    # 확률과 underflow 표시
    if 0.0 < value < UNDERFLOW_LIMIT:
        return ["0", "1"]
    return [format_number(value), "0"]


def render_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([cell if isinstance(cell, str) else format_number(cell) for cell in row])
    return buffer.getvalue()


def emit(config: RunConfig, report: BaseModel, columns: Sequence[str], rows: Iterable[Sequence[Any]]):
    """형식에 맞게 보고서를 표준 출력 또는 --out 파일에 씁니다."""
    if config.format == "json":
        text = report.model_dump_json(indent=2) + "\n"
    else:
        text = render_csv(columns, rows)

    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def resolved_eps(config: RunConfig) -> float:
    return channel_model.effective_epsilon(config.channel())
