import math
from enum import Enum, IntEnum
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from ..core.config import (
    DEFAULT_CODE_RANGE,
    DEFAULT_L0_GRID,
    DEFAULT_L_ATT_KM,
    DEFAULT_SWEEP_L_TOT,
    DEFAULT_T0,
    GENERALIZED_CODE_RANGE,
    NORMALIZATION_TOL,
    QPC_THREADS,
)

# 삼진 측정값 (0: 헤럴드 실패, +1: 정상, -1: 반전)
TRINARY_VALUES = (0, 1, -1)

# 9개 (alpha, beta) 결과의 고정 순서. 인덱스는 (alpha % 3) * 3 + (beta % 3)
PAIR_ORDER: Tuple[Tuple[int, int], ...] = tuple(
    (alpha, beta) for alpha in TRINARY_VALUES for beta in TRINARY_VALUES
)


def pair_index(alpha: int, beta: int) -> int:
    return (alpha % 3) * 3 + (beta % 3)


class QubitOutcome(IntEnum):
    """큐비트 쌍 하나에 일어나는 사건 (손실 또는 파울리 오류)"""

    LOST = 0
    I = 1
    X = 2
    Y = 3
    Z = 4


# 단일 큐비트 쌍에서 각 사건이 주는 (alpha, beta)
QUBIT_OUTCOME_PAIRS = {
    QubitOutcome.LOST: (0, 0),
    QubitOutcome.I: (1, 1),
    QubitOutcome.X: (1, -1),
    QubitOutcome.Y: (-1, -1),
    QubitOutcome.Z: (-1, 1),
}


# 코드 관련 스키마
class CodeParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, description="서브블록(행) 수")
    m: int = Field(..., ge=1, description="서브블록당 큐비트(열) 수")

    @property
    def distance(self) -> int:
        return min(self.n, self.m)

    @property
    def physical_qubits(self) -> int:
        return self.n * self.m

    @property
    def stabilizer_count(self) -> int:
        return self.n * self.m - 1

    def __str__(self) -> str:
        return f"({self.n},{self.m})"


class OverheadVariant(str, Enum):
    BASELINE = "baseline"
    PARALLEL_PREP = "parallel_prep"
    SERIAL_PREP = "serial_prep"


class ResourceAccount(BaseModel):
    model_config = ConfigDict(frozen=True)

    variant: OverheadVariant
    memory_qubits_per_station: int = Field(..., ge=1)
    prep_overhead_qubits: int = Field(..., ge=0)
    prep_time_factor: int = Field(..., ge=1)


class StabilizerDescriptor(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["ZZ", "XX"]
    # (행, 열) 1부터 시작하는 인덱스
    qubits: Tuple[Tuple[int, int], ...]


class LogicalOperatorDescriptor(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["X", "Z"]
    qubits: Tuple[Tuple[int, int], ...]


# 채널 관련 스키마
class ChannelParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps_d: float = Field(0.0, ge=0.0, le=1.0, description="전송 큐비트 탈분극 오류")
    eps_g: float = Field(0.0, ge=0.0, le=1.0, description="2큐비트 게이트 오류")
    eps_m: float = Field(0.0, ge=0.0, le=1.0, description="측정 오류")
    eps_direct: Optional[float] = Field(None, ge=0.0, le=1.0, description="유효 오류율 직접 지정")
    p_c: float = Field(0.0, ge=0.0, lt=1.0, description="결합 손실")
    l0: float = Field(1.0, gt=0.0, description="중계기 간격 (km)")
    l_att: float = Field(DEFAULT_L_ATT_KM, gt=0.0, description="감쇠 길이 (km)")
    t0: float = Field(DEFAULT_T0, gt=0.0, description="TEC 소요 시간")

    def with_spacing(self, l0: float) -> "ChannelParams":
        return self.model_copy(update={"l0": l0})

    def with_eps(self, eps: float) -> "ChannelParams":
        return self.model_copy(update={"eps_direct": eps})

    def with_coupling_loss(self, p_c: float) -> "ChannelParams":
        return self.model_copy(update={"p_c": p_c})


class QubitPairDist(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps_e: float = Field(..., ge=0.0)
    eps_i: float = Field(..., ge=0.0)
    eps_x: float = Field(..., ge=0.0)
    eps_y: float = Field(..., ge=0.0)
    eps_z: float = Field(..., ge=0.0)

    @model_validator(mode="after")
    def check_normalized(self):
        total = math.fsum(self.as_tuple())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"큐비트 쌍 확률의 합이 1이 아닙니다: {total!r}")
        return self

    def as_tuple(self) -> Tuple[float, float, float, float, float]:
        """QubitOutcome 순서 (LOST, I, X, Y, Z) 의 확률"""
        return (self.eps_e, self.eps_i, self.eps_x, self.eps_y, self.eps_z)


class TrinaryPairDist(BaseModel):
    """(alpha, beta) 9개 결과 위의 확률표. 값은 PAIR_ORDER 순서로 저장합니다."""

    model_config = ConfigDict(frozen=True)

    values: Tuple[float, ...]

    @field_validator("values")
    @classmethod
    def check_values(cls, v):
        if len(v) != len(PAIR_ORDER):
            raise ValueError("확률표는 9개 항목이어야 합니다")
        if any(x < 0.0 for x in v):
            raise ValueError("확률표에 음수 항목이 있습니다")
        total = math.fsum(v)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"확률표의 합이 1이 아닙니다: {total!r}")
        return v

    @classmethod
    def from_table(cls, table: Dict[Tuple[int, int], float]) -> "TrinaryPairDist":
        return cls(values=tuple(float(table.get(key, 0.0)) for key in PAIR_ORDER))

    def __getitem__(self, key: Tuple[int, int]) -> float:
        return self.values[pair_index(*key)]

    def table(self) -> Dict[Tuple[int, int], float]:
        return dict(zip(PAIR_ORDER, self.values))

    def _mass(self, predicate) -> float:
        return math.fsum(p for key, p in zip(PAIR_ORDER, self.values) if predicate(*key))

    @property
    def error_mass(self) -> float:
        """(+1,+1) 을 제외한 8개 항목의 직접 합 (1 - p_{1,1} 을 빼기 없이 계산)"""
        return self._mass(lambda a, b: (a, b) != (1, 1))

    @property
    def heralded_mass(self) -> float:
        return self._mass(lambda a, b: a == 0 or b == 0)

    @property
    def success_mass(self) -> float:
        return self._mass(lambda a, b: a != 0 and b != 0)

    @property
    def silent_x_mass(self) -> float:
        return self._mass(lambda a, b: a == -1 and b != 0)

    @property
    def silent_z_mass(self) -> float:
        return self._mass(lambda a, b: b == -1 and a != 0)


# 지표 관련 스키마
class ChainParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    l_tot: float = Field(..., gt=0.0)
    l0: float = Field(..., gt=0.0)
    n_stations: int = Field(..., ge=1)

    @classmethod
    def from_spacing(cls, l_tot: float, l0: float) -> "ChainParams":
        # 부동소수 나눗셈 오차로 N 이 하나 늘어나는 것을 막기 위해 반올림 후 올림
        n_stations = max(1, math.ceil(round(l_tot / l0, 9)))
        return cls(l_tot=l_tot, l0=l0, n_stations=n_stations)

    @property
    def l0_eff(self) -> float:
        return self.l_tot / self.n_stations


class RepeaterMetrics(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    n_stations: int = Field(..., ge=1)
    l0_eff: Optional[float] = None
    eta: Optional[float] = None
    eps: Optional[float] = None
    p_succ: float = Field(..., ge=0.0, le=1.0)
    q_x: float = Field(..., ge=0.0, le=1.0)
    q_z: float = Field(..., ge=0.0, le=1.0)
    q: float = Field(..., ge=0.0, le=1.0)
    r_t0: float = Field(..., ge=0.0, description="R * t0 (TEC 한 주기당 비밀 비트)")
    rate: float = Field(..., ge=0.0, description="R (1/t0 단위)")
    eps_en: float = Field(..., ge=0.0, le=1.0)


# 최적화 관련 스키마
class CostResult(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    l_tot: float
    n: int = Field(..., ge=1)
    m: int = Field(..., ge=1)
    l0: float
    n_stations: int = Field(..., ge=1)
    eta: float
    eps: float
    p_c: float = 0.0
    p_succ: float
    q_x: float
    q_z: float
    q: float
    r_t0: float
    cost: float
    cost_coeff: float
    k: float = 1.0
    no_key: bool = False

    def tie_key(self):
        """최소 비용, 적은 큐비트 수, 작은 n, 큰 L0 순서의 결정적 비교 키"""
        return (self.cost_coeff, self.n * self.m, self.n, -self.l0)


class SearchConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_range: Tuple[int, int]
    m_range: Tuple[int, int]
    l0_grid: Tuple[float, ...] = DEFAULT_L0_GRID
    k: float = Field(1.0, ge=0.0, le=1.0)
    channel: ChannelParams = ChannelParams(eps_direct=1e-3)
    l_tot: float = Field(10000.0, gt=0.0)
    threads: int = Field(QPC_THREADS, ge=1)

    @model_validator(mode="before")
    @classmethod
    def fill_ranges(cls, data):
        # 일반화 비용(k < 1)은 더 넓은 코드 범위를 기본으로 사용
        if isinstance(data, dict):
            data = dict(data)
            default = DEFAULT_CODE_RANGE if data.get("k", 1.0) == 1.0 else GENERALIZED_CODE_RANGE
            for name in ("n_range", "m_range"):
                if data.get(name) is None:
                    data[name] = default
        return data

    @model_validator(mode="after")
    def check_ranges(self):
        for name in ("n_range", "m_range"):
            lo, hi = getattr(self, name)
            if lo < 1 or hi < lo:
                raise ValueError(f"{name} 범위가 올바르지 않습니다: {(lo, hi)}")
        if not self.l0_grid or any(x <= 0 for x in self.l0_grid):
            raise ValueError("l0_grid 는 양수 값이 하나 이상 있어야 합니다")
        return self


class SweepConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    base: SearchConfig = SearchConfig(l_tot=500.0)
    axis: Literal["l_tot", "eps", "p_c", "k"] = "l_tot"
    values: Tuple[float, ...] = DEFAULT_SWEEP_L_TOT

    @field_validator("values")
    @classmethod
    def check_values(cls, v):
        if not v:
            raise ValueError("스윕 값 목록이 비어 있습니다")
        return v


class PolylogFit(BaseModel):
    slope: float
    intercept: float
    monotone: bool
    points: int


class ThresholdResult(BaseModel):
    eps: float
    loss: float
    target: float
    achievable: bool
    n: Optional[int] = None
    m: Optional[int] = None
    eps_en: Optional[float] = None

    @computed_field
    @property
    def qubits(self) -> Optional[int]:
        if not self.achievable:
            return None
        return self.n * self.m


# 몬테카를로 관련 스키마
class McConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    samples: int = Field(..., ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    code: CodeParams
    channel: Optional[ChannelParams] = None
    qubit_pair: Optional[QubitPairDist] = None
    hops: int = Field(1, ge=1)
    threads: int = Field(QPC_THREADS, ge=1)

    @model_validator(mode="after")
    def check_source(self):
        if self.channel is None and self.qubit_pair is None:
            raise ValueError("channel 또는 qubit_pair 중 하나는 지정해야 합니다")
        return self


class McEstimate(BaseModel):
    samples: int
    counts: Tuple[int, ...]
    estimates: Tuple[float, ...]
    std_errors: Tuple[float, ...]

    def __getitem__(self, key: Tuple[int, int]) -> float:
        return self.estimates[pair_index(*key)]


class ChainEstimate(BaseModel):
    trajectories: int
    hops: int
    survivors: int
    p_succ: float
    p_succ_se: float
    q_x: Optional[float] = None
    q_x_se: Optional[float] = None
    q_z: Optional[float] = None
    q_z_se: Optional[float] = None
    analytic_p_succ: Optional[float] = None
    analytic_q_x: Optional[float] = None
    analytic_q_z: Optional[float] = None


# CLI 보고서 스키마
class DistReport(BaseModel):
    code: CodeParams
    eta: float
    eps: float
    qubit_pair: QubitPairDist
    row: TrinaryPairDist
    encoded: TrinaryPairDist
    capacity_ok: bool


class RateReport(BaseModel):
    code: CodeParams
    metrics: RepeaterMetrics


class CostTable(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    axis: Optional[str] = None
    rows: List[CostResult]
    polylog: Optional[PolylogFit] = None


class McReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    code: CodeParams
    seed: int
    block: McEstimate
    analytic: TrinaryPairDist
    z_scores: Tuple[float, ...]
    chain: Optional[ChainEstimate] = None


class RunConfig(BaseModel):
    """CLI 한 번의 실행을 완전히 기술하는 설정 (설정 파일 < 명령행 플래그)"""

    model_config = ConfigDict(extra="forbid")

    command: Literal["dist", "rate", "optimize", "threshold", "sweep", "mc"]
    n: int = Field(13, ge=1)
    m: int = Field(6, ge=1)
    eps: Optional[float] = Field(None, ge=0.0, le=1.0)
    eps_d: float = Field(0.0, ge=0.0, le=1.0)
    eps_g: float = Field(0.0, ge=0.0, le=1.0)
    eps_m: float = Field(0.0, ge=0.0, le=1.0)
    p_c: float = Field(0.0, ge=0.0, lt=1.0)
    l0: float = Field(1.5, gt=0.0)
    l_tot: float = Field(10000.0, gt=0.0)
    l_att: float = Field(DEFAULT_L_ATT_KM, gt=0.0)
    t0: float = Field(DEFAULT_T0, gt=0.0)
    k: float = Field(1.0, ge=0.0, le=1.0)
    loss: float = Field(0.0, ge=0.0, lt=1.0)
    target: float = Field(2e-14, gt=0.0, le=1.0)
    samples: int = Field(100000, ge=1)
    seed: int = Field(7, ge=0, lt=2**64)
    hops: int = Field(1, ge=1)
    sweep_over: Literal["l_tot", "eps", "p_c", "k"] = "l_tot"
    values: Optional[Tuple[float, ...]] = None
    n_range: Optional[Tuple[int, int]] = None
    m_range: Optional[Tuple[int, int]] = None
    l0_grid: Optional[Tuple[float, ...]] = None
    format: Literal["csv", "json"] = "csv"
    out: Optional[str] = None
    threads: int = Field(QPC_THREADS, ge=1)

    @model_validator(mode="before")
    @classmethod
    def default_eps(cls, data):
        # 오류 성분을 하나도 주지 않으면 기준값 eps = 1e-3 을 사용
        if isinstance(data, dict) and data.get("eps") is None:
            if all(data.get(name) is None for name in ("eps_d", "eps_g", "eps_m")):
                data = {**data, "eps": 1e-3}
        return data

    def channel(self) -> ChannelParams:
        return ChannelParams(
            eps_d=self.eps_d,
            eps_g=self.eps_g,
            eps_m=self.eps_m,
            eps_direct=self.eps,
            p_c=self.p_c,
            l0=self.l0,
            l_att=self.l_att,
            t0=self.t0,
        )

    def code(self) -> CodeParams:
        return CodeParams(n=self.n, m=self.m)

    def search_config(self) -> SearchConfig:
        extra = {}
        if self.l0_grid is not None:
            extra["l0_grid"] = self.l0_grid
        return SearchConfig(
            n_range=self.n_range,
            m_range=self.m_range,
            k=self.k,
            channel=self.channel(),
            l_tot=self.l_tot,
            threads=self.threads,
            **extra,
        )

    def sweep_config(self) -> SweepConfig:
        extra = {"values": self.values} if self.values is not None else {}
        return SweepConfig(base=self.search_config(), axis=self.sweep_over, **extra)

    def mc_config(self) -> McConfig:
        return McConfig(
            samples=self.samples,
            seed=self.seed,
            code=self.code(),
            channel=self.channel(),
            hops=self.hops,
            threads=self.threads,
        )
