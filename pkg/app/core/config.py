import os
from dotenv import load_dotenv

# 환경 변수 로드
load_dotenv()

# 실행 환경 설정
QPC_THREADS = int(os.getenv("QPC_THREADS", "1"))
QPC_LOG_LEVEL = os.getenv("QPC_LOG_LEVEL", "INFO").upper()

# 몬테카를로 난수 스트림 하나가 담당하는 샘플 수 (바꾸면 재현 결과도 바뀜)
QPC_MC_CHUNK = int(os.getenv("QPC_MC_CHUNK", "65536"))

# 물리 기본값
DEFAULT_L_ATT_KM = 20.0
DEFAULT_T0 = 1.0

# 정확 계산 경로의 허용 크기
REFERENCE_MAX_M = 20
REFERENCE_MAX_N = 12
ENUMERATION_MAX_QUBITS = 12
LITERAL_ENUMERATION_MAX_QUBITS = 8

# 최적화 탐색 기본 범위
DEFAULT_CODE_RANGE = (2, 60)
GENERALIZED_CODE_RANGE = (2, 70)
DEFAULT_L0_GRID = tuple(round(0.5 + 0.1 * i, 1) for i in range(46))

# 임계 코드 탐색 범위
THRESHOLD_MAX_N = 400
THRESHOLD_MAX_M = 25

# 최적점 재검증에서 허용하는 상대 비용 차이
VERIFY_REL_TOL = 1e-12

# 스윕 기본값 (L_tot = 500 km 에서 시작)
DEFAULT_SWEEP_L_TOT = tuple(float(x) for x in range(500, 10001, 500))

# 정규화 허용 오차
NORMALIZATION_TOL = 1e-12
