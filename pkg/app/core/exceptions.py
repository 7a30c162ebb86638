class QpcError(Exception):
    """계산 오류의 기본 클래스. CLI 는 exit_code 를 그대로 종료 코드로 사용합니다."""

    exit_code = 1

    def __init__(self, detail: str, exit_code: int = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class InvalidParameterError(QpcError):
    """입력 파라미터가 사전 조건을 만족하지 않는 경우"""

    exit_code = 2


class DegenerateChannelError(QpcError):
    """헤럴드 실패가 아닌 결과의 확률이 0 이라 QBER 를 정의할 수 없는 경우"""

    exit_code = 3

