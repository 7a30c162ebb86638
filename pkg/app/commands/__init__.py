# CLI 하위 명령 패키지
