# QPC 양자 중계기 성능 계산 패키지
