# Tests for dqcrcx
