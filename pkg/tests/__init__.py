# Tests for sweepchi
