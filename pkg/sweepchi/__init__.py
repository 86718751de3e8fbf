# SweepChi: Euler characteristic by sweeping planes
