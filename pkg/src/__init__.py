# Spectral gradient solvers and benchmark harness
