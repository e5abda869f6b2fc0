"""Instance generators, change-script replay and benchmarks."""
