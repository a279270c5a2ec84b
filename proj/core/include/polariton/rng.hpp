#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>

namespace polariton::rng {

// Counter-based generation: every draw is a pure function of (key, counter),
// so Monte Carlo results are independent of evaluation order and thread
// scheduling. Philox4x32 with 10 rounds.

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to derive stream keys from (seed, stream index).
std::uint64_t mix64(std::uint64_t x);

/// Key for a substream, e.g. one grid point of a scan.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream);

/// Uniform double in [0, 1) from one Philox block.
double uniform01(std::uint64_t key, std::uint64_t counter_hi, std::uint64_t counter_lo);

/// Standard normal via Box-Muller; one Philox block per draw.
double standard_normal(std::uint64_t key, std::uint64_t counter_hi, std::uint64_t counter_lo);

/// Deterministic pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> values);

}  // namespace polariton::rng
