#pragma once

#include <cstdint>

#include "dek/dataset.hpp"

namespace dek {

/// Two interleaved half circles in 2D, n/2 per class (the first class gets the
/// extra sample when n is odd), isotropic Gaussian noise of the given stddev.
Dataset make_two_moons(std::size_t n, double noise, std::uint64_t seed);

/// Two isotropic Gaussian blobs (unit stddev) centred at -/+ separation/2 on
/// the first axis, `dim` dimensions, n/2 per class.
Dataset make_two_blobs(std::size_t n, double separation, std::uint64_t seed, int dim = 2);

/// Breiman's waveform data: 21 features, 3 equiprobable classes, each sample a
/// random convex mix of two of three shifted triangular waves plus N(0, 1)
/// noise.
Dataset make_waveform(std::size_t n, std::uint64_t seed);

}  // namespace dek
