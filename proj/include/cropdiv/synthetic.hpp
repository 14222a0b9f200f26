#pragma once

#include <cstdint>
#include <vector>

#include "cropdiv/types.hpp"

namespace cropdiv {

/// Counter-based 64-bit generator (splitmix64 finalizer). Every draw is a
/// pure function of (seed, stream, counter), so rasters generate identically
/// on any platform and any row can be produced independently:
///
///   mix(x):  x += 0x9E3779B97F4A7C15
///            x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9
///            x = (x ^ (x >> 27)) * 0x94D049BB133111EB
///            return x ^ (x >> 31)
///   draw(seed, stream, counter) = mix(mix(mix(seed) ^ stream) ^ counter)
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t counter_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

/// Uniform double in [0, 1) from a draw (53-bit mantissa).
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

enum class GeneratorKind { Checkerboard, Patchwork, UniformRandom };

/// Synthetic landscape with known diversity structure. Seeded generators are
/// fully deterministic for a given seed.
struct SyntheticSpec {
    Eigen::Index cell_rows = 0; // base-cell lattice shape
    Eigen::Index cell_cols = 0;
    int base_factor = 1;
    GeneratorKind kind = GeneratorKind::Checkerboard;
    std::uint64_t seed = 0;

    /// Class codes to emit; defaults to the first n_classes codes of the EU
    /// crop map scheme when empty.
    std::vector<ClassCode> codes;
    int n_classes = 4;

    std::vector<double> class_weights; // empty = equal weights

    /// Patchwork only: patch edge lengths in base cells, drawn uniformly.
    int patch_min = 1;
    int patch_max = 8;

    /// Probability that a pixel is cropland at all; misses get
    /// non_cropland_code. Checkerboards ignore this (always 1).
    double cropland_fraction = 1.0;
    ClassCode non_cropland_code = 1;

    ClassCode nodata = 0;
    double cell_size = 10.0; // meters per pixel
    double origin_x = 0.0;
    double origin_y = 0.0;
};

/// Generates the raster. A checkerboard with S classes uses a p x p period
/// when S = p^2 (each base cell one class), otherwise diagonal stripes of
/// period S; either way every period-aligned window holds all classes in
/// equal area, so alpha = 1 and gamma = S there.
CategoricalRaster generate(const SyntheticSpec& spec);

} // namespace cropdiv
