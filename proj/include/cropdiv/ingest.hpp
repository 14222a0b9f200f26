#pragma once

#include <filesystem>
#include <string>

#include "cropdiv/types.hpp"

namespace cropdiv {

enum class RasterFormat { AsciiGrid, RawBinary };

/// Picks the format from the file extension: .asc -> ASCII grid,
/// .bin -> raw binary. Anything else is a FormatError.
RasterFormat raster_format_from_extension(const std::filesystem::path& path);

/// ESRI-style ASCII grid: header lines ncols, nrows, xllcorner, yllcorner,
/// cellsize, NODATA_value (case-insensitive, one per line), then nrows lines
/// of ncols whitespace-separated integers, top row first. Values must fit the
/// 16-bit unsigned range; violations are reported with row/column context.
CategoricalRaster read_ascii_grid(const std::filesystem::path& path);
void write_ascii_grid(const CategoricalRaster& raster, const std::filesystem::path& path);

/// Numeric ASCII grid used for derived metric layers. Missing values are
/// written as the nodata sentinel.
void write_ascii_grid_values(const GridMatrix<double>& values, double cell_size,
                             double origin_x, double origin_y, double nodata_value,
                             const std::filesystem::path& path);

/// Raw binary: <name>.bin of width*height little-endian u16 values, row-major,
/// top row first, plus a <name>.hdr sidecar of key=value lines (width, height,
/// cellsize, origin_x, origin_y, nodata).
CategoricalRaster read_raw_binary(const std::filesystem::path& bin_path);
void write_raw_binary(const CategoricalRaster& raster, const std::filesystem::path& bin_path);

CategoricalRaster read_raster(const std::filesystem::path& path, RasterFormat format);

/// Tallies fine pixels into base cells of base_factor x base_factor pixels.
/// Base cell (r, c) covers pixel rows [r*f, min((r+1)*f, height)) and columns
/// likewise; edge cells may be partial and are kept. Pixels whose code is in
/// the scheme increment counts; every pixel (nodata included) increments
/// total_pixels. Counts are exact integers, so any parallel tiling merges to
/// the same cube.
CountCube tally(const CategoricalRaster& raster, const ClassScheme& scheme, int base_factor,
                int threads = 1);

enum class ZoneResolution { Base, Fine };

/// Builds the per-base-cell zone assignment from an already-read zone raster.
/// At base resolution the raster must match the cube lattice and the label is
/// taken directly. At fine resolution the raster must match the source pixel
/// grid; a base cell whose pixels carry two or more distinct non-nodata
/// labels becomes BORDER, an all-nodata cell becomes OUTSIDE.
ZoneMap zone_map_from_raster(const CategoricalRaster& zones, const CountCube& cube,
                             ZoneResolution resolution);

ZoneMap read_zone_map(const std::filesystem::path& path, const CountCube& cube,
                      ZoneResolution resolution);

} // namespace cropdiv
