#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cropdiv/errors.hpp"

namespace cropdiv {

using ClassCode = std::uint16_t;
using Count = std::int64_t;

// Lattices are stored row-major with row 0 at the top, matching the on-disk
// raster formats.
template <typename Scalar>
using GridMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using CodeMatrix = GridMatrix<ClassCode>;
using CountMatrix = GridMatrix<Count>;
using CountVector = Eigen::Vector<Count, Eigen::Dynamic>;

/// Fine-resolution grid of integer class codes.
struct CategoricalRaster {
    Eigen::Index width = 0;  // pixels
    Eigen::Index height = 0; // pixels
    double cell_size = 1.0;  // meters per pixel edge
    double origin_x = 0.0;   // lower-left corner, meters
    double origin_y = 0.0;
    ClassCode nodata = 0;
    CodeMatrix values; // height x width, row 0 = northernmost

    bool empty() const { return width == 0 || height == 0; }
};

/// Ordered set of class codes counted as cropland. Iteration order fixes the
/// class index j; codes are unique and live in the 16-bit range.
class ClassScheme {
public:
    ClassScheme() = default;
    explicit ClassScheme(std::vector<std::pair<ClassCode, std::string>> classes);

    /// The 19 cropland classes of the 2018 EU crop map (codes 211-290).
    static ClassScheme eu_cropmap_2018();

    Eigen::Index size() const { return static_cast<Eigen::Index>(codes_.size()); }
    ClassCode code(Eigen::Index j) const { return codes_[static_cast<std::size_t>(j)]; }
    const std::string& label(Eigen::Index j) const { return labels_[static_cast<std::size_t>(j)]; }
    const std::vector<ClassCode>& codes() const { return codes_; }

    /// Class index of `code`, or -1 when the code is not in the scheme. O(1).
    std::int32_t index_of(ClassCode code) const { return lookup_[code]; }
    bool contains(ClassCode code) const { return lookup_[code] >= 0; }

    /// Copy of the scheme with one code removed (no-op if absent).
    ClassScheme without(ClassCode code) const;

private:
    std::vector<ClassCode> codes_;
    std::vector<std::string> labels_;
    std::vector<std::int32_t> lookup_; // 65536 entries, code -> index or -1
};

/// Per-base-cell, per-class pixel counts: the sufficient statistic for every
/// diversity quantity. Cell index = row * grid_cols + col (row-major).
struct CountCube {
    Eigen::Index grid_rows = 0;
    Eigen::Index grid_cols = 0;
    int base_factor = 1;        // pixels per base-cell edge
    CountMatrix counts;         // n_cells x n_classes
    CountVector total_pixels;   // all pixels per base cell, in or out of scheme

    // Geometry carried through from the source raster so downstream products
    // can be georeferenced without re-reading it.
    double cell_size = 1.0; // meters per base-cell edge
    double origin_x = 0.0;
    double origin_y = 0.0;
    Eigen::Index source_width = 0;  // pixel dims of the tallied raster
    Eigen::Index source_height = 0;

    Eigen::Index n_cells() const { return counts.rows(); }
    Eigen::Index n_classes() const { return counts.cols(); }
    Eigen::Index cell_index(Eigen::Index row, Eigen::Index col) const {
        return row * grid_cols + col;
    }
};

/// Per-base-cell zone assignment. Labels are non-negative; cells straddling
/// two or more zones carry kBorder, cells with no zone carry kOutside.
struct ZoneMap {
    static constexpr std::int32_t kBorder = -1;
    static constexpr std::int32_t kOutside = -2;

    Eigen::VectorXi assignment; // one entry per base cell

    // For border cells: the distinct labels the cell straddles, ascending.
    // Used only for discard accounting; empty at base resolution.
    std::unordered_map<Eigen::Index, std::vector<std::int32_t>> border_touches;

    Eigen::Index n_cells() const { return assignment.size(); }
};

/// Base-cell indices of one evaluation unit, ascending. The ascending order
/// fixes the floating-point accumulation order across cells.
struct UnitSelection {
    std::vector<Eigen::Index> cells;

    static UnitSelection all_cells(const CountCube& cube) {
        UnitSelection u;
        u.cells.resize(static_cast<std::size_t>(cube.n_cells()));
        for (Eigen::Index i = 0; i < cube.n_cells(); ++i) {
            u.cells[static_cast<std::size_t>(i)] = i;
        }
        return u;
    }

    bool empty() const { return cells.empty(); }
    std::size_t size() const { return cells.size(); }
};

struct DiversityValues {
    double alpha = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
};

/// Diversity of one spatial unit. `div` is absent when the unit holds no
/// cropland pixels; absent values never serialize as 0 or NaN.
struct DiversityRecord {
    std::string unit_id;
    double scale_m = 0.0; // 0 = administrative unit
    std::optional<DiversityValues> div;
    int richness = 0;
    double cropland_fraction = 0.0;
    Eigen::Index n_cells = 0;
    Count cropland_pixels = 0;
};

/// Pooled class proportions of a unit, in both normalizations. The
/// over-cropland vector is absent for cropland-free units; over-land
/// proportions sum to the cropland fraction.
struct ProportionVector {
    std::optional<Eigen::VectorXd> cropland; // pooled c_j / sum of pooled counts
    Eigen::VectorXd land;                    // pooled c_j / sum of total_pixels
};

} // namespace cropdiv
