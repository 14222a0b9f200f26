#include "cropdiv/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cropdiv/csv.hpp"
#include "cropdiv/parallel.hpp"

namespace cropdiv {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

// Cursor over whitespace-separated tokens that tracks line numbers for error
// context.
struct TokenCursor {
    const char* p;
    const char* end;
    long line = 1;

    void skip_space() {
        while (p < end && is_space(*p)) {
            if (*p == '\n') ++line;
            ++p;
        }
    }
    bool done() {
        skip_space();
        return p >= end;
    }
    std::string_view next() {
        skip_space();
        const char* start = p;
        while (p < end && !is_space(*p)) ++p;
        return {start, static_cast<std::size_t>(p - start)};
    }
};

double parse_double_token(std::string_view tok, const std::string& context) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw FormatError(context + ": expected a number, got '" + std::string(tok) + "'");
    }
    return value;
}

long long parse_int_token(std::string_view tok, const std::string& context) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw FormatError(context + ": expected an integer, got '" + std::string(tok) + "'");
    }
    return value;
}

ClassCode check_code_range(long long value, const std::string& context) {
    if (value < 0 || value > 65535) {
        throw FormatError(context + ": value " + std::to_string(value) +
                          " outside the 16-bit unsigned range");
    }
    return static_cast<ClassCode>(value);
}

} // namespace

RasterFormat raster_format_from_extension(const std::filesystem::path& path) {
    const std::string ext = lower(path.extension().string());
    if (ext == ".asc") return RasterFormat::AsciiGrid;
    if (ext == ".bin") return RasterFormat::RawBinary;
    throw FormatError("cannot infer raster format from '" + path.string() +
                      "' (expected .asc or .bin)");
}

CategoricalRaster read_ascii_grid(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    TokenCursor cur{text.data(), text.data() + text.size()};
    const std::string name = path.string();

    CategoricalRaster raster;
    long long ncols = -1, nrows = -1;
    bool have_x = false, have_y = false, have_cell = false;

    // Header: key/value lines until the first token that is not a known key.
    while (!cur.done()) {
        TokenCursor peek = cur;
        const std::string_view tok = peek.next();
        if (tok.empty() || !std::isalpha(static_cast<unsigned char>(tok.front()))) {
            break;
        }
        const std::string key = lower(std::string(tok));
        const std::string ctx = name + ": header line " + std::to_string(cur.line);
        cur = peek;
        if (cur.done()) {
            throw FormatError(ctx + ": key '" + key + "' has no value");
        }
        const std::string_view val = cur.next();
        if (key == "ncols") {
            ncols = parse_int_token(val, ctx);
        } else if (key == "nrows") {
            nrows = parse_int_token(val, ctx);
        } else if (key == "xllcorner") {
            raster.origin_x = parse_double_token(val, ctx);
            have_x = true;
        } else if (key == "yllcorner") {
            raster.origin_y = parse_double_token(val, ctx);
            have_y = true;
        } else if (key == "cellsize") {
            raster.cell_size = parse_double_token(val, ctx);
            have_cell = true;
        } else if (key == "nodata_value") {
            raster.nodata = check_code_range(parse_int_token(val, ctx), ctx);
        } else {
            throw FormatError(ctx + ": unknown header key '" + key + "'");
        }
    }
    if (ncols <= 0 || nrows <= 0) {
        throw FormatError(name + ": header must declare positive ncols and nrows");
    }
    if (!have_x || !have_y || !have_cell) {
        throw FormatError(name + ": header missing xllcorner, yllcorner or cellsize");
    }
    if (!(raster.cell_size > 0.0)) {
        throw FormatError(name + ": cellsize must be positive");
    }

    raster.width = static_cast<Eigen::Index>(ncols);
    raster.height = static_cast<Eigen::Index>(nrows);
    raster.values.resize(raster.height, raster.width);

    for (Eigen::Index r = 0; r < raster.height; ++r) {
        for (Eigen::Index c = 0; c < raster.width; ++c) {
            if (cur.done()) {
                throw FormatError(name + ": truncated payload, expected " +
                                  std::to_string(nrows * ncols) + " values but input ends at row " +
                                  std::to_string(r + 1) + ", col " + std::to_string(c + 1));
            }
            const std::string ctx = name + ": row " + std::to_string(r + 1) + ", col " +
                                    std::to_string(c + 1);
            raster.values(r, c) = check_code_range(parse_int_token(cur.next(), ctx), ctx);
        }
    }
    if (!cur.done()) {
        throw FormatError(name + ": trailing data after " + std::to_string(nrows * ncols) +
                          " values");
    }
    return raster;
}

void write_ascii_grid(const CategoricalRaster& raster, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ComputeError("cannot write " + path.string());
    }
    out << "ncols " << raster.width << "\n";
    out << "nrows " << raster.height << "\n";
    out << "xllcorner " << format_double(raster.origin_x) << "\n";
    out << "yllcorner " << format_double(raster.origin_y) << "\n";
    out << "cellsize " << format_double(raster.cell_size) << "\n";
    out << "NODATA_value " << raster.nodata << "\n";
    std::string row;
    for (Eigen::Index r = 0; r < raster.height; ++r) {
        row.clear();
        for (Eigen::Index c = 0; c < raster.width; ++c) {
            if (c > 0) row.push_back(' ');
            row += std::to_string(raster.values(r, c));
        }
        row.push_back('\n');
        out << row;
    }
    if (!out) {
        throw ComputeError("write failed for " + path.string());
    }
}

void write_ascii_grid_values(const GridMatrix<double>& values, double cell_size,
                             double origin_x, double origin_y, double nodata_value,
                             const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ComputeError("cannot write " + path.string());
    }
    out << "ncols " << values.cols() << "\n";
    out << "nrows " << values.rows() << "\n";
    out << "xllcorner " << format_double(origin_x) << "\n";
    out << "yllcorner " << format_double(origin_y) << "\n";
    out << "cellsize " << format_double(cell_size) << "\n";
    out << "NODATA_value " << format_double(nodata_value) << "\n";
    std::string row;
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        row.clear();
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            if (c > 0) row.push_back(' ');
            const double v = values(r, c);
            row += format_double(std::isnan(v) ? nodata_value : v);
        }
        row.push_back('\n');
        out << row;
    }
    if (!out) {
        throw ComputeError("write failed for " + path.string());
    }
}

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& bin_path) {
    std::filesystem::path hdr = bin_path;
    hdr.replace_extension(".hdr");
    return hdr;
}

} // namespace

CategoricalRaster read_raw_binary(const std::filesystem::path& bin_path) {
    const std::filesystem::path hdr_path = sidecar_path(bin_path);
    const std::string hdr_text = read_file(hdr_path);
    const std::string hdr_name = hdr_path.string();

    CategoricalRaster raster;
    long long width = -1, height = -1;
    bool have_cell = false;

    std::istringstream lines(hdr_text);
    std::string line;
    long line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        const std::string ctx = hdr_name + ": line " + std::to_string(line_no);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError(ctx + ": expected key=value");
        }
        const std::string key = lower(line.substr(0, eq));
        const std::string val = line.substr(eq + 1);
        if (key == "width") {
            width = parse_int_token(val, ctx);
        } else if (key == "height") {
            height = parse_int_token(val, ctx);
        } else if (key == "cellsize") {
            raster.cell_size = parse_double_token(val, ctx);
            have_cell = true;
        } else if (key == "origin_x") {
            raster.origin_x = parse_double_token(val, ctx);
        } else if (key == "origin_y") {
            raster.origin_y = parse_double_token(val, ctx);
        } else if (key == "nodata") {
            raster.nodata = check_code_range(parse_int_token(val, ctx), ctx);
        } else {
            throw FormatError(ctx + ": unknown header key '" + key + "'");
        }
    }
    if (width <= 0 || height <= 0) {
        throw FormatError(hdr_name + ": header must declare positive width and height");
    }
    if (!have_cell || !(raster.cell_size > 0.0)) {
        throw FormatError(hdr_name + ": header must declare a positive cellsize");
    }

    const std::string payload = read_file(bin_path);
    const std::size_t expected = static_cast<std::size_t>(width) *
                                 static_cast<std::size_t>(height) * 2u;
    if (payload.size() < expected) {
        const std::size_t have_px = payload.size() / 2;
        throw FormatError(bin_path.string() + ": truncated payload, expected " +
                          std::to_string(width * height) + " values but found " +
                          std::to_string(have_px) + " (stops near row " +
                          std::to_string(have_px / static_cast<std::size_t>(width) + 1) +
                          ", col " + std::to_string(have_px % static_cast<std::size_t>(width) + 1) +
                          ")");
    }
    if (payload.size() > expected) {
        throw FormatError(bin_path.string() + ": payload larger than width*height values");
    }

    raster.width = static_cast<Eigen::Index>(width);
    raster.height = static_cast<Eigen::Index>(height);
    raster.values.resize(raster.height, raster.width);
    const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());
    ClassCode* dst = raster.values.data();
    const Eigen::Index n = raster.width * raster.height;
    for (Eigen::Index i = 0; i < n; ++i) {
        dst[i] = static_cast<ClassCode>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
    }
    return raster;
}

void write_raw_binary(const CategoricalRaster& raster, const std::filesystem::path& bin_path) {
    {
        std::ofstream hdr(sidecar_path(bin_path), std::ios::binary);
        if (!hdr) {
            throw ComputeError("cannot write " + sidecar_path(bin_path).string());
        }
        hdr << "width=" << raster.width << "\n";
        hdr << "height=" << raster.height << "\n";
        hdr << "cellsize=" << format_double(raster.cell_size) << "\n";
        hdr << "origin_x=" << format_double(raster.origin_x) << "\n";
        hdr << "origin_y=" << format_double(raster.origin_y) << "\n";
        hdr << "nodata=" << raster.nodata << "\n";
    }
    std::ofstream out(bin_path, std::ios::binary);
    if (!out) {
        throw ComputeError("cannot write " + bin_path.string());
    }
    std::vector<unsigned char> buf;
    const Eigen::Index n = raster.width * raster.height;
    buf.resize(static_cast<std::size_t>(n) * 2u);
    const ClassCode* src = raster.values.data();
    for (Eigen::Index i = 0; i < n; ++i) {
        buf[static_cast<std::size_t>(2 * i)] = static_cast<unsigned char>(src[i] & 0xFF);
        buf[static_cast<std::size_t>(2 * i + 1)] = static_cast<unsigned char>(src[i] >> 8);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) {
        throw ComputeError("write failed for " + bin_path.string());
    }
}

CategoricalRaster read_raster(const std::filesystem::path& path, RasterFormat format) {
    switch (format) {
    case RasterFormat::AsciiGrid:
        return read_ascii_grid(path);
    case RasterFormat::RawBinary:
        return read_raw_binary(path);
    }
    throw FormatError("unknown raster format");
}

CountCube tally(const CategoricalRaster& raster, const ClassScheme& scheme, int base_factor,
                int threads) {
    if (raster.empty()) {
        throw ComputeError("tally over a zero-area raster");
    }
    if (base_factor < 1) {
        throw ComputeError("base_factor must be >= 1");
    }
    if (scheme.size() < 1) {
        throw ComputeError("class scheme is empty");
    }
    if (scheme.contains(raster.nodata)) {
        throw ComputeError("class scheme contains the raster nodata code " +
                           std::to_string(raster.nodata));
    }

    const Eigen::Index f = base_factor;
    CountCube cube;
    cube.base_factor = base_factor;
    cube.grid_rows = (raster.height + f - 1) / f;
    cube.grid_cols = (raster.width + f - 1) / f;
    cube.cell_size = raster.cell_size * static_cast<double>(base_factor);
    cube.origin_x = raster.origin_x;
    cube.origin_y = raster.origin_y;
    cube.source_width = raster.width;
    cube.source_height = raster.height;
    cube.counts = CountMatrix::Zero(cube.grid_rows * cube.grid_cols, scheme.size());
    cube.total_pixels = CountVector::Zero(cube.grid_rows * cube.grid_cols);

    // Each chunk of base-cell rows touches a disjoint slice of the cube, and
    // counting is integer addition, so the result is identical for any
    // thread count.
    parallel_chunks(cube.grid_rows, threads, [&](Eigen::Index row_begin, Eigen::Index row_end) {
        for (Eigen::Index cell_row = row_begin; cell_row < row_end; ++cell_row) {
            const Eigen::Index px_row_end = std::min((cell_row + 1) * f, raster.height);
            for (Eigen::Index r = cell_row * f; r < px_row_end; ++r) {
                const ClassCode* px = raster.values.data() + r * raster.width;
                for (Eigen::Index cell_col = 0; cell_col < cube.grid_cols; ++cell_col) {
                    const Eigen::Index px_col_end = std::min((cell_col + 1) * f, raster.width);
                    const Eigen::Index cell = cube.cell_index(cell_row, cell_col);
                    Count* counts_row = cube.counts.data() + cell * scheme.size();
                    for (Eigen::Index c = cell_col * f; c < px_col_end; ++c) {
                        const std::int32_t j = scheme.index_of(px[c]);
                        if (j >= 0) {
                            ++counts_row[j];
                        }
                    }
                    cube.total_pixels[cell] += px_col_end - cell_col * f;
                }
            }
        }
    });
    return cube;
}

ZoneMap zone_map_from_raster(const CategoricalRaster& zones, const CountCube& cube,
                             ZoneResolution resolution) {
    ZoneMap map;
    map.assignment.resize(cube.n_cells());

    if (resolution == ZoneResolution::Base) {
        if (zones.height != cube.grid_rows || zones.width != cube.grid_cols) {
            throw FormatError("zone raster is " + std::to_string(zones.height) + "x" +
                              std::to_string(zones.width) + " but the base-cell lattice is " +
                              std::to_string(cube.grid_rows) + "x" +
                              std::to_string(cube.grid_cols));
        }
        for (Eigen::Index r = 0; r < cube.grid_rows; ++r) {
            for (Eigen::Index c = 0; c < cube.grid_cols; ++c) {
                const ClassCode label = zones.values(r, c);
                map.assignment[cube.cell_index(r, c)] =
                    label == zones.nodata ? ZoneMap::kOutside : static_cast<std::int32_t>(label);
            }
        }
        return map;
    }

    if (cube.source_width <= 0 || cube.source_height <= 0) {
        throw ComputeError("cube lacks source pixel dimensions; cannot align a fine zone raster");
    }
    if (zones.height != cube.source_height || zones.width != cube.source_width) {
        throw FormatError("zone raster is " + std::to_string(zones.height) + "x" +
                          std::to_string(zones.width) + " but the source pixel grid is " +
                          std::to_string(cube.source_height) + "x" +
                          std::to_string(cube.source_width));
    }

    const Eigen::Index f = cube.base_factor;
    for (Eigen::Index cell_row = 0; cell_row < cube.grid_rows; ++cell_row) {
        for (Eigen::Index cell_col = 0; cell_col < cube.grid_cols; ++cell_col) {
            const Eigen::Index cell = cube.cell_index(cell_row, cell_col);
            const Eigen::Index r_end = std::min((cell_row + 1) * f, zones.height);
            const Eigen::Index c_end = std::min((cell_col + 1) * f, zones.width);
            std::vector<std::int32_t> labels; // distinct labels seen in the cell
            for (Eigen::Index r = cell_row * f; r < r_end; ++r) {
                for (Eigen::Index c = cell_col * f; c < c_end; ++c) {
                    const ClassCode v = zones.values(r, c);
                    if (v == zones.nodata) continue;
                    const auto label = static_cast<std::int32_t>(v);
                    if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
                        labels.push_back(label);
                    }
                }
            }
            if (labels.empty()) {
                map.assignment[cell] = ZoneMap::kOutside;
            } else if (labels.size() == 1) {
                map.assignment[cell] = labels.front();
            } else {
                map.assignment[cell] = ZoneMap::kBorder;
                std::sort(labels.begin(), labels.end());
                map.border_touches.emplace(cell, std::move(labels));
            }
        }
    }
    return map;
}

ZoneMap read_zone_map(const std::filesystem::path& path, const CountCube& cube,
                      ZoneResolution resolution) {
    const CategoricalRaster zones = read_raster(path, raster_format_from_extension(path));
    return zone_map_from_raster(zones, cube, resolution);
}

} // namespace cropdiv
