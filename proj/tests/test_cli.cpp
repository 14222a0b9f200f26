#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "cropdiv/ingest.hpp"

using namespace cropdiv;
namespace fs = std::filesystem;

namespace {

const std::string kBin = CROPDIV_BIN;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cropdiv-cli-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int run(const std::string& args) {
    const std::string cmd = kBin + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    REQUIRE(in.good());
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) {
            fields.push_back(field);
        }
        if (!line.empty() && line.back() == ',') {
            fields.push_back("");
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::size_t column_of(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    REQUIRE(false);
    return 0;
}

} // namespace

TEST_CASE("grid products from a checkerboard") {
    TempDir dir;
    const std::string board = (dir.path / "board.asc").string();
    REQUIRE(run("synth --out " + board +
                " --generator checkerboard --rows 8 --cols 8 --base-factor 4"
                " --classes-count 4") == 0);

    const fs::path out = dir.path / "grid";
    REQUIRE(run("grid --input " + board + " --base-factor 4 --scales 1,2 --out " +
                out.string()) == 0);

    const auto rows = read_csv(out / "grid_diversity.csv");
    REQUIRE(rows.size() > 1);
    const auto& header = rows.front();
    CHECK(header == std::vector<std::string>{"scale_m", "block_row", "block_col", "n_cells",
                                             "cropland_pixels", "cropland_fraction", "alpha",
                                             "gamma", "beta", "richness", "partial", "filtered"});
    const std::size_t scale_col = column_of(header, "scale_m");
    const std::size_t alpha_col = column_of(header, "alpha");
    const std::size_t gamma_col = column_of(header, "gamma");
    const std::size_t beta_col = column_of(header, "beta");

    int scale1 = 0, scale2 = 0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto& row = rows[k];
        if (row[scale_col] == "40") { // factor 1: 4 px x 10 m
            CHECK(row[alpha_col] == row[gamma_col]);
            CHECK(row[beta_col] == "1");
            ++scale1;
        } else {
            REQUIRE(row[scale_col] == "80");
            CHECK(row[alpha_col] == "1");
            CHECK(row[gamma_col] == "4");
            CHECK(row[beta_col] == "4");
            ++scale2;
        }
    }
    CHECK(scale1 == 64);
    CHECK(scale2 == 16);

    // Rerun into a second directory: byte-identical CSV (the manifest carries
    // the only timestamp).
    const fs::path out2 = dir.path / "grid2";
    REQUIRE(run("grid --input " + board + " --base-factor 4 --scales 1,2 --out " +
                out2.string()) == 0);
    CHECK(slurp(out / "grid_diversity.csv") == slurp(out2 / "grid_diversity.csv"));
    CHECK(slurp(out / "gamma_f2.asc") == slurp(out2 / "gamma_f2.asc"));

    // Integer-valued metric rasters are re-readable by the ingest reader.
    const CategoricalRaster richness = read_ascii_grid(out / "richness_f2.asc");
    CHECK(richness.width == 4);
    CHECK(richness.height == 4);
    for (Eigen::Index r = 0; r < 4; ++r) {
        for (Eigen::Index c = 0; c < 4; ++c) {
            CHECK(richness.values(r, c) == 4);
        }
    }

    CHECK(slurp(out / "manifest.json").find("\"command\": \"grid\"") != std::string::npos);
}

TEST_CASE("filtered blocks serialize as markers, not numbers") {
    TempDir dir;
    // 2 base cells: one nearly empty (0.5% cropland), one full.
    std::ofstream raster(dir.path / "thin.asc");
    raster << "ncols 40\nnrows 20\nxllcorner 0\nyllcorner 0\ncellsize 10\nNODATA_value 0\n";
    for (int r = 0; r < 20; ++r) {
        for (int c = 0; c < 40; ++c) {
            const bool left = c < 20;
            const bool crop = left ? (r == 0 && c < 2) : true;
            raster << (crop ? 211 : 1) << (c + 1 < 40 ? ' ' : '\n');
        }
    }
    raster.close();

    const fs::path out = dir.path / "out";
    REQUIRE(run("grid --input " + (dir.path / "thin.asc").string() +
                " --base-factor 20 --scales 1 --min-cropland 0.01 --out " + out.string()) == 0);
    const auto rows = read_csv(out / "grid_diversity.csv");
    REQUIRE(rows.size() == 3);
    const auto& header = rows.front();
    const std::size_t alpha_col = column_of(header, "alpha");
    const std::size_t filtered_col = column_of(header, "filtered");
    CHECK(rows[1][filtered_col] == "true");
    CHECK(rows[1][alpha_col].empty());
    CHECK(rows[2][filtered_col] == "false");
    CHECK_FALSE(rows[2][alpha_col].empty());
}

TEST_CASE("zonal outputs with border discard") {
    TempDir dir;
    const std::string board = (dir.path / "board.asc").string();
    REQUIRE(run("synth --out " + board +
                " --generator uniform --rows 8 --cols 8 --base-factor 4 --classes-count 5"
                " --seed 3") == 0);

    // Fine zone raster: column boundary at pixel 14 cuts through cell column 3.
    std::ofstream zones(dir.path / "zones.asc");
    zones << "ncols 32\nnrows 32\nxllcorner 0\nyllcorner 0\ncellsize 10\nNODATA_value 0\n";
    for (int r = 0; r < 32; ++r) {
        for (int c = 0; c < 32; ++c) {
            zones << (c < 14 ? 1 : 2) << (c + 1 < 32 ? ' ' : '\n');
        }
    }
    zones.close();

    const fs::path out = dir.path / "zonal";
    REQUIRE(run("zonal --input " + board + " --base-factor 4 --scales 1,2 --zones " +
                (dir.path / "zones.asc").string() + " --zones-resolution fine --out " +
                out.string()) == 0);

    const auto rows = read_csv(out / "zones.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows.front() ==
          std::vector<std::string>{"zone", "n_cells", "discarded_cells", "discarded_fraction",
                                   "alpha", "gamma", "beta", "richness"});
    // Zone 1 keeps 3 cell columns, zone 2 keeps 4; both lose the straddling
    // column of 8 cells.
    CHECK(rows[1][0] == "1");
    CHECK(rows[1][1] == "24");
    CHECK(rows[1][2] == "8");
    CHECK(rows[2][0] == "2");
    CHECK(rows[2][1] == "32");
    CHECK(rows[2][2] == "8");

    const auto means = read_csv(out / "zone_scale_means.csv");
    CHECK(means.front() == std::vector<std::string>{"zone", "scale_m", "n_blocks", "mean_alpha",
                                                    "mean_gamma", "mean_beta"});
    CHECK(means.size() == 5); // 2 zones x 2 scales + header
}

TEST_CASE("single all-covering zone equals the whole-domain block") {
    TempDir dir;
    const std::string board = (dir.path / "board.asc").string();
    REQUIRE(run("synth --out " + board +
                " --generator patchwork --rows 6 --cols 6 --base-factor 5 --classes-count 6"
                " --seed 9 --patch-max 3") == 0);

    std::ofstream zones(dir.path / "zone.asc");
    zones << "ncols 6\nnrows 6\nxllcorner 0\nyllcorner 0\ncellsize 50\nNODATA_value 0\n";
    for (int r = 0; r < 6; ++r) {
        zones << "7 7 7 7 7 7\n";
    }
    zones.close();

    const fs::path zout = dir.path / "zonal";
    REQUIRE(run("zonal --input " + board + " --base-factor 5 --scales 1,6 --zones " +
                (dir.path / "zone.asc").string() + " --zones-resolution base --out " +
                zout.string()) == 0);
    const fs::path gout = dir.path / "grid";
    REQUIRE(run("grid --input " + board + " --base-factor 5 --scales 6 --out " +
                gout.string()) == 0);

    const auto zrows = read_csv(zout / "zones.csv");
    const auto grows = read_csv(gout / "grid_diversity.csv");
    REQUIRE(zrows.size() == 2);
    REQUIRE(grows.size() == 2);
    const auto& zh = zrows.front();
    const auto& gh = grows.front();
    // Identical diversity strings: same unit, same arithmetic.
    CHECK(zrows[1][column_of(zh, "alpha")] == grows[1][column_of(gh, "alpha")]);
    CHECK(zrows[1][column_of(zh, "gamma")] == grows[1][column_of(gh, "gamma")]);
    CHECK(zrows[1][column_of(zh, "beta")] == grows[1][column_of(gh, "beta")]);
    CHECK(zrows[1][column_of(zh, "discarded_cells")] == "0");
}

TEST_CASE("profile of the reference domain sits on the axis") {
    TempDir dir;
    const std::string board = (dir.path / "board.asc").string();
    REQUIRE(run("synth --out " + board +
                " --generator patchwork --rows 10 --cols 10 --base-factor 2 --classes-count 5"
                " --seed 5 --patch-max 4") == 0);

    const fs::path out = dir.path / "profile";
    REQUIRE(run("profile --input " + board + " --base-factor 2 --scales 1,2,5 --out " +
                out.string()) == 0);
    const auto rows = read_csv(out / "profiles.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows.front() == std::vector<std::string>{"region", "avg_gamma", "std_gamma",
                                                   "delta_avg", "delta_std", "quadrant"});
    CHECK(rows[1][0] == "domain");
    CHECK(rows[1][3] == "0");
    CHECK(rows[1][4] == "0");
    CHECK(rows[1][5] == "AXIS");
}

TEST_CASE("ecdf reproduces quantiles computable from the grid csv") {
    TempDir dir;
    const std::string board = (dir.path / "board.asc").string();
    REQUIRE(run("synth --out " + board +
                " --generator patchwork --rows 12 --cols 12 --base-factor 2 --classes-count 6"
                " --seed 11 --patch-max 5") == 0);

    const fs::path gout = dir.path / "grid";
    const fs::path eout = dir.path / "ecdf";
    REQUIRE(run("grid --input " + board + " --base-factor 2 --scales 1,3 --out " +
                gout.string()) == 0);
    REQUIRE(run("ecdf --input " + board + " --base-factor 2 --scales 1,3 --out " +
                eout.string()) == 0);

    // Rebuild the scale-1 gamma sample by sorting the grid CSV column.
    const auto grows = read_csv(gout / "grid_diversity.csv");
    const auto& gh = grows.front();
    const std::size_t scale_col = column_of(gh, "scale_m");
    const std::size_t gamma_col = column_of(gh, "gamma");
    const std::size_t filtered_col = column_of(gh, "filtered");
    std::vector<std::string> expected;
    for (std::size_t k = 1; k < grows.size(); ++k) {
        if (grows[k][scale_col] == "20" && grows[k][filtered_col] == "false" &&
            !grows[k][gamma_col].empty()) {
            expected.push_back(grows[k][gamma_col]);
        }
    }
    std::sort(expected.begin(), expected.end(), [](const std::string& a, const std::string& b) {
        return std::stod(a) < std::stod(b);
    });

    const auto erows = read_csv(eout / "ecdf.csv");
    const auto& eh = erows.front();
    CHECK(eh == std::vector<std::string>{"metric", "scale_m", "value", "cum_prob"});
    std::vector<std::string> got;
    for (std::size_t k = 1; k < erows.size(); ++k) {
        if (erows[k][0] == "gamma" && erows[k][1] == "20") {
            got.push_back(erows[k][2]);
        }
    }
    CHECK(got == expected);
}

TEST_CASE("proportion columns sum to one over cropland") {
    TempDir dir;
    const std::string board = (dir.path / "board.asc").string();
    REQUIRE(run("synth --out " + board +
                " --generator uniform --rows 4 --cols 4 --base-factor 5 --classes-count 4"
                " --seed 2 --cropland-fraction 0.7") == 0);

    const fs::path out = dir.path / "props";
    REQUIRE(run("props --input " + board + " --base-factor 5 --scales 1,2 --out " +
                out.string()) == 0);
    const auto rows = read_csv(out / "proportions.csv");
    REQUIRE(rows.size() > 1);
    CHECK(rows.front() == std::vector<std::string>{"scale_m", "block_row", "block_col", "code",
                                                   "prop_cropland", "prop_land"});
    std::map<std::string, double> cropland_sums;
    std::map<std::string, double> land_sums;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const std::string key = rows[k][0] + "/" + rows[k][1] + "/" + rows[k][2];
        if (!rows[k][4].empty()) {
            cropland_sums[key] += std::stod(rows[k][4]);
        }
        land_sums[key] += std::stod(rows[k][5]);
    }
    REQUIRE(!cropland_sums.empty());
    for (const auto& [key, sum] : cropland_sums) {
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    for (const auto& [key, sum] : land_sums) {
        CHECK(sum < 1.0); // cropland fraction < 1 by construction
        CHECK(sum > 0.0);
    }
}

TEST_CASE("thread count does not change the bytes") {
    TempDir dir;
    const std::string board = (dir.path / "board.asc").string();
    REQUIRE(run("synth --out " + board +
                " --generator patchwork --rows 20 --cols 20 --base-factor 3 --classes-count 6"
                " --seed 77 --patch-max 6 --cropland-fraction 0.9") == 0);

    const fs::path a = dir.path / "a";
    const fs::path b = dir.path / "b";
    REQUIRE(run("grid --input " + board + " --base-factor 3 --scales 1,2,5 --threads 1 --out " +
                a.string()) == 0);
    REQUIRE(run("grid --input " + board + " --base-factor 3 --scales 1,2,5 --threads 8 --out " +
                b.string()) == 0);
    CHECK(slurp(a / "grid_diversity.csv") == slurp(b / "grid_diversity.csv"));
    CHECK(slurp(a / "alpha_f5.asc") == slurp(b / "alpha_f5.asc"));
}

TEST_CASE("exit codes distinguish usage, input and compute errors") {
    TempDir dir;
    // Usage: missing required --input.
    CHECK(run("grid --out " + (dir.path / "x").string()) == 1);
    // Usage: unknown subcommand.
    CHECK(run("frobnicate") == 1);
    // Input: file does not exist.
    CHECK(run("grid --input " + (dir.path / "nope.asc").string() + " --out " +
              (dir.path / "x").string()) == 2);
    // Input: malformed payload.
    std::ofstream bad(dir.path / "bad.asc");
    bad << "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value 0\n1 2 3\n";
    bad.close();
    CHECK(run("grid --input " + (dir.path / "bad.asc").string() + " --out " +
              (dir.path / "x").string()) == 2);
    // Usage: zonal without --zones.
    CHECK(run("zonal --input " + (dir.path / "bad.asc").string() + " --out " +
              (dir.path / "x").string()) == 1);

    // Compute: scales not strictly increasing.
    const std::string board = (dir.path / "ok.asc").string();
    REQUIRE(run("synth --out " + board + " --rows 2 --cols 2 --base-factor 2") == 0);
    CHECK(run("grid --input " + board + " --base-factor 2 --scales 2,2 --out " +
              (dir.path / "x").string()) == 3);
}

TEST_CASE("custom schemes and class exclusion") {
    TempDir dir;
    const std::string board = (dir.path / "board.asc").string();
    REQUIRE(run("synth --out " + board +
                " --generator checkerboard --rows 4 --cols 4 --base-factor 2"
                " --classes-count 4") == 0);

    // Dropping one of the four checkerboard classes leaves richness 3.
    const fs::path out = dir.path / "excl";
    REQUIRE(run("grid --input " + board + " --base-factor 2 --scales 2 --exclude-class 211"
                " --out " + out.string()) == 0);
    auto rows = read_csv(out / "grid_diversity.csv");
    const std::size_t rich_col = column_of(rows.front(), "richness");
    const std::size_t frac_col = column_of(rows.front(), "cropland_fraction");
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(rows[k][rich_col] == "3");
        CHECK(rows[k][frac_col] == "0.75");
    }

    // Same effect through an explicit scheme CSV (labels may contain commas).
    std::ofstream scheme(dir.path / "scheme.csv");
    scheme << "code,label\n212,Durum wheat\n213,Barley\n214,\"Rye, winter\"\n";
    scheme.close();
    const fs::path out2 = dir.path / "scheme_out";
    REQUIRE(run("grid --input " + board + " --base-factor 2 --scales 2 --classes " +
                (dir.path / "scheme.csv").string() + " --out " + out2.string()) == 0);
    rows = read_csv(out2 / "grid_diversity.csv");
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(rows[k][rich_col] == "3");
    }
}

TEST_CASE("props rasters match the csv when requested") {
    TempDir dir;
    const std::string board = (dir.path / "b.asc").string();
    REQUIRE(run("synth --out " + board +
                " --generator checkerboard --rows 4 --cols 4 --base-factor 2"
                " --classes-count 4") == 0);
    const fs::path out = dir.path / "props";
    REQUIRE(run("props --input " + board + " --base-factor 2 --scales 2 --write-rasters --out " +
                out.string()) == 0);
    REQUIRE(fs::exists(out / "prop_cropland_c211_f2.asc"));
    REQUIRE(fs::exists(out / "prop_land_c213_f2.asc"));

    // Every class holds a quarter of each aligned block.
    std::ifstream in(out / "prop_cropland_c211_f2.asc");
    std::string line;
    for (int i = 0; i < 6; ++i) std::getline(in, line); // header
    std::getline(in, line);
    CHECK(line == "0.25 0.25");
}

TEST_CASE("profile with zones classifies regions into quadrants") {
    TempDir dir;
    // Left half: patchy multi-class landscape; right half: near-monoculture.
    std::ofstream raster(dir.path / "split.asc");
    raster << "ncols 40\nnrows 20\nxllcorner 0\nyllcorner 0\ncellsize 10\nNODATA_value 0\n";
    for (int r = 0; r < 20; ++r) {
        for (int c = 0; c < 40; ++c) {
            int code;
            if (c < 20) {
                code = 211 + ((r / 2 + c / 2) % 4) + ((r + c) % 2 ? 1 : 0);
                if (code > 219) code = 219;
            } else {
                code = 216;
            }
            raster << code << (c + 1 < 40 ? ' ' : '\n');
        }
    }
    raster.close();
    std::ofstream zones(dir.path / "zones.asc");
    zones << "ncols 20\nnrows 10\nxllcorner 0\nyllcorner 0\ncellsize 20\nNODATA_value 0\n";
    for (int r = 0; r < 10; ++r) {
        for (int c = 0; c < 20; ++c) {
            zones << (c < 10 ? 1 : 2) << (c + 1 < 20 ? ' ' : '\n');
        }
    }
    zones.close();

    const fs::path out = dir.path / "profile";
    REQUIRE(run("profile --input " + (dir.path / "split.asc").string() +
                " --base-factor 2 --scales 1,2,5 --zones " + (dir.path / "zones.asc").string() +
                " --zones-resolution base --out " + out.string()) == 0);
    const auto rows = read_csv(out / "profiles.csv");
    REQUIRE(rows.size() == 4); // header + zones 1, 2 + domain
    const std::size_t quad_col = column_of(rows.front(), "quadrant");
    std::map<std::string, std::string> quadrant;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        quadrant[rows[k][0]] = rows[k][quad_col];
    }
    CHECK(quadrant.at("domain") == "AXIS");
    CHECK(quadrant.count("1") == 1);
    CHECK(quadrant.count("2") == 1);
    CHECK(quadrant.at("1") != "AXIS"); // diverse half sits off-axis vs the domain

    // Explicit reference table: compare everything against a flat profile.
    std::ofstream ref(dir.path / "ref.csv");
    ref << "scale,gamma\n1,1.0\n2,1.0\n5,1.0\n";
    ref.close();
    const fs::path out2 = dir.path / "profile_ref";
    REQUIRE(run("profile --input " + (dir.path / "split.asc").string() +
                " --base-factor 2 --scales 1,2,5 --zones " + (dir.path / "zones.asc").string() +
                " --zones-resolution base --reference " + (dir.path / "ref.csv").string() +
                " --out " + out2.string()) == 0);
    const auto rows2 = read_csv(out2 / "profiles.csv");
    const std::size_t davg_col = column_of(rows2.front(), "delta_avg");
    for (std::size_t k = 1; k < rows2.size(); ++k) {
        if (rows2[k][0] == "1" || rows2[k][0] == "domain") {
            CHECK(std::stod(rows2[k][davg_col]) > 0.0); // diverse region above the flat reference
        }
    }
}

TEST_CASE("zone-level profile source is accepted") {
    TempDir dir;
    const std::string board = (dir.path / "b.asc").string();
    REQUIRE(run("synth --out " + board +
                " --generator patchwork --rows 10 --cols 10 --base-factor 2 --classes-count 5"
                " --seed 6 --patch-max 4") == 0);
    const fs::path out = dir.path / "p";
    REQUIRE(run("profile --input " + board +
                " --base-factor 2 --scales 1,2,5 --profile-source zone-level --out " +
                out.string()) == 0);
    const auto rows = read_csv(out / "profiles.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "domain");
    CHECK(rows[1][5] == "AXIS");
}

TEST_CASE("oracle-check subcommand") {
    CHECK(run("oracle-check --trials 100 --seed 5") == 0);
    CHECK(run("oracle-check --trials 0") == 1); // usage: must be positive
}

TEST_CASE("synth binary output round-trips through ingest") {
    TempDir dir;
    const std::string bin = (dir.path / "land.bin").string();
    REQUIRE(run("synth --out " + bin +
                " --generator uniform --rows 5 --cols 7 --base-factor 3 --classes-count 4"
                " --seed 21") == 0);
    const CategoricalRaster r = read_raw_binary(bin);
    CHECK(r.width == 21);
    CHECK(r.height == 15);

    const fs::path out = dir.path / "grid";
    REQUIRE(run("grid --input " + bin + " --format raw-binary --base-factor 3 --scales 1 --out " +
                out.string()) == 0);
    const auto rows = read_csv(out / "grid_diversity.csv");
    CHECK(rows.size() == 36); // header + 35 cells
}
