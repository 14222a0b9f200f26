// cropdiv: multi-scale class diversity of categorical rasters.
//
// Subcommands mirror the published data products: per-scale grid diversity,
// zonal (administrative) diversity with border discard, cross-scale profiles,
// ECDF tables, class proportions, synthetic landscapes and an oracle
// self-check.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cropdiv/analytics.hpp"
#include "cropdiv/csv.hpp"
#include "cropdiv/diversity.hpp"
#include "cropdiv/ingest.hpp"
#include "cropdiv/multiscale.hpp"
#include "cropdiv/oracle.hpp"
#include "cropdiv/parallel.hpp"
#include "cropdiv/synthetic.hpp"
#include "cropdiv/zonal.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cropdiv;

namespace {

constexpr const char* kToolVersion = "1.0.0";
constexpr double kRasterNodata = -9999.0;

// ---------------------------------------------------------------------------
// Shared configuration

struct CommonConfig {
    std::string input;
    std::string format = "auto";
    std::string classes_path;
    std::vector<int> exclude_classes;
    int base_factor = 100;
    std::vector<int> scales = {1, 2, 5, 10, 20, 50, 100};
    double min_cropland = 0.01;
    std::string zones_path;
    std::string zones_resolution = "fine";
    std::string covariates_path;
    std::string reference_path;
    std::string out_dir = ".";
    int threads = 0;
};

void add_input_options(CLI::App* cmd, CommonConfig& cfg) {
    cmd->add_option("--input", cfg.input, "Input categorical raster (.asc or .bin)")->required();
    cmd->add_option("--format", cfg.format, "Input format")
        ->check(CLI::IsMember({"auto", "ascii-grid", "raw-binary"}))
        ->capture_default_str();
    cmd->add_option("--classes", cfg.classes_path,
                    "Class scheme CSV (code,label); default: EU crop map 2018 classes");
    cmd->add_option("--exclude-class", cfg.exclude_classes, "Class code to drop (repeatable)");
    cmd->add_option("--base-factor", cfg.base_factor, "Pixels per base-cell edge")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--threads", cfg.threads, "Worker threads, 0 = auto")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
}

void add_sweep_options(CLI::App* cmd, CommonConfig& cfg) {
    cmd->add_option("--scales", cfg.scales, "Block factors in base cells, ascending")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--min-cropland", cfg.min_cropland,
                    "Cropland-fraction threshold below which blocks are filtered out")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
}

void add_out_option(CLI::App* cmd, CommonConfig& cfg) {
    cmd->add_option("--out", cfg.out_dir, "Output directory")->required();
}

void add_zone_options(CLI::App* cmd, CommonConfig& cfg, bool required) {
    auto* opt = cmd->add_option("--zones", cfg.zones_path, "Zone raster (.asc or .bin)");
    if (required) opt->required();
    cmd->add_option("--zones-resolution", cfg.zones_resolution,
                    "Zone raster resolution relative to the cube")
        ->check(CLI::IsMember({"base", "fine"}))
        ->capture_default_str();
}

// ---------------------------------------------------------------------------
// Pipeline pieces

RasterFormat resolve_format(const CommonConfig& cfg) {
    if (cfg.format == "ascii-grid") return RasterFormat::AsciiGrid;
    if (cfg.format == "raw-binary") return RasterFormat::RawBinary;
    return raster_format_from_extension(cfg.input);
}

ClassScheme load_scheme(const CommonConfig& cfg) {
    ClassScheme scheme = cfg.classes_path.empty() ? ClassScheme::eu_cropmap_2018()
                                                  : read_class_scheme_csv(cfg.classes_path);
    for (const int code : cfg.exclude_classes) {
        if (code < 0 || code > 65535) {
            throw FormatError("--exclude-class outside the 16-bit range");
        }
        scheme = scheme.without(static_cast<ClassCode>(code));
    }
    return scheme;
}

CountCube build_cube(const CommonConfig& cfg) {
    const CategoricalRaster raster = read_raster(cfg.input, resolve_format(cfg));
    return tally(raster, load_scheme(cfg), cfg.base_factor, resolve_threads(cfg.threads));
}

ScaleSet scale_set(const CommonConfig& cfg) {
    ScaleSet scales{cfg.scales};
    scales.validate();
    return scales;
}

ZoneMap load_zones(const CommonConfig& cfg, const CountCube& cube) {
    const ZoneResolution res =
        cfg.zones_resolution == "base" ? ZoneResolution::Base : ZoneResolution::Fine;
    return read_zone_map(cfg.zones_path, cube, res);
}

// ---------------------------------------------------------------------------
// Manifest

std::uint64_t fnv1a64_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001B3ULL;
        }
    }
    return hash;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json config_json(const CommonConfig& cfg) {
    return json{{"input", cfg.input},
                {"format", cfg.format},
                {"classes", cfg.classes_path},
                {"exclude_classes", cfg.exclude_classes},
                {"base_factor", cfg.base_factor},
                {"scales", cfg.scales},
                {"min_cropland", cfg.min_cropland},
                {"zones", cfg.zones_path},
                {"zones_resolution", cfg.zones_resolution},
                {"covariates", cfg.covariates_path},
                {"reference", cfg.reference_path},
                {"out", cfg.out_dir},
                {"threads", cfg.threads}};
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config,
                    const std::vector<std::string>& input_paths,
                    const std::vector<std::string>& outputs) {
    json manifest;
    manifest["tool"] = "cropdiv";
    manifest["version"] = kToolVersion;
    manifest["command"] = command;
    manifest["created_utc"] = utc_now();
    manifest["config"] = config;
    manifest["inputs"] = json::array();
    for (const std::string& p : input_paths) {
        if (p.empty()) continue;
        manifest["inputs"].push_back(json{{"path", p},
                                          {"bytes", fs::file_size(p)},
                                          {"fnv1a64", hex64(fnv1a64_file(p))}});
    }
    manifest["outputs"] = outputs;

    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) {
        throw ComputeError("cannot write " + (dir / "manifest.json").string());
    }
    out << manifest.dump(2) << "\n";
}

fs::path prepare_out_dir(const CommonConfig& cfg) {
    const fs::path dir = cfg.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw ComputeError("cannot create output directory " + dir.string());
    }
    return dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ComputeError("cannot write " + path.string());
    }
    return out;
}

// ---------------------------------------------------------------------------
// grid

std::string grid_row(const GridRecord& rec) {
    std::string row = format_double(rec.scale_m);
    row += ',' + std::to_string(rec.block_row);
    row += ',' + std::to_string(rec.block_col);
    row += ',' + std::to_string(rec.n_cells);
    row += ',' + std::to_string(rec.cropland_pixels);
    row += ',' + format_double(rec.cropland_fraction);
    if (rec.div) {
        row += ',' + format_double(rec.div->alpha);
        row += ',' + format_double(rec.div->gamma);
        row += ',' + format_double(rec.div->beta);
    } else {
        row += ",,,";
    }
    row += ',';
    if (rec.richness) row += std::to_string(*rec.richness);
    row += rec.partial ? ",true" : ",false";
    row += rec.filtered ? ",true" : ",false";
    return row;
}

void write_grid_csv(const std::vector<GridRecord>& records, const fs::path& path) {
    std::ofstream out = open_output(path);
    out << "scale_m,block_row,block_col,n_cells,cropland_pixels,cropland_fraction,"
           "alpha,gamma,beta,richness,partial,filtered\n";
    for (const GridRecord& rec : records) {
        out << grid_row(rec) << "\n";
    }
}

void write_metric_rasters(const std::vector<GridRecord>& records, const CountCube& cube,
                          const fs::path& dir, std::vector<std::string>& outputs) {
    std::map<int, std::vector<const GridRecord*>> by_factor;
    for (const GridRecord& rec : records) {
        by_factor[rec.factor].push_back(&rec);
    }
    // Richness rasters are integer-valued, so they get an in-domain nodata
    // and stay readable by the categorical ingest path.
    constexpr double kRichnessNodata = 65535.0;
    for (const auto& [factor, recs] : by_factor) {
        const BlockGrid grid = block_partition(cube, factor);
        GridMatrix<double> alpha(grid.block_rows, grid.block_cols);
        GridMatrix<double> gamma(grid.block_rows, grid.block_cols);
        GridMatrix<double> beta(grid.block_rows, grid.block_cols);
        GridMatrix<double> rich(grid.block_rows, grid.block_cols);
        alpha.setConstant(kRasterNodata);
        gamma.setConstant(kRasterNodata);
        beta.setConstant(kRasterNodata);
        rich.setConstant(kRichnessNodata);
        for (const GridRecord* rec : recs) {
            if (rec->richness) {
                rich(rec->block_row, rec->block_col) = static_cast<double>(*rec->richness);
            }
            if (rec->div) {
                alpha(rec->block_row, rec->block_col) = rec->div->alpha;
                gamma(rec->block_row, rec->block_col) = rec->div->gamma;
                beta(rec->block_row, rec->block_col) = rec->div->beta;
            }
        }
        const double scale_size = cube.cell_size * static_cast<double>(factor);
        const auto emit = [&](const GridMatrix<double>& values, const std::string& name,
                              double nodata) {
            const std::string file = name + "_f" + std::to_string(factor) + ".asc";
            write_ascii_grid_values(values, scale_size, cube.origin_x, cube.origin_y, nodata,
                                    dir / file);
            outputs.push_back(file);
        };
        emit(alpha, "alpha", kRasterNodata);
        emit(gamma, "gamma", kRasterNodata);
        emit(beta, "beta", kRasterNodata);
        emit(rich, "richness", kRichnessNodata);
    }
}

int cmd_grid(const CommonConfig& cfg) {
    const fs::path dir = prepare_out_dir(cfg);
    const CountCube cube = build_cube(cfg);
    const std::vector<GridRecord> records =
        scale_sweep(cube, scale_set(cfg), cfg.min_cropland, resolve_threads(cfg.threads));

    std::vector<std::string> outputs = {"grid_diversity.csv"};
    write_grid_csv(records, dir / "grid_diversity.csv");
    write_metric_rasters(records, cube, dir, outputs);
    write_manifest(dir, "grid", config_json(cfg), {cfg.input, cfg.classes_path}, outputs);
    return 0;
}

// ---------------------------------------------------------------------------
// zonal

void write_zones_csv(const std::vector<ZoneReport>& reports, const fs::path& path) {
    std::ofstream out = open_output(path);
    out << "zone,n_cells,discarded_cells,discarded_fraction,alpha,gamma,beta,richness\n";
    for (const ZoneReport& rep : reports) {
        out << rep.zone << ',' << rep.n_cells << ',' << rep.discarded_cells << ','
            << format_double(rep.discarded_fraction) << ',';
        if (rep.div) {
            out << format_double(rep.div->alpha) << ',' << format_double(rep.div->gamma) << ','
                << format_double(rep.div->beta);
        } else {
            out << ",,";
        }
        out << ',';
        if (rep.richness) out << *rep.richness;
        out << "\n";
    }
}

void write_zone_means_csv(const std::vector<ZoneScaleMean>& means, const fs::path& path) {
    std::ofstream out = open_output(path);
    out << "zone,scale_m,n_blocks,mean_alpha,mean_gamma,mean_beta\n";
    for (const ZoneScaleMean& m : means) {
        out << m.zone << ',' << format_double(m.scale_m) << ',' << m.n_blocks << ','
            << format_optional(m.mean_alpha) << ',' << format_optional(m.mean_gamma) << ','
            << format_optional(m.mean_beta) << "\n";
    }
}

std::vector<DiversityRecord> zone_records(const std::vector<ZoneReport>& reports) {
    std::vector<DiversityRecord> records;
    for (const ZoneReport& rep : reports) {
        DiversityRecord rec;
        rec.unit_id = std::to_string(rep.zone);
        rec.scale_m = 0.0; // administrative sentinel
        rec.div = rep.div;
        rec.richness = rep.richness.value_or(0);
        rec.cropland_fraction = rep.cropland_fraction;
        rec.n_cells = rep.n_cells;
        rec.cropland_pixels = rep.cropland_pixels;
        records.push_back(std::move(rec));
    }
    return records;
}

void write_covariates(const CovariateJoin& join, const fs::path& dir,
                      std::vector<std::string>& outputs) {
    {
        std::ofstream out = open_output(dir / "covariates.csv");
        out << "region,covariate,alpha,gamma,beta\n";
        for (const CovariateRow& row : join.rows) {
            out << row.region << ',' << format_double(row.covariate) << ','
                << format_double(row.alpha) << ',' << format_double(row.gamma) << ','
                << format_double(row.beta) << "\n";
        }
        outputs.push_back("covariates.csv");
    }
    {
        std::ofstream out = open_output(dir / "covariates_unmatched.csv");
        out << "region,present_in\n";
        for (const std::string& region : join.unmatched_records) {
            out << region << ",records\n";
        }
        for (const std::string& region : join.unmatched_covariates) {
            out << region << ",covariates\n";
        }
        outputs.push_back("covariates_unmatched.csv");
    }
}

int cmd_zonal(const CommonConfig& cfg) {
    const fs::path dir = prepare_out_dir(cfg);
    const CountCube cube = build_cube(cfg);
    const ZoneMap zones = load_zones(cfg, cube);

    const std::vector<ZoneReport> reports = zone_diversity(cube, zones, cfg.min_cropland);
    write_zones_csv(reports, dir / "zones.csv");
    std::vector<std::string> outputs = {"zones.csv"};

    const std::vector<GridRecord> sweep =
        scale_sweep(cube, scale_set(cfg), cfg.min_cropland, resolve_threads(cfg.threads));
    write_zone_means_csv(zone_scale_means(sweep, cube, zones), dir / "zone_scale_means.csv");
    outputs.push_back("zone_scale_means.csv");

    if (!cfg.covariates_path.empty()) {
        const CovariateJoin join =
            covariate_join(zone_records(reports), read_covariates_csv(cfg.covariates_path));
        write_covariates(join, dir, outputs);
    }

    write_manifest(dir, "zonal", config_json(cfg),
                   {cfg.input, cfg.classes_path, cfg.zones_path, cfg.covariates_path}, outputs);
    return 0;
}

// ---------------------------------------------------------------------------
// profile

// Gamma per scale for one collection of blocks, either averaged over blocks
// (the mean of grid gammas) or pooled into one unit per scale.
enum class ProfileSource { ZoneMean, ZoneLevel };

std::optional<std::map<int, double>> gamma_profile(
    const std::vector<GridRecord>& records, const CountCube& cube, const ScaleSet& scales,
    ProfileSource source, const std::optional<std::int32_t>& zone, const ZoneMap* zones) {
    std::map<int, BlockGrid> grids;
    std::map<int, double> profile;
    for (const int factor : scales.factors) {
        grids.emplace(factor, block_partition(cube, factor));
    }

    if (source == ProfileSource::ZoneMean) {
        std::map<int, std::pair<double, Eigen::Index>> sums;
        for (const GridRecord& rec : records) {
            if (rec.filtered || !rec.div) continue;
            if (zone) {
                const auto z = block_zone(grids.at(rec.factor), *zones, rec.block_row,
                                          rec.block_col);
                if (!z || *z != *zone) continue;
            }
            auto& [sum, n] = sums[rec.factor];
            sum += rec.div->gamma;
            ++n;
        }
        for (const int factor : scales.factors) {
            const auto it = sums.find(factor);
            if (it == sums.end() || it->second.second == 0) {
                return std::nullopt; // no retained blocks at this scale
            }
            profile[factor] = it->second.first / static_cast<double>(it->second.second);
        }
        return profile;
    }

    // ZoneLevel: pooled counts over the zone's retained blocks, per scale.
    for (const int factor : scales.factors) {
        CountVector pooled = CountVector::Zero(cube.n_classes());
        bool any = false;
        for (const GridRecord& rec : records) {
            if (rec.factor != factor || rec.filtered || !rec.div) continue;
            if (zone) {
                const auto z = block_zone(grids.at(factor), *zones, rec.block_row, rec.block_col);
                if (!z || *z != *zone) continue;
            }
            pooled += pooled_counts(cube, grids.at(factor).unit(rec.block_row, rec.block_col));
            any = true;
        }
        if (!any || pooled.sum() == 0) {
            return std::nullopt;
        }
        profile[factor] = effective_classes(pooled);
    }
    return profile;
}

int cmd_profile(const CommonConfig& cfg, const std::string& source_name) {
    const fs::path dir = prepare_out_dir(cfg);
    const CountCube cube = build_cube(cfg);
    const ScaleSet scales = scale_set(cfg);
    const std::vector<GridRecord> records =
        scale_sweep(cube, scales, cfg.min_cropland, resolve_threads(cfg.threads));
    const ProfileSource source =
        source_name == "zone-level" ? ProfileSource::ZoneLevel : ProfileSource::ZoneMean;

    // Reference: explicit table, or the whole domain with the same selector.
    std::map<int, double> reference;
    if (!cfg.reference_path.empty()) {
        reference = read_reference_csv(cfg.reference_path);
    } else {
        const auto domain = gamma_profile(records, cube, scales, source, std::nullopt, nullptr);
        if (!domain) {
            throw ComputeError("the reference domain has no retained blocks at some scale");
        }
        reference = *domain;
    }

    std::vector<ScaleProfile> profiles;
    if (!cfg.zones_path.empty()) {
        const ZoneMap zones = load_zones(cfg, cube);
        for (const std::int32_t zone : zone_labels(zones)) {
            const auto gamma =
                gamma_profile(records, cube, scales, source, zone, &zones);
            if (!gamma) continue; // no coverage at some scale; cannot profile
            profiles.push_back(scale_profile(std::to_string(zone), *gamma, reference));
        }
    }
    // The domain itself is always profiled; against a computed reference it
    // sits on the axis with zero deltas.
    if (const auto domain = gamma_profile(records, cube, scales, source, std::nullopt, nullptr)) {
        profiles.push_back(scale_profile("domain", *domain, reference));
    }

    std::ofstream out = open_output(dir / "profiles.csv");
    out << "region,avg_gamma,std_gamma,delta_avg,delta_std,quadrant\n";
    for (const ScaleProfile& p : profiles) {
        out << p.region << ',' << format_double(p.avg_gamma) << ',' << format_double(p.std_gamma)
            << ',' << format_double(p.delta_avg) << ',' << format_double(p.delta_std) << ','
            << quadrant_name(p.quadrant) << "\n";
    }

    write_manifest(dir, "profile", config_json(cfg),
                   {cfg.input, cfg.classes_path, cfg.zones_path, cfg.reference_path},
                   {"profiles.csv"});
    return 0;
}

// ---------------------------------------------------------------------------
// ecdf

int cmd_ecdf(const CommonConfig& cfg) {
    const fs::path dir = prepare_out_dir(cfg);
    const CountCube cube = build_cube(cfg);
    const std::vector<GridRecord> records =
        scale_sweep(cube, scale_set(cfg), cfg.min_cropland, resolve_threads(cfg.threads));

    std::map<int, std::pair<std::vector<double>, std::vector<double>>> samples; // factor -> (alpha, gamma)
    std::map<int, double> scale_meters;
    for (const GridRecord& rec : records) {
        if (rec.filtered || !rec.div) continue;
        samples[rec.factor].first.push_back(rec.div->alpha);
        samples[rec.factor].second.push_back(rec.div->gamma);
        scale_meters[rec.factor] = rec.scale_m;
    }

    std::ofstream out = open_output(dir / "ecdf.csv");
    out << "metric,scale_m,value,cum_prob\n";
    const auto emit = [&](const EcdfTable& table) {
        for (std::size_t k = 0; k < table.values.size(); ++k) {
            out << table.metric << ',' << format_double(table.scale_m) << ','
                << format_double(table.values[k]) << ',' << format_double(table.cum_prob[k])
                << "\n";
        }
    };
    for (const auto& [factor, pair] : samples) {
        emit(ecdf("alpha", scale_meters[factor], pair.first));
    }
    for (const auto& [factor, pair] : samples) {
        emit(ecdf("gamma", scale_meters[factor], pair.second));
    }

    write_manifest(dir, "ecdf", config_json(cfg), {cfg.input, cfg.classes_path}, {"ecdf.csv"});
    return 0;
}

// ---------------------------------------------------------------------------
// props

int cmd_props(const CommonConfig& cfg, bool write_rasters) {
    const fs::path dir = prepare_out_dir(cfg);
    const ClassScheme scheme = load_scheme(cfg);
    const CountCube cube = build_cube(cfg);
    const ScaleSet scales = scale_set(cfg);
    const std::vector<GridRecord> records =
        scale_sweep(cube, scales, cfg.min_cropland, resolve_threads(cfg.threads));

    std::map<int, BlockGrid> grids;
    for (const int factor : scales.factors) {
        grids.emplace(factor, block_partition(cube, factor));
    }

    std::vector<std::string> outputs = {"proportions.csv"};
    std::ofstream out = open_output(dir / "proportions.csv");
    out << "scale_m,block_row,block_col,code,prop_cropland,prop_land\n";

    // Raster layers, built alongside the CSV when requested.
    std::map<std::pair<int, Eigen::Index>, GridMatrix<double>> cropland_layers;
    std::map<std::pair<int, Eigen::Index>, GridMatrix<double>> land_layers;
    if (write_rasters) {
        for (const int factor : scales.factors) {
            const BlockGrid& grid = grids.at(factor);
            for (Eigen::Index j = 0; j < scheme.size(); ++j) {
                cropland_layers[{factor, j}] =
                    GridMatrix<double>::Constant(grid.block_rows, grid.block_cols, kRasterNodata);
                land_layers[{factor, j}] =
                    GridMatrix<double>::Constant(grid.block_rows, grid.block_cols, kRasterNodata);
            }
        }
    }

    for (const GridRecord& rec : records) {
        if (rec.filtered) continue;
        const UnitSelection unit = grids.at(rec.factor).unit(rec.block_row, rec.block_col);
        const ProportionVector p = proportions(cube, unit);
        for (Eigen::Index j = 0; j < scheme.size(); ++j) {
            out << format_double(rec.scale_m) << ',' << rec.block_row << ',' << rec.block_col
                << ',' << scheme.code(j) << ',';
            if (p.cropland) out << format_double((*p.cropland)[j]);
            out << ',' << format_double(p.land[j]) << "\n";
            if (write_rasters) {
                if (p.cropland) {
                    cropland_layers[{rec.factor, j}](rec.block_row, rec.block_col) =
                        (*p.cropland)[j];
                }
                land_layers[{rec.factor, j}](rec.block_row, rec.block_col) = p.land[j];
            }
        }
    }

    if (write_rasters) {
        for (const auto& [key, layer] : cropland_layers) {
            const std::string file = "prop_cropland_c" + std::to_string(scheme.code(key.second)) +
                                     "_f" + std::to_string(key.first) + ".asc";
            write_ascii_grid_values(layer, cube.cell_size * key.first, cube.origin_x,
                                    cube.origin_y, kRasterNodata, dir / file);
            outputs.push_back(file);
        }
        for (const auto& [key, layer] : land_layers) {
            const std::string file = "prop_land_c" + std::to_string(scheme.code(key.second)) +
                                     "_f" + std::to_string(key.first) + ".asc";
            write_ascii_grid_values(layer, cube.cell_size * key.first, cube.origin_x,
                                    cube.origin_y, kRasterNodata, dir / file);
            outputs.push_back(file);
        }
    }

    write_manifest(dir, "props", config_json(cfg), {cfg.input, cfg.classes_path}, outputs);
    return 0;
}

// ---------------------------------------------------------------------------
// synth

struct SynthConfig {
    std::string out;
    std::string generator = "checkerboard";
    Eigen::Index rows = 10;
    Eigen::Index cols = 10;
    int base_factor = 10;
    int classes = 4;
    std::uint64_t seed = 0;
    int patch_min = 1;
    int patch_max = 8;
    double cropland_fraction = 1.0;
    double cell_size = 10.0;
    std::vector<double> weights;
};

int cmd_synth(const SynthConfig& sc) {
    SyntheticSpec spec;
    spec.cell_rows = sc.rows;
    spec.cell_cols = sc.cols;
    spec.base_factor = sc.base_factor;
    spec.n_classes = sc.classes;
    spec.seed = sc.seed;
    spec.patch_min = sc.patch_min;
    spec.patch_max = sc.patch_max;
    spec.cropland_fraction = sc.cropland_fraction;
    spec.cell_size = sc.cell_size;
    spec.class_weights = sc.weights;
    if (sc.generator == "checkerboard") {
        spec.kind = GeneratorKind::Checkerboard;
    } else if (sc.generator == "patchwork") {
        spec.kind = GeneratorKind::Patchwork;
    } else {
        spec.kind = GeneratorKind::UniformRandom;
    }

    const CategoricalRaster raster = generate(spec);
    const fs::path out = sc.out;
    if (out.has_parent_path()) {
        fs::create_directories(out.parent_path());
    }
    switch (raster_format_from_extension(out)) {
    case RasterFormat::AsciiGrid:
        write_ascii_grid(raster, out);
        break;
    case RasterFormat::RawBinary:
        write_raw_binary(raster, out);
        break;
    }
    std::cout << "wrote " << out.string() << " (" << raster.width << "x" << raster.height
              << " pixels)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// oracle-check

int cmd_oracle_check(int trials, std::uint64_t seed, double tolerance) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> m_dist(1, 20);
    std::uniform_int_distribution<int> s_dist(1, 6);
    std::uniform_int_distribution<Count> count_dist(0, 1000);
    std::uniform_int_distribution<int> zero_dist(0, 2);

    int checked = 0;
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const int m = m_dist(rng);
        const int s = s_dist(rng);
        CountCube cube;
        cube.grid_rows = 1;
        cube.grid_cols = m;
        cube.counts.resize(m, s);
        cube.total_pixels = CountVector::Constant(m, 1);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < s; ++j) {
                cube.counts(i, j) = zero_dist(rng) == 0 ? 0 : count_dist(rng);
            }
            cube.total_pixels[i] = std::max<Count>(cube.counts.row(i).sum(), 1);
        }
        if (cube.counts.sum() == 0) continue;

        const UnitSelection unit = UnitSelection::all_cells(cube);
        const OracleDiversity expected = oracle_diversity(cube, unit);
        const double a = alpha_diversity(cube, unit);
        const double g = gamma_diversity(cube, unit);
        worst = std::max({worst, std::abs(a - expected.alpha), std::abs(g - expected.gamma)});
        ++checked;
    }

    const bool pass = worst <= tolerance && checked > 0;
    std::cout << (pass ? "PASS" : "FAIL") << ": " << checked
              << " random cubes, max |engine - oracle| = " << format_double(worst)
              << " (tolerance " << format_double(tolerance) << ")\n";
    return pass ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-scale class diversity of categorical rasters"};
    app.require_subcommand(1);

    CommonConfig cfg;
    SynthConfig synth_cfg;
    std::string profile_source = "zone-mean";
    bool props_rasters = false;
    int oracle_trials = 1000;
    std::uint64_t oracle_seed = 20180101;
    double oracle_tolerance = 1e-12;

    CLI::App* grid = app.add_subcommand("grid", "Per-scale grid diversity products");
    add_input_options(grid, cfg);
    add_sweep_options(grid, cfg);
    add_out_option(grid, cfg);

    CLI::App* zonal = app.add_subcommand("zonal", "Zone diversity with border discard");
    add_input_options(zonal, cfg);
    add_sweep_options(zonal, cfg);
    add_out_option(zonal, cfg);
    add_zone_options(zonal, cfg, true);
    zonal->add_option("--covariates", cfg.covariates_path,
                      "Covariate CSV (region,value) joined against zone diversity");

    CLI::App* profile = app.add_subcommand("profile", "Cross-scale gamma profiles and quadrants");
    add_input_options(profile, cfg);
    add_sweep_options(profile, cfg);
    add_out_option(profile, cfg);
    add_zone_options(profile, cfg, false);
    profile->add_option("--profile-source", profile_source, "Per-scale gamma entering avg/std")
        ->check(CLI::IsMember({"zone-mean", "zone-level"}))
        ->capture_default_str();
    profile->add_option("--reference", cfg.reference_path,
                        "Reference profile CSV (scale,gamma); default: the whole domain");

    CLI::App* ecdf_cmd = app.add_subcommand("ecdf", "Cumulative distributions of alpha and gamma");
    add_input_options(ecdf_cmd, cfg);
    add_sweep_options(ecdf_cmd, cfg);
    add_out_option(ecdf_cmd, cfg);

    CLI::App* props = app.add_subcommand("props", "Class proportions per scale");
    add_input_options(props, cfg);
    add_sweep_options(props, cfg);
    add_out_option(props, cfg);
    props->add_flag("--write-rasters", props_rasters,
                    "Also write one proportion raster per class, scale and normalization");

    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic landscape raster");
    synth->add_option("--out", synth_cfg.out, "Output raster (.asc or .bin)")->required();
    synth->add_option("--generator", synth_cfg.generator, "Landscape generator")
        ->check(CLI::IsMember({"checkerboard", "patchwork", "uniform"}))
        ->capture_default_str();
    synth->add_option("--rows", synth_cfg.rows, "Base-cell rows")->check(CLI::PositiveNumber);
    synth->add_option("--cols", synth_cfg.cols, "Base-cell columns")->check(CLI::PositiveNumber);
    synth->add_option("--base-factor", synth_cfg.base_factor, "Pixels per base-cell edge")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth->add_option("--classes-count", synth_cfg.classes, "Number of classes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth->add_option("--seed", synth_cfg.seed, "Generator seed")->capture_default_str();
    synth->add_option("--patch-min", synth_cfg.patch_min, "Smallest patch edge, base cells")
        ->check(CLI::PositiveNumber);
    synth->add_option("--patch-max", synth_cfg.patch_max, "Largest patch edge, base cells")
        ->check(CLI::PositiveNumber);
    synth->add_option("--cropland-fraction", synth_cfg.cropland_fraction,
                      "Probability that a pixel is cropland")
        ->check(CLI::Range(0.0, 1.0));
    synth->add_option("--cell-size", synth_cfg.cell_size, "Meters per pixel")
        ->check(CLI::PositiveNumber);
    synth->add_option("--weights", synth_cfg.weights, "Per-class weights")->delimiter(',');

    CLI::App* oracle = app.add_subcommand("oracle-check",
                                          "Compare the engine against the brute-force oracle");
    oracle->add_option("--trials", oracle_trials, "Random cubes to test")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    oracle->add_option("--seed", oracle_seed, "RNG seed")->capture_default_str();
    oracle->add_option("--tolerance", oracle_tolerance, "Max |engine - oracle|")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
        if (grid->parsed()) return cmd_grid(cfg);
        if (zonal->parsed()) return cmd_zonal(cfg);
        if (profile->parsed()) return cmd_profile(cfg, profile_source);
        if (ecdf_cmd->parsed()) return cmd_ecdf(cfg);
        if (props->parsed()) return cmd_props(cfg, props_rasters);
        if (synth->parsed()) return cmd_synth(synth_cfg);
        if (oracle->parsed()) return cmd_oracle_check(oracle_trials, oracle_seed, oracle_tolerance);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const FormatError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const ComputeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
