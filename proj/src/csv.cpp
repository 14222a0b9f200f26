#include "cropdiv/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include "cropdiv/errors.hpp"

namespace cropdiv {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& value) {
    return value ? format_double(*value) : std::string{};
}

namespace {

std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && (s[start] == ' ' || s[start] == '\t')) ++start;
    return s.substr(start);
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

// Splits on the first comma only; the tail may contain further commas.
std::pair<std::string, std::string> split_first(const std::string& line,
                                                const std::string& context) {
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
        throw FormatError(context + ": expected two comma-separated fields");
    }
    return {strip(line.substr(0, comma)), strip(line.substr(comma + 1))};
}

double parse_double_field(const std::string& s, const std::string& context) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError(context + ": expected a number, got '" + s + "'");
    }
    return value;
}

long long parse_int_field(const std::string& s, const std::string& context) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError(context + ": expected an integer, got '" + s + "'");
    }
    return value;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    return in;
}

std::string expect_header(std::ifstream& in, const std::filesystem::path& path,
                          const std::string& expected) {
    std::string header;
    if (!std::getline(in, header)) {
        throw FormatError(path.string() + ": empty file, expected header '" + expected + "'");
    }
    std::string normalized = strip(header);
    std::transform(normalized.begin(), normalized.end(), normalized.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    normalized.erase(std::remove(normalized.begin(), normalized.end(), ' '), normalized.end());
    if (normalized != expected) {
        throw FormatError(path.string() + ": expected header '" + expected + "', got '" +
                          strip(header) + "'");
    }
    return header;
}

} // namespace

ClassScheme read_class_scheme_csv(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    expect_header(in, path, "code,label");
    std::vector<std::pair<ClassCode, std::string>> classes;
    std::string line;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip(line);
        if (line.empty()) continue;
        const std::string ctx = path.string() + ": line " + std::to_string(line_no);
        auto [code_str, label] = split_first(line, ctx);
        const long long code = parse_int_field(code_str, ctx);
        if (code < 0 || code > 65535) {
            throw FormatError(ctx + ": class code outside the 16-bit unsigned range");
        }
        classes.emplace_back(static_cast<ClassCode>(code), unquote(label));
    }
    if (classes.empty()) {
        throw FormatError(path.string() + ": class scheme has no classes");
    }
    return ClassScheme(std::move(classes));
}

std::vector<std::pair<std::string, double>> read_covariates_csv(
    const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    expect_header(in, path, "region,value");
    std::vector<std::pair<std::string, double>> rows;
    std::set<std::string> seen;
    std::string line;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip(line);
        if (line.empty()) continue;
        const std::string ctx = path.string() + ": line " + std::to_string(line_no);
        auto [region, value_str] = split_first(line, ctx);
        region = unquote(region);
        if (!seen.insert(region).second) {
            throw FormatError(ctx + ": duplicate region key '" + region + "'");
        }
        rows.emplace_back(region, parse_double_field(value_str, ctx));
    }
    return rows;
}

std::map<int, double> read_reference_csv(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    expect_header(in, path, "scale,gamma");
    std::map<int, double> profile;
    std::string line;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip(line);
        if (line.empty()) continue;
        const std::string ctx = path.string() + ": line " + std::to_string(line_no);
        auto [scale_str, gamma_str] = split_first(line, ctx);
        const long long scale = parse_int_field(scale_str, ctx);
        if (scale < 1) {
            throw FormatError(ctx + ": scale factor must be >= 1");
        }
        if (!profile.emplace(static_cast<int>(scale), parse_double_field(gamma_str, ctx)).second) {
            throw FormatError(ctx + ": duplicate scale " + std::to_string(scale));
        }
    }
    if (profile.empty()) {
        throw FormatError(path.string() + ": reference profile has no rows");
    }
    return profile;
}

} // namespace cropdiv
