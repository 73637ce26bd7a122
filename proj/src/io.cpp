#include "fracsearch/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#ifndef FRACSEARCH_VERSION
#define FRACSEARCH_VERSION "0.0.0"
#endif

namespace fracsearch::io {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

// Splits "a,b" into exactly two trimmed fields.
std::pair<std::string, std::string> split_two(const std::string& line, const fs::path& path,
                                              std::size_t lineno) {
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
        throw CsvError(path.string() + ":" + std::to_string(lineno) +
                       ": expected two comma-separated fields");
    return {trim(std::string_view(line).substr(0, comma)),
            trim(std::string_view(line).substr(comma + 1))};
}

template <typename T>
T parse_field(const std::string& field, const fs::path& path, std::size_t lineno) {
    T value{};
    const char* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end || field.empty())
        throw CsvError(path.string() + ":" + std::to_string(lineno) + ": cannot parse '" + field +
                       "'");
    return value;
}

template <typename Row>
void for_each_row(const fs::path& path, Row&& row) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        if (header) {
            split_two(line, path, lineno);
            header = false;
            continue;
        }
        const auto [a, b] = split_two(line, path, lineno);
        row(a, b, lineno);
    }
    if (header) throw CsvError(path.string() + ": missing header line");
}

} // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string series_csv(const TimeSeries& series, std::string_view value_name) {
    std::string out = "t,";
    out += value_name;
    out += '\n';
    for (std::size_t k = 0; k < series.size(); ++k) {
        out += std::to_string(series.time(k));
        out += ',';
        out += format_real(series.value(k));
        out += '\n';
    }
    return out;
}

TimeSeries read_series_csv(const fs::path& path) {
    TimeSeries series;
    std::int64_t previous = 0;
    for_each_row(path, [&](const std::string& a, const std::string& b, std::size_t lineno) {
        const auto t = parse_field<std::int64_t>(a, path, lineno);
        const auto v = parse_field<double>(b, path, lineno);
        if (!series.empty() && t <= previous)
            throw CsvError(path.string() + ":" + std::to_string(lineno) +
                           ": t is not strictly increasing");
        previous = t;
        series.push_back(t, v);
    });
    if (series.empty()) throw CsvError(path.string() + ": no data rows");
    try {
        series.validate();
    } catch (const DomainError& e) {
        throw CsvError(path.string() + ": " + e.what());
    }
    return series;
}

std::vector<std::pair<double, double>> read_xy_csv(const fs::path& path) {
    std::vector<std::pair<double, double>> points;
    for_each_row(path, [&](const std::string& a, const std::string& b, std::size_t lineno) {
        points.emplace_back(parse_field<double>(a, path, lineno),
                            parse_field<double>(b, path, lineno));
    });
    if (points.empty()) throw CsvError(path.string() + ": no data rows");
    return points;
}

std::string adjacency_csv(const CarpetLattice& lattice) {
    std::ostringstream out;
    out << "vertex,+x,-x,+y,-y\n";
    for (std::size_t v = 0; v < lattice.vertex_count(); ++v) {
        const auto& nb = lattice.neighbors(static_cast<VertexIndex>(v));
        out << v << ',' << nb[0] << ',' << nb[1] << ',' << nb[2] << ',' << nb[3] << '\n';
    }
    return out.str();
}

std::string distribution_csv(const CarpetLattice& lattice, const std::vector<double>& p) {
    if (p.size() != lattice.vertex_count())
        throw DomainError("distribution size does not match the lattice");
    std::string out = "i,j,P\n";
    for (std::size_t v = 0; v < p.size(); ++v) {
        const CellCoord c = lattice.coord_of(static_cast<VertexIndex>(v));
        out += std::to_string(c.i) + ',' + std::to_string(c.j) + ',' + format_real(p[v]) + '\n';
    }
    return out;
}

json lattice_summary(const CarpetLattice& lattice) {
    json hist = json::object();
    for (const auto& [deg, count] : lattice.degree_histogram()) hist[std::to_string(deg)] = count;
    const CellCoord m = lattice.coord_of(lattice.marked());
    return {{"stage", lattice.stage().level},
            {"side", lattice.stage().side()},
            {"N", lattice.vertex_count()},
            {"degree_histogram", hist},
            {"marked", {{"i", m.i}, {"j", m.j}, {"index", lattice.marked()}}}};
}

void ensure_writable(const std::vector<fs::path>& paths, bool force) {
    if (force) return;
    for (const auto& p : paths)
        if (fs::exists(p))
            throw OutputExists(p.string() + " already exists (pass --force to overwrite)");
}

void write_file(const fs::path& path, std::string_view content, bool force) {
    ensure_writable({path}, force);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DomainError("write to " + path.string() + " failed");
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    std::ostringstream hex;
    for (unsigned int k = 0; k < len; ++k)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
    return hex.str();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return sha256_hex(buf.str());
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json to_json(const Measured& m) {
    return {{"value", m.value}, {"error", m.error}, {"text", format_last_digit(m)}};
}

json to_json(const PeriodEstimate& e) {
    return {{"period_Q", e.period_q},
            {"dominant_frequency", e.dominant_frequency},
            {"spectral_power_ratio", e.spectral_power_ratio},
            {"peak_bin", e.peak_bin},
            {"sample_count", e.sample_count},
            {"harmonic_flag", e.harmonic_flag},
            {"harmonic_power_ratio", e.harmonic_power_ratio}};
}

json to_json(const PowerLawFit& f) {
    return {{"prefactor", f.prefactor},
            {"stderr_prefactor", f.stderr_prefactor},
            {"exponent", f.exponent},
            {"stderr_exponent", f.stderr_exponent},
            {"prefactor_text", format_last_digit(f.prefactor_measured())},
            {"exponent_text", format_last_digit(f.exponent_measured())},
            {"sample_count", f.sample_count},
            {"range", {f.range.x_min, f.range.x_max}}};
}

json to_json(const HypothesisReport& r) {
    json sigma = std::isfinite(r.discrepancy_sigma) ? json(r.discrepancy_sigma) : json(nullptr);
    return {{"lhs_c", to_json(r.lhs)}, {"rhs", to_json(r.rhs)}, {"discrepancy_sigma", sigma}};
}

json to_json(const InverseComparison& c) {
    json sigma = std::isfinite(c.discrepancy_sigma) ? json(c.discrepancy_sigma) : json(nullptr);
    return {{"one_over_ds", to_json(c.inverse_spectral)}, {"discrepancy_sigma", sigma}};
}

PowerLawFit fit_from_json(const json& j) {
    try {
        PowerLawFit f;
        f.prefactor = j.at("prefactor").get<double>();
        f.exponent = j.at("exponent").get<double>();
        f.stderr_exponent = j.value("stderr_exponent", 0.0);
        f.stderr_prefactor = j.value("stderr_prefactor", 0.0);
        f.sample_count = j.value("sample_count", std::size_t{0});
        if (j.contains("range")) f.range = {j["range"].at(0).get<double>(), j["range"].at(1).get<double>()};
        return f;
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed fit JSON: ") + e.what());
    }
}

RunManifest::RunManifest(std::string command, json config)
    : command_(std::move(command)), config_(std::move(config)), timestamp_(utc_timestamp()) {}

void RunManifest::add_output(const fs::path& path) { outputs_.push_back(path); }

json RunManifest::to_json(const fs::path& manifest_dir) const {
    json outputs = json::array();
    for (const auto& p : outputs_) {
        outputs.push_back({{"path", fs::relative(p, manifest_dir).generic_string()},
                           {"sha256", sha256_file(p)},
                           {"bytes", fs::file_size(p)}});
    }
    json j = {{"command", command_},
              {"config", config_},
              {"tool_version", tool_version()},
              {"timestamp", timestamp_},
              {"wall_time_s", wall_seconds_},
              {"outputs", outputs}};
    for (const auto& [key, value] : extra_.items()) j[key] = value;
    return j;
}

fs::path RunManifest::write(const fs::path& path, bool force) const {
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    write_file(path, to_json(dir).dump(2) + "\n", force);
    return path;
}

std::string tool_version() { return FRACSEARCH_VERSION; }

} // namespace fracsearch::io
