#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "fracsearch/io.hpp"
#include "temp_dir.hpp"

using namespace fracsearch;
using namespace fracsearch::io;
using testing_support::TempDir;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void put(const fs::path& p, const std::string& text) { write_file(p, text, true); }

std::string csv_error(const fs::path& p) {
    try {
        read_series_csv(p);
    } catch (const CsvError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("series CSV layout") {
    const TimeSeries s = TimeSeries::uniform(0, 1, {0.125, 0.5});
    CHECK(series_csv(s) == "t,P\n0,0.125\n1,0.5\n");
    CHECK(series_csv(s, "P_c").rfind("t,P_c\n", 0) == 0);
}

TEST_CASE("series CSV round trip is bit-exact") {
    TempDir dir;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(1 + rng() % 200);
        for (double& x : v) x = u(rng) * std::pow(10.0, -static_cast<double>(rng() % 12));
        const TimeSeries s = TimeSeries::uniform(static_cast<std::int64_t>(rng() % 5),
                                                 1 + static_cast<std::int64_t>(rng() % 4), v);
        put(dir / "s.csv", series_csv(s));
        REQUIRE(read_series_csv(dir / "s.csv") == s);
    }
}

TEST_CASE("malformed CSV is reported with its line") {
    TempDir dir;
    const fs::path p = dir / "bad.csv";

    put(p, "t,P\n0,0.1\n1,abc\n");
    CHECK(csv_error(p).find("bad.csv:3") != std::string::npos);

    put(p, "t,P\n0,0.1\n1,0.2,0.3\n");
    CHECK(csv_error(p).find(":3") != std::string::npos);

    put(p, "t,P\n0,0.1\n0,0.2\n");
    CHECK(csv_error(p).find("strictly increasing") != std::string::npos);

    put(p, "t,P\n0,0.1\n1,0.2\n3,0.3\n");
    CHECK(csv_error(p).find("non-uniform") != std::string::npos);

    put(p, "t,P\n");
    CHECK(csv_error(p).find("no data") != std::string::npos);

    put(p, "");
    CHECK(csv_error(p).find("header") != std::string::npos);

    CHECK_FALSE(csv_error(dir / "missing.csv").empty());
    CHECK_THROWS_AS(read_series_csv(p), DomainError);
}

TEST_CASE("xy CSV") {
    TempDir dir;
    put(dir / "xy.csv", "N,Q\n8,12.5\n64, 40.25 \n\n");
    const auto pts = read_xy_csv(dir / "xy.csv");
    REQUIRE(pts.size() == 2);
    CHECK(pts[1] == std::pair<double, double>{64.0, 40.25});
}

TEST_CASE("write_file refuses to overwrite without force") {
    TempDir dir;
    const fs::path p = dir / "sub" / "out.txt";
    write_file(p, "one", false);
    CHECK(slurp(p) == "one");
    CHECK_THROWS_AS(write_file(p, "two", false), OutputExists);
    CHECK(slurp(p) == "one");
    write_file(p, "two", true);
    CHECK(slurp(p) == "two");
    CHECK_THROWS_AS(ensure_writable({dir / "x", p}, false), OutputExists);
    CHECK_NOTHROW(ensure_writable({dir / "x"}, false));
}

TEST_CASE("SHA-256 known vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    TempDir dir;
    put(dir / "abc", "abc");
    CHECK(sha256_file(dir / "abc") == sha256_hex("abc"));
}

TEST_CASE("adjacency and distribution CSV") {
    const auto lat = CarpetLattice::build(Stage{1});
    const std::string adj = adjacency_csv(lat);
    CHECK(adj.rfind("vertex,+x,-x,+y,-y\n0,1,0,3,0\n", 0) == 0);
    CHECK(std::count(adj.begin(), adj.end(), '\n') == 9);

    const std::string dist = distribution_csv(lat, std::vector<double>(8, 0.125));
    CHECK(dist.rfind("i,j,P\n0,0,0.125\n1,0,0.125\n", 0) == 0);
    CHECK_THROWS_AS(distribution_csv(lat, {1.0}), DomainError);
}

TEST_CASE("lattice summary") {
    const json j = lattice_summary(CarpetLattice::build(Stage{2}));
    CHECK(j["N"] == 64);
    CHECK(j["side"] == 9);
    CHECK(j["marked"]["i"] == 2);
    CHECK(j["marked"]["j"] == 2);
    std::size_t total = 0;
    for (const auto& [deg, count] : j["degree_histogram"].items()) total += count.get<std::size_t>();
    CHECK(total == 64);
}

TEST_CASE("fit JSON round trip") {
    PowerLawFit f;
    f.prefactor = 3.79;
    f.stderr_prefactor = 0.04;
    f.exponent = 0.5647;
    f.stderr_exponent = 0.0006;
    f.sample_count = 5;
    f.range = {8, 32768};
    const json j = to_json(f);
    CHECK(j["exponent_text"] == "0.5647(6)");
    const PowerLawFit g = fit_from_json(j);
    CHECK(g.exponent == f.exponent);
    CHECK(g.stderr_exponent == f.stderr_exponent);
    CHECK(g.range.x_max == 32768);
    CHECK_THROWS_AS(fit_from_json(json{{"exponent", 1.0}}), DomainError);
}

TEST_CASE("infinite sigma serializes as null") {
    HypothesisReport r;
    r.discrepancy_sigma = std::numeric_limits<double>::infinity();
    CHECK(to_json(r)["discrepancy_sigma"].is_null());
}

TEST_CASE("run manifest") {
    TempDir dir;
    put(dir / "data" / "a.csv", "t,P\n0,1\n");
    RunManifest m("search", json{{"stage", 1}});
    m.add_output(dir / "data" / "a.csv");
    m.set_extra("period", json{{"period_Q", 12.0}});
    m.set_wall_time(std::chrono::duration<double>(1.5));
    const fs::path path = m.write(dir / "data" / "manifest.json", false);

    const json j = json::parse(slurp(path));
    CHECK(j["command"] == "search");
    CHECK(j["config"]["stage"] == 1);
    CHECK(j["tool_version"] == tool_version());
    CHECK(j["wall_time_s"] == 1.5);
    CHECK(j["period"]["period_Q"] == 12.0);
    REQUIRE(j["outputs"].size() == 1);
    CHECK(j["outputs"][0]["path"] == "a.csv");
    CHECK(j["outputs"][0]["bytes"] == 8);
    CHECK(j["outputs"][0]["sha256"] == sha256_hex("t,P\n0,1\n"));
    const std::string ts = j["timestamp"];
    CHECK(ts.size() == 20);
    CHECK(ts.back() == 'Z');
    CHECK_THROWS_AS(m.write(path, false), OutputExists);
}
