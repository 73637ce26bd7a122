#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "fracsearch/io.hpp"
#include "temp_dir.hpp"

using nlohmann::json;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(FRACSEARCH_CLI) + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("lattice") {
    const Result s1 = run("lattice --stage 1");
    REQUIRE(s1.code == 0);
    const json j = json::parse(s1.out);
    CHECK(j["N"] == 8);
    CHECK(j["degree_histogram"]["2"] == 8);

    const Result s0 = run("lattice --stage 0");
    REQUIRE(s0.code == 0);
    CHECK(json::parse(s0.out)["N"] == 1);

    CHECK(run("lattice --stage 2 --marked 4,4").code == 2);
    CHECK(run("lattice --stage 2 --marked nope").code == 2);
    CHECK(run("lattice").code == 2);
    CHECK(run("bogus").code == 2);

    const Result csv = run("lattice --stage 1 --format csv");
    CHECK(lines(csv.out).size() == 9);
    CHECK(lines(csv.out)[0] == "vertex,+x,-x,+y,-y");
}

TEST_CASE("lattice output directory") {
    TempDir dir;
    const std::string out = (dir / "lat").string();
    REQUIRE(run("lattice --stage 2 --format csv --out " + out).code == 0);
    CHECK(fs::exists(dir / "lat" / "adjacency.csv"));
    const json m = json::parse(slurp(dir / "lat" / "lattice_manifest.json"));
    CHECK(m["outputs"].size() == 2);
    CHECK(run("lattice --stage 2 --out " + out).code == 2);
}

TEST_CASE("search output is deterministic and guarded") {
    TempDir dir;
    const std::string out = (dir / "s1").string();
    REQUIRE(run("search --stage 1 --steps 512 --quiet --out " + out).code == 0);
    const std::string first = slurp(dir / "s1" / "search.csv");
    const auto rows = lines(first);
    REQUIRE(rows.size() == 514);
    CHECK(rows[0] == "t,P");
    CHECK(rows[1].rfind("0,", 0) == 0);
    CHECK(std::stod(rows[1].substr(2)) == doctest::Approx(0.125).epsilon(1e-15));

    CHECK(run("search --stage 1 --steps 512 --quiet --out " + out).code == 2);
    REQUIRE(run("search --stage 1 --steps 512 --quiet --force --threads 1 --out " + out).code == 0);
    CHECK(slurp(dir / "s1" / "search.csv") == first);

    const json m = json::parse(slurp(dir / "s1" / "search_manifest.json"));
    CHECK(m["outputs"][0]["sha256"] == fracsearch::io::sha256_hex(first));
    CHECK(m["config"]["marked"]["i"] == 0);
}

TEST_CASE("search refuses oversized stages and bad arguments") {
    TempDir dir;
    CHECK(run("search --stage 9 --quiet --mem-limit-mb 4096 --out " + (dir / "s9").string()).code == 4);
    CHECK_FALSE(fs::exists(dir / "s9" / "search.csv"));
    CHECK(run("search --stage 1 --steps 0 --quiet --out " + (dir / "x").string()).code == 2);
    CHECK(run("search --stage 1 --steps -4 --quiet --out " + (dir / "x").string()).code == 2);
    CHECK(run("search --stage 1 --marked 1,1 --quiet --out " + (dir / "x").string()).code == 2);
}

TEST_CASE("classical exact series") {
    TempDir dir;
    REQUIRE(run("classical --stage 1 --steps 1 --out " + dir.path().string()).code == 0);
    const auto rows = lines(slurp(dir / "classical.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[1] == "0,1");
    CHECK(rows[2] == "1,0.5");
}

TEST_CASE("classical Monte Carlo is reproducible") {
    TempDir dir;
    const std::string args = "classical --stage 3 --steps 200 --method mc --walkers 20000 --seed 9 --out ";
    REQUIRE(run(args + (dir / "a").string()).code == 0);
    REQUIRE(run(args + (dir / "b").string() + " --threads 1").code == 0);
    CHECK(slurp(dir / "a" / "classical.csv") == slurp(dir / "b" / "classical.csv"));
    CHECK(run("classical --stage 3 --steps 10 --method magic --out " + (dir / "c").string()).code == 2);
}

TEST_CASE("period and fit") {
    TempDir dir;
    const std::string csv = (dir / "s.csv").string();
    REQUIRE(run("search --stage 2 --steps 2048 --quiet --out " + dir.path().string()).code == 0);
    const Result p = run("period --input " + (dir / "search.csv").string());
    REQUIRE(p.code == 0);
    const json pj = json::parse(p.out);
    CHECK(pj["period"]["period_Q"].get<double>() > 10.0);
    CHECK(pj["mean_peak_probability"].get<double>() > 1.0 / 64.0);

    {
        std::ofstream f(csv);
        f << "t,P\n";
        for (int t = 0; t < 200; ++t) f << t << ",0.25\n";
    }
    CHECK(run("period --input " + csv).code == 2);
    std::ofstream(csv) << "t,P\n0,0.1\n1,what\n";
    CHECK(run("period --input " + csv).code == 2);
    CHECK(run("period --input " + (dir / "missing.csv").string()).code == 2);

    {
        std::ofstream f(csv);
        f << "t,P\n";
        for (int t = 1; t <= 1000; ++t) f << t << "," << 2.0 * std::pow(t, -0.9) << "\n";
    }
    const Result f = run("fit --spectral --input " + csv);
    REQUIRE(f.code == 0);
    const json fj = json::parse(f.out);
    CHECK(fj["spectral_dimension"]["value"].get<double>() == doctest::Approx(1.8));
    CHECK(fj["window"][1] == 500.0);
}

TEST_CASE("hypothesis") {
    const Result carpet = run("hypothesis --b '0.5647(6)' --a '0.154(2)' --ds '1.742(8)'");
    REQUIRE(carpet.code == 0);
    const json c = json::parse(carpet.out);
    CHECK(std::abs(c["hypothesis"]["lhs_c"]["value"].get<double>() - 0.641) <= 0.001);
    CHECK(c["hypothesis"]["rhs"]["value"].get<double>() == doctest::Approx(0.6347892607143719));
    CHECK(c["inverse_spectral"]["one_over_ds"]["text"] == "0.574(3)");

    const Result gasket = run("hypothesis --b 0.5 --a 0.1 --gasket-ds --M 3 --s 2");
    REQUIRE(gasket.code == 0);
    CHECK(std::abs(json::parse(gasket.out)["hypothesis"]["rhs"]["value"].get<double>() - 0.95017) < 5e-5);

    CHECK(run("hypothesis --b 0.5 --a 0.1").code == 2);
    CHECK(run("hypothesis --b x --a 0.1 --ds 1").code == 2);
}

TEST_CASE("pipeline") {
    TempDir dir;
    const Result r = run("pipeline --stages 1-3 --classical-stage 3 --classical-steps 400 --window 10:200 "
                         "--p-fit-stages 2 --out " + dir.path().string());
    REQUIRE(r.code == 0);
    const json s = json::parse(slurp(dir / "summary.json"));
    CHECK(s["status"] == "ok");
    CHECK(s["stages"].size() == 3);
    CHECK(run("pipeline --stages 3 --out " + (dir / "x").string()).code == 2);
    CHECK(run("pipeline --stages 1-2 --no-classical --out " + dir.path().string()).code == 2);
}
