#include <doctest.h>

#include <stdexcept>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rjmix/draws_io.hpp"
#include "rjmix/grouped_data.hpp"
#include "rjmix/rjmcmc.hpp"
#include "rjmix/rng.hpp"
#include "rjmix/simulate.hpp"

using namespace rjmix;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(RJMIX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

void write_sim1_spec(const fs::path& path, long long n = 2000) {
    std::ofstream out(path);
    out << "{\"family\":\"mln\",\"weights\":[0.2,0.5,0.3],\"mus\":[2.0,3.0,4.0],"
        << "\"sigma2s\":[0.3,0.1,0.2],\"n\":" << n << ",\"K\":10}";
}

}  // namespace

TEST_CASE("draws CSV round trip is bit exact") {
    Rng rng(19);
    MixtureParams dgp;
    dgp.weights = {0.4, 0.6};
    dgp.mus = {1.0, 2.0};
    dgp.sigma2s = {0.2, 0.3};
    const auto sim = simulate_grouped(dgp, 300, 5, rng);
    RunConfig run;
    run.iterations = 300;
    run.burn_in = 50;
    run.thin = 5;
    run.seed = 7;
    const Draws draws = run_chain(sim.grouped, PriorConfig{}, run);

    TempDir dir("rjmix_io_test");
    const std::string path = dir.str() + "/draws.csv";
    write_draws_csv(draws, path);
    const Draws back = read_draws_csv(path);
    REQUIRE(back.records.size() == draws.records.size());
    for (std::size_t i = 0; i < draws.records.size(); ++i) {
        CHECK(back.records[i].iteration == draws.records[i].iteration);
        CHECK(back.records[i].r == draws.records[i].r);
        CHECK(back.records[i].weights == draws.records[i].weights);
        CHECK(back.records[i].mus == draws.records[i].mus);
        CHECK(back.records[i].sigma2s == draws.records[i].sigma2s);
        CHECK(back.records[i].log_lik == draws.records[i].log_lik);
    }
    CHECK(peek_draws_model(path) == "mln");
}

TEST_CASE("gb2 draws CSV round trip") {
    Gb2Draws draws;
    for (int i = 0; i < 5; ++i) {
        Gb2DrawRecord rec;
        rec.iteration = i + 1;
        rec.params = Gb2Params{1.1 + i, 10.0 / (i + 1), 2.5, 1.5};
        rec.log_lik = -3.7 * i;
        draws.records.push_back(rec);
    }
    TempDir dir("rjmix_io_gb2");
    const std::string path = dir.str() + "/draws_gb2.csv";
    write_gb2_draws_csv(draws, path);
    const Gb2Draws back = read_gb2_draws_csv(path);
    REQUIRE(back.records.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(back.records[i].params.a == draws.records[i].params.a);
        CHECK(back.records[i].params.b == draws.records[i].params.b);
        CHECK(back.records[i].log_lik == draws.records[i].log_lik);
    }
    CHECK(peek_draws_model(path) == "gb2");
    CHECK_THROWS_AS(read_draws_csv(path), std::invalid_argument);
}

TEST_CASE("cli: simulate is byte-identical across runs with one seed") {
    TempDir dir("rjmix_cli_sim");
    write_sim1_spec(dir.path / "spec.json");
    const std::string spec = (dir.path / "spec.json").string();
    REQUIRE(run_cli("simulate --spec " + spec + " --out " + dir.str() + "/a --seed 5 --keep-raw") ==
            0);
    REQUIRE(run_cli("simulate --spec " + spec + " --out " + dir.str() + "/b --seed 5 --keep-raw") ==
            0);
    CHECK(slurp(dir.path / "a/grouped.csv") == slurp(dir.path / "b/grouped.csv"));
    CHECK(slurp(dir.path / "a/raw.csv") == slurp(dir.path / "b/raw.csv"));
    REQUIRE(run_cli("simulate --spec " + spec + " --out " + dir.str() + "/c --seed 6") == 0);
    CHECK(slurp(dir.path / "a/grouped.csv") != slurp(dir.path / "c/grouped.csv"));
    // Generated file parses and respects the fixed-frequency design.
    const GroupedData data = read_grouped_csv((dir.path / "a/grouped.csv").string());
    CHECK(data.groups() == 10);
    CHECK(data.total() == 2000);
}

TEST_CASE("cli: malformed spec and missing files exit with code 2") {
    TempDir dir("rjmix_cli_err");
    std::ofstream(dir.path / "bad.json") << "{\"family\":\"mln\"";
    CHECK(run_cli("simulate --spec " + (dir.path / "bad.json").string() + " --out " + dir.str()) ==
          2);
    CHECK(run_cli("fit --data " + dir.str() + "/missing.csv --out " + dir.str()) == 2);
    CHECK(run_cli("fit --iterations 10") == 2);  // missing required option
}

TEST_CASE("cli: fit + report round trip") {
    TempDir dir("rjmix_cli_fit");
    write_sim1_spec(dir.path / "spec.json");
    REQUIRE(run_cli("simulate --spec " + (dir.path / "spec.json").string() + " --out " +
                    dir.str() + " --seed 4") == 0);
    const std::string data = dir.str() + "/grouped.csv";

    SUBCASE("zero iterations is a config error") {
        CHECK(run_cli("fit --data " + data + " --iterations 0 --out " + dir.str()) == 2);
    }

    SUBCASE("two chains produce distinct reproducible draws") {
        REQUIRE(run_cli("fit --data " + data +
                        " --iterations 600 --burn-in 100 --thin 10 --seed 7 --chains 2 --out " +
                        dir.str() + "/fit") == 0);
        REQUIRE(fs::exists(dir.path / "fit/draws_1.csv"));
        REQUIRE(fs::exists(dir.path / "fit/draws_2.csv"));
        REQUIRE(fs::exists(dir.path / "fit/draws_1.json"));
        CHECK(slurp(dir.path / "fit/draws_1.csv") != slurp(dir.path / "fit/draws_2.csv"));
        REQUIRE(run_cli("fit --data " + data +
                        " --iterations 600 --burn-in 100 --thin 10 --seed 7 --chains 2 --out " +
                        dir.str() + "/fit2") == 0);
        CHECK(slurp(dir.path / "fit/draws_1.csv") == slurp(dir.path / "fit2/draws_1.csv"));
        CHECK(slurp(dir.path / "fit/draws_2.csv") == slurp(dir.path / "fit2/draws_2.csv"));

        // Report over both chains.
        REQUIRE(run_cli("report --draws " + dir.str() + "/fit/draws_1.csv --draws " + dir.str() +
                        "/fit/draws_2.csv --data " + data + " --out " + dir.str() + "/report") ==
                0);
        CHECK(fs::exists(dir.path / "report/summary.json"));
        CHECK(fs::exists(dir.path / "report/predictive.csv"));
        CHECK(fs::exists(dir.path / "report/r_posterior.csv"));
        CHECK(fs::exists(dir.path / "report/gini_draws.csv"));

        // Conditioning on an unvisited R is an input error.
        CHECK(run_cli("report --draws " + dir.str() + "/fit/draws_1.csv --data " + data +
                      " --condition-r 49 --out " + dir.str() + "/report49") == 2);

        // A different dataset fails the hash check.
        REQUIRE(run_cli("simulate --spec " + (dir.path / "spec.json").string() + " --out " +
                        dir.str() + "/other --seed 99") == 0);
        CHECK(run_cli("report --draws " + dir.str() + "/fit/draws_1.csv --data " + dir.str() +
                      "/other/grouped.csv --out " + dir.str() + "/badreport") == 2);
    }
}

TEST_CASE("cli: fit-gb2 writes draws and metadata") {
    TempDir dir("rjmix_cli_gb2");
    std::ofstream(dir.path / "spec.json")
        << "{\"family\":\"gb2\",\"a\":2.0,\"b\":10.0,\"p\":2.5,\"q\":1.5,\"n\":2000,\"K\":10}";
    REQUIRE(run_cli("simulate --spec " + (dir.path / "spec.json").string() + " --out " +
                    dir.str() + " --seed 4") == 0);
    const std::string data = dir.str() + "/grouped.csv";
    REQUIRE(run_cli("fit-gb2 --data " + data +
                    " --iterations 2000 --burn-in 500 --thin 10 --seed 9 --out " + dir.str() +
                    "/fit") == 0);
    REQUIRE(fs::exists(dir.path / "fit/draws_gb2_1.csv"));
    REQUIRE(fs::exists(dir.path / "fit/draws_gb2_1.json"));
    CHECK(peek_draws_model((dir.path / "fit/draws_gb2_1.csv").string()) == "gb2");

    REQUIRE(run_cli("report --draws " + dir.str() + "/fit/draws_gb2_1.csv --data " + data +
                    " --out " + dir.str() + "/report") == 0);
    CHECK(fs::exists(dir.path / "report/summary.json"));
    // Conditioning does not apply to the GB2 chain.
    CHECK(run_cli("report --draws " + dir.str() + "/fit/draws_gb2_1.csv --data " + data +
                  " --condition-r 2 --out " + dir.str() + "/bad") == 2);
}
