#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "robinquad/cli.hpp"
#include "robinquad/serialization.hpp"

using namespace robinquad;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) {
        std::vector<std::string> row;
        std::string cell;
        bool quoted = false;
        for (char ch : line) {
            if (ch == '"') quoted = !quoted;
            else if (ch == ',' && !quoted) {
                row.push_back(cell);
                cell.clear();
            } else cell += ch;
        }
        row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("grid parsing") {
    const auto g = cli::parse_grid("a1=-1:1:41");
    CHECK(g.name == "a1");
    CHECK(g.count == 41);
    CHECK(g.value(0) == -1.0);
    CHECK(g.value(20) == doctest::Approx(0.0));
    CHECK(g.value(40) == 1.0);
    CHECK(cli::parse_grid("alpha=-2:-2:1").value(0) == -2.0);
    for (const char* bad : {"a1", "b=0:1:3", "a1=0:1", "a1=0:1:0", "a1=x:1:2", "a1=0:1:2:3", "c=0:inf:2"})
        CHECK_THROWS(cli::parse_grid(bad));
}

TEST_CASE("solve-square") {
    const Result r = run_cli({"solve-square", "--alpha", "-1", "--S", "1"});
    REQUIRE(r.code == cli::kOk);
    const json j = json::parse(r.out);
    CHECK(j.at("schema_version") == kSchemaVersion);
    CHECK(j.at("defaults").at("mesh") == 64);
    const SquareSolution s = j.at("solution").get<SquareSolution>();
    CHECK(s.lambda1 == solve_square(-1.0, 1.0).lambda1);
}

TEST_CASE("solve-quad with both assemblies") {
    std::vector<std::string> base{"solve-quad", "--a1", "0.2", "--c", "1.1", "--S1", "0.8", "--alpha", "-1", "--mesh", "8"};
    const Result t = run_cli(base);
    base.insert(base.end(), {"--assembly", "direct"});
    const Result d = run_cli(base);
    REQUIRE(t.code == 0);
    REQUIRE(d.code == 0);
    const double lt = json::parse(t.out).at("lambda"), ld = json::parse(d.out).at("lambda");
    CHECK(lt == doctest::Approx(ld).epsilon(1e-11));
    CHECK(json::parse(t.out).at("params").get<QuadParams>() == QuadParams{0.2, 0, 1.1, 0.8, 1});
}

TEST_CASE("gradient and hessian commands") {
    const Result g = run_cli({"gradient", "--a1", "0.2", "--alpha", "-1", "--mesh", "8"});
    REQUIRE(g.code == 0);
    const json jg = json::parse(g.out);
    CHECK(jg.at("method") == "discrete_formula");
    const Result gf = run_cli({"gradient", "--a1", "0.2", "--alpha", "-1", "--mesh", "8", "--method", "fd"});
    REQUIRE(gf.code == 0);
    CHECK(jg.at("gradient").at("a1").get<double>() ==
          doctest::Approx(json::parse(gf.out).at("gradient").at("a1").get<double>()).epsilon(1e-5));
    CHECK(run_cli({"gradient", "--a1", "0.2", "--alpha", "-1", "--method", "closed"}).code == cli::kUsageError);

    const Result h = run_cli({"hessian", "--alpha", "-1", "--mesh", "8", "--method", "closed"});
    REQUIRE(h.code == 0);
    const SensitivityReport rep = json::parse(h.out).at("report").get<SensitivityReport>();
    CHECK(rep.hessian(0, 2) == 0.0);
    CHECK(rep.hessian_method[2][2] == Method::ClosedForm);
}

TEST_CASE("certify") {
    const Result r = run_cli({"certify", "--a1", "6", "--alpha", "-1", "--kind", "trial"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    REQUIRE(j.at("certificates").size() == 1);
    const Certificate c = j.at("certificates")[0].get<Certificate>();
    CHECK(c.verdict == Verdict::CertifiedLess);
    CHECK(j.at("any_certified") == true);
    const json all = json::parse(run_cli({"certify", "--a1", "0.5", "--alpha", "-0.5"}).out);
    CHECK(all.at("certificates").size() == 9);
    const json th = json::parse(run_cli({"certify", "--alpha", "-0.1", "--kind", "thresholds"}).out);
    CHECK(th.at("thresholds").get<Thresholds>().S_tilde.has_value());
    CHECK(run_cli({"certify", "--alpha", "-1", "--kind", "nope"}).code == cli::kUsageError);
}

TEST_CASE("sweep: csv rows in grid order with the maximum at the square") {
    const Result r = run_cli({"sweep", "--grid", "a1=-1:1:9", "--alpha", "-1", "--mesh", "8", "--format", "csv"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 10);
    CHECK(rows[0][0] == "index");
    CHECK(rows[0][8] == "lambda");
    int argmax = -1;
    double best = -1e300;
    for (int k = 1; k < 10; ++k) {
        CHECK(std::stoi(rows[k][0]) == k - 1);
        const double lam = std::stod(rows[k][8]);
        if (lam > best) {
            best = lam;
            argmax = k - 1;
        }
    }
    CHECK(argmax == 4);
    CHECK(std::stod(rows[5][1]) == 0.0);
}

TEST_CASE("sweep: json, two axes, invalid cells and threads") {
    setenv("ROBINQUAD_THREADS", "3", 1);
    const Result r = run_cli({"sweep", "--grid", "S1=0.5:2.5:3", "--grid", "alpha=-2:-1:2", "--mesh", "6"});
    unsetenv("ROBINQUAD_THREADS");
    // S1 = 2.5 lies outside (0, 2S)
    CHECK(r.code == cli::kNumericalError);
    const json j = json::parse(r.out);
    CHECK(j.at("threads") == 3);
    const auto& rows = j.at("rows");
    REQUIRE(rows.size() == 6);
    for (int k = 0; k < 6; ++k) CHECK(rows[k].at("index") == k);
    CHECK(rows[0].at("params").at("S1") == 0.5);
    CHECK(rows[0].at("alpha") == -2.0);
    CHECK(rows[1].at("alpha") == -1.0);
    CHECK(rows[4].at("status") == "domain");
    CHECK(rows[0].at("status") == "ok");

    // same result single-threaded
    const Result s = run_cli({"sweep", "--grid", "S1=0.5:2.5:3", "--grid", "alpha=-2:-1:2", "--mesh", "6"});
    const json js = json::parse(s.out);
    for (int k = 0; k < 4; ++k)
        if (rows[k].at("status") == "ok") CHECK(rows[k].at("lambda") == js.at("rows")[k].at("lambda"));
}

TEST_CASE("sweep validation") {
    CHECK(run_cli({"sweep", "--alpha", "-1"}).code == cli::kUsageError);
    CHECK(run_cli({"sweep", "--grid", "a1=0:1:2"}).code == cli::kUsageError);  // no alpha
    CHECK(run_cli({"sweep", "--grid", "a1=0:1:2000", "--grid", "a2=0:1:1000", "--alpha", "-1"}).code == cli::kUsageError);
    CHECK(run_cli({"sweep", "--grid", "a1=0:1:2", "--grid", "a1=0:1:2", "--alpha", "-1"}).code == cli::kUsageError);
    setenv("ROBINQUAD_THREADS", "zero", 1);
    CHECK(run_cli({"sweep", "--grid", "a1=0:1:2", "--alpha", "-1", "--mesh", "4"}).code == cli::kUsageError);
    unsetenv("ROBINQUAD_THREADS");
}

TEST_CASE("errors are machine readable") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"solve-square"},
             {"solve-square", "--alpha", "0"},
             {"solve-quad", "--alpha", "-1", "--mesh", "1"},
             {"solve-quad", "--alpha", "-1", "--c", "-1"},
             {"bogus"},
             {"solve-square", "--alpha", "-1", "--format", "xml"},
             {"solve-square", "--alpha", "-1", "--format", "csv"},
         }) {
        const Result r = run_cli(args);
        CHECK(r.code != 0);
        const json j = json::parse(r.out);
        CHECK(j.at("schema_version") == kSchemaVersion);
        CHECK(j.at("error").at("message").get<std::string>().size() > 0);
        CHECK_FALSE(r.err.empty());
    }
    CHECK(run_cli({}).code == cli::kUsageError);
    CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("verify-theorem1") {
    const Result r = run_cli({"verify-theorem1", "--alpha", "-1", "--mesh", "16"});
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j.at("passed") == true);
    CHECK(j.at("checks").at("gradient_max").get<double>() < 1e-6);
    const LocalMaxVerdict v = j.at("verdict").get<LocalMaxVerdict>();
    for (double mu : v.mu) CHECK(mu < 0.0);
    CHECK(run_cli({"verify-theorem1", "--alpha", "1", "--mesh", "8"}).code == cli::kUsageError);
}

TEST_CASE("verify-theorem2 and verify-theorem3") {
    const Result r = run_cli({"verify-theorem2", "--a1", "0.5", "--mesh", "8", "--points", "8", "--alpha-min", "-10"});
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j.at("rows").size() == 8);
    CHECK(j.at("small_alpha").at("label") == "empirical");
    CHECK(j.at("small_alpha").at("alpha1_estimate").is_number());
    CHECK(j.at("small_alpha").at("cross_check").at("confirmed") == true);
    const Result csv = run_cli({"verify-theorem2", "--a1", "0.5", "--mesh", "8", "--points", "4", "--format", "csv"});
    CHECK(parse_csv(csv.out).size() == 5);
    CHECK(run_cli({"verify-theorem2", "--mesh", "8"}).code == cli::kUsageError);

    const Result t = run_cli({"verify-theorem3", "--alpha", "-1", "--samples", "30", "--seed", "3"});
    CHECK(t.code == 0);
    const json k = json::parse(t.out);
    CHECK(k.at("samples_tested") == 30);
    CHECK(k.at("threshold_fired") == 30);
}

TEST_CASE("output file") {
    const std::string path = "cli_output_test.json";
    const Result r = run_cli({"solve-square", "--alpha", "-2", "--output", path});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    const json j = json::parse(f);
    CHECK(j.at("solution").at("alpha") == -2.0);
    std::remove(path.c_str());
}
