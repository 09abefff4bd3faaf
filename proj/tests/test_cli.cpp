#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "csl/cli/config.hpp"
#include "csl/cli/studies.hpp"
#include "csl/cli/writers.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

// The subprocess cases need SIM_BIN (the built binary) and CONFIG_DIR
// (the shipped scenario configs); ctest provides both.

namespace {

namespace cli = csl::cli;
using njson = nlohmann::ordered_json;

struct CmdResult {
    int exit_code;
    std::string out;
};

CmdResult run_cmd(const std::string& cmd) {
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string sim_bin() {
    const char* v = std::getenv("SIM_BIN");
    return v ? v : "";
}

std::string config_dir() {
    const char* v = std::getenv("CONFIG_DIR");
    return v ? v : "";
}

std::string scratch_dir() {
    static int counter = 0;
    std::string dir = "cli_scratch_" + std::to_string(getpid()) + "_" + std::to_string(counter++);
    std::remove(dir.c_str());
    return dir;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << body;
}

njson shipped_config(const std::string& name) {
    return njson::parse(read_file(config_dir() + "/" + name));
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("value formatting round-trips and flags non-finite input") {
    CHECK(cli::format_value(0.1) == "0.10000000000000001");
    CHECK(cli::format_value(1.0) == "1");
    CHECK(cli::format_value(-std::numeric_limits<double>::infinity()) == "-INF");
    CHECK_THROWS_AS(cli::format_value(std::numeric_limits<double>::quiet_NaN()),
                    cli::NonFiniteValue);
    CHECK_THROWS_AS(cli::format_value(std::numeric_limits<double>::infinity()),
                    cli::NonFiniteValue);

    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 200; ++i) {
        const double v = u(testutil::rng()) * std::pow(10.0, i % 7 - 3);
        CHECK(std::stod(cli::format_value(v)) == v);
    }
}

TEST_CASE("csv rendering") {
    cli::Table tb;
    tb.columns = {"a", "b"};
    tb.rows = {{1.5, -std::numeric_limits<double>::infinity()}, {0.25, 2.0}};
    cli::HeaderLines header{{"schema_version", "1"}, {"study", "demo"}};
    const std::string text = cli::csv_text(tb, header);
    CHECK(text.find("# schema_version = 1\n") == 0);
    CHECK(text.find("# study = demo\n") != std::string::npos);
    CHECK(text.find("a,b\n") != std::string::npos);
    CHECK(text.find("1.5,-INF\n") != std::string::npos);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.back() == '\n');

    tb.rows.push_back({1.0});
    CHECK_THROWS_AS(cli::csv_text(tb, header), cli::IoError);
    CHECK_THROWS_AS(cli::write_text_file("no_such_dir_xyz/file.csv", "x"), cli::IoError);
}

TEST_CASE("study names round-trip") {
    using cli::Study;
    for (Study s : {Study::decoherence, Study::production, Study::kernel, Study::field_exponent,
                    Study::oracle_check}) {
        auto back = cli::study_from_name(cli::study_name(s));
        REQUIRE(back.has_value());
        CHECK(*back == s);
    }
    CHECK_FALSE(cli::study_from_name("bogus").has_value());
}

TEST_CASE("thread resolution order") {
    unsetenv("SIM_THREADS");
    CHECK(cli::resolve_threads(3) == 3);
    CHECK(cli::resolve_threads(0) == 1);
    setenv("SIM_THREADS", "7", 1);
    CHECK(cli::resolve_threads(0) == 7);
    CHECK(cli::resolve_threads(2) == 2);  // explicit option wins
    setenv("SIM_THREADS", "abc", 1);
    CHECK(cli::resolve_threads(0) == 1);
    unsetenv("SIM_THREADS");
}

TEST_CASE("config checking collects violations and warnings") {
    REQUIRE(!config_dir().empty());
    cli::ScenarioConfig cfg;
    const auto rep = cli::check_config(config_dir() + "/decoherence.json", &cfg);
    CHECK(rep.ok());
    CHECK(cfg.model.lambda == doctest::Approx(0.5));
    CHECK(cfg.clumps.separation() == doctest::Approx(5.0));
    CHECK(cfg.study == cli::Study::decoherence);

    auto broken = shipped_config("decoherence.json");
    broken["model"].erase("lambda");
    broken["model"]["typo_key"] = 1.0;
    const std::string path = scratch_dir() + ".json";
    write_file(path, broken.dump());
    const auto bad = cli::check_config(path);
    CHECK_FALSE(bad.ok());
    bool saw_missing = false, saw_unknown = false;
    for (const auto& e : bad.errors) {
        saw_missing = saw_missing || e.find("model.lambda") != std::string::npos;
        saw_unknown = saw_unknown || (e.find("typo_key") != std::string::npos &&
                                      e.find("unknown key") != std::string::npos);
    }
    CHECK(saw_missing);
    CHECK(saw_unknown);
    CHECK_THROWS_AS(cli::load_config(path), cli::ConfigError);
    std::remove(path.c_str());

    auto narrow = shipped_config("decoherence.json");
    narrow["clumps"]["sigma"] = 0.5;  // inside the Compton scale
    const std::string npath = scratch_dir() + ".json";
    write_file(npath, narrow.dump());
    const auto warned = cli::check_config(npath);
    CHECK(warned.ok());
    REQUIRE(!warned.warnings.empty());
    CHECK(warned.warnings.front().find("sigma*m") != std::string::npos);
    std::remove(npath.c_str());
}

TEST_CASE("config echo is flat, ordered and precise") {
    const auto cfg = cli::load_config(config_dir() + "/decoherence.json");
    const auto kv = cli::config_echo_flat(cfg);
    REQUIRE(kv.size() > 10);
    CHECK(kv.front().first == "config.model.mass");
    CHECK(kv.front().second == "1");
    CHECK(kv.back().first == "config.output.formats");
    CHECK(kv.back().second == "csv,json");
    bool saw_study = false;
    for (const auto& [k, v] : kv)
        if (k == "config.study") {
            saw_study = true;
            CHECK(v == "decoherence");
        }
    CHECK(saw_study);
}

TEST_CASE("validate subcommand") {
    REQUIRE(!sim_bin().empty());
    const auto ok = run_cmd(sim_bin() + " validate --config " + config_dir() + "/kernel.json");
    CHECK(ok.exit_code == 0);
    const auto rep = njson::parse(ok.out);
    CHECK(rep["valid"].get<bool>());
    CHECK(rep["errors"].empty());

    auto broken = shipped_config("decoherence.json");
    broken["model"].erase("lambda");
    const std::string path = scratch_dir() + ".json";
    write_file(path, broken.dump());
    const auto bad = run_cmd(sim_bin() + " validate --config " + path);
    CHECK(bad.exit_code == 2);
    const auto brep = njson::parse(bad.out);
    CHECK_FALSE(brep["valid"].get<bool>());
    bool saw = false;
    for (const auto& e : brep["errors"]) saw = saw || e.get<std::string>().find("model.lambda") != std::string::npos;
    CHECK(saw);
    std::remove(path.c_str());

    const auto missing = run_cmd(sim_bin() + " validate --config does_not_exist.json");
    CHECK(missing.exit_code == 2);
}

TEST_CASE("study run: artifacts, determinism, timestamp opt-in") {
    REQUIRE(!sim_bin().empty());
    const std::string base = sim_bin() + " decoherence --config " + config_dir() +
                             "/decoherence.json --out ";
    const std::string d1 = scratch_dir(), d2 = scratch_dir(), d3 = scratch_dir();
    CHECK(run_cmd(base + d1).exit_code == 0);
    CHECK(run_cmd(base + d2).exit_code == 0);
    CHECK(run_cmd(base + d3 + " --timestamp").exit_code == 0);

    const std::string csv1 = read_file(d1 + "/decoherence.csv");
    const std::string csv2 = read_file(d2 + "/decoherence.csv");
    CHECK(csv1 == csv2);  // reruns are byte-identical
    CHECK(csv1.find('\r') == std::string::npos);
    CHECK(csv1.find("# schema_version = 1\n") == 0);
    CHECK(csv1.find("t,diag,offdiag,ratio,K\n") != std::string::npos);
    CHECK(csv1.find("generated_at") == std::string::npos);
    // first-row diagonal: (1 + 2e^{-N(1-g)} + e^{-2N(1-g)})/2 at t = 0
    CHECK(csv1.find("0.50007045083690949") != std::string::npos);

    // the timestamp flag may only touch the header block
    std::string csv3 = read_file(d3 + "/decoherence.csv");
    const auto pos = csv3.find("# generated_at = ");
    REQUIRE(pos != std::string::npos);
    csv3.erase(pos, csv3.find('\n', pos) - pos + 1);
    CHECK(csv3 == csv1);

    // json artifact carries the same table
    const auto tbl = njson::parse(read_file(d1 + "/decoherence.json"));
    CHECK(tbl["study"] == "decoherence");
    CHECK(tbl["columns"].size() == 5);
    CHECK(tbl["rows"].size() == 50);
    CHECK(tbl["rows"][0][0].get<double>() == 0.0);
    CHECK(tbl["rows"][0][3].get<double>() == doctest::Approx(1.0));

    for (const auto& d : {d1, d2, d3}) {
        std::remove((d + "/decoherence.csv").c_str());
        std::remove((d + "/decoherence.json").c_str());
        std::remove(d.c_str());
    }
}

TEST_CASE("remaining table studies emit their schemas") {
    REQUIRE(!sim_bin().empty());
    const std::string d = scratch_dir();
    CHECK(run_cmd(sim_bin() + " production --config " + config_dir() +
                  "/production.json --out " + d)
              .exit_code == 0);
    const std::string pcsv = read_file(d + "/production.csv");
    CHECK(pcsv.find("t,k,n_a,n_b,energy_per_mode,energy_density_rate\n") != std::string::npos);

    CHECK(run_cmd(sim_bin() + " kernel --config " + config_dir() + "/kernel.json --out " + d)
              .exit_code == 0);
    const std::string kcsv = read_file(d + "/kernel.csv");
    CHECK(kcsv.find("t,s,kbt,mean_n,trace,n_mean,a_mean_re,a_mean_im,x_diag\n") !=
          std::string::npos);

    CHECK(run_cmd(sim_bin() + " field-exponent --config " + config_dir() +
                  "/field-exponent.json --out " + d)
              .exit_code == 0);
    const std::string fcsv = read_file(d + "/field-exponent.csv");
    CHECK(fcsv.find("t,h0_diag_left,h0_offdiag,h0_diag_right,h0_log_ratio,h_offdiag,"
                    "max_limit_log\n") != std::string::npos);

    for (const char* f : {"production.csv", "kernel.csv", "kernel.json", "field-exponent.csv"})
        std::remove((d + "/" + f).c_str());
    std::remove(d.c_str());
}

TEST_CASE("exit codes separate config, numerics and io failures") {
    REQUIRE(!sim_bin().empty());
    // study/subcommand mismatch is a config failure
    const auto mm = run_cmd(sim_bin() + " production --config " + config_dir() +
                            "/decoherence.json");
    CHECK(mm.exit_code == 2);
    const auto mrep = njson::parse(mm.out);
    CHECK(mrep["error"]["kind"] == "config");
    CHECK(mrep["error"]["message"].get<std::string>().find("study mismatch") !=
          std::string::npos);

    // a hopeless truncation aborts as a numerics failure
    auto tiny = shipped_config("oracle-check.json");
    tiny["numerics"]["n_max"] = 3;
    const std::string tpath = scratch_dir() + ".json";
    write_file(tpath, tiny.dump());
    const std::string d = scratch_dir();
    const auto num = run_cmd(sim_bin() + " oracle-check --config " + tpath + " --out " + d);
    CHECK(num.exit_code == 3);
    const auto nrep = njson::parse(num.out);
    CHECK(nrep["error"]["kind"] == "numerics");
    CHECK(nrep["error"]["message"].get<std::string>().find("n_max") != std::string::npos);
    std::remove(tpath.c_str());
    std::remove(d.c_str());

    // an unwritable output directory is an io failure
    const std::string blocker = scratch_dir() + ".txt";
    write_file(blocker, "occupied\n");
    const auto io = run_cmd(sim_bin() + " decoherence --config " + config_dir() +
                            "/decoherence.json --out " + blocker + "/sub");
    CHECK(io.exit_code == 4);
    const auto irep = njson::parse(io.out);
    CHECK(irep["error"]["kind"] == "io");
    std::remove(blocker.c_str());

    // unknown subcommands die on parse
    CHECK(run_cmd(sim_bin() + " bogus --config x.json").exit_code == 2);
}

TEST_CASE("oracle-check reports honestly and exits clean") {
    REQUIRE(!sim_bin().empty());
    const std::string d = scratch_dir();
    const auto rc = run_cmd(sim_bin() + " oracle-check --config " + config_dir() +
                            "/oracle-check.json --out " + d);
    CHECK(rc.exit_code == 0);  // the report is the artifact; failures live inside it
    const auto rep = njson::parse(read_file(d + "/oracle-check.json"));
    REQUIRE(rep.contains("suites"));

    bool saw_trace = false, saw_residual = false, saw_moment = false;
    for (const auto& s : rep["suites"]) {
        const std::string name = s["name"].get<std::string>();
        if (name == "trace_drift") {
            saw_trace = true;
            CHECK(s["pass"].get<bool>());
        }
        if (name == "moment_equivalence") {
            saw_moment = true;
            CHECK(s["pass"].get<bool>());
        }
        if (name == "residual_decreasing") {
            saw_residual = true;
            // the truncated eigenstate keeps an order-one boundary residual;
            // the suite must say so rather than hide it
            CHECK_FALSE(s["pass"].get<bool>());
            const double r40 = s["measured"].get<double>();
            CHECK(r40 > 0.6);
            CHECK(r40 < 0.7);
        }
    }
    CHECK(saw_trace);
    CHECK(saw_moment);
    CHECK(saw_residual);
    CHECK_FALSE(rep["pass"].get<bool>());
    std::remove((d + "/oracle-check.json").c_str());
    std::remove(d.c_str());
}

}  // TEST_SUITE
