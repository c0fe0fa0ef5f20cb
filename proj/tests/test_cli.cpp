#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "genf/config.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = GENF_CLI_PATH;

int run_cli(const std::string& args, std::string* output = nullptr) {
    const std::string out_file = (fs::temp_directory_path() / "genf_cli_out.txt").string();
    const std::string cmd = kCli + " " + args + " > " + out_file + " 2>&1";
    const int rc = std::system(cmd.c_str());
    if (output) {
        std::ifstream in(out_file);
        std::stringstream ss;
        ss << in.rdbuf();
        *output = ss.str();
    }
    return WEXITSTATUS(rc);
}

std::string write_tiny_config(const std::string& name) {
    const auto path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << "[data]\nsource = synth\nM = 6\nN = 3\nL_set = 1,2\n"
        << "[synth]\nkind = ar1\nunits = 12\nT = 40\nseed = 5\nphi = 0.8\nsigma = 0.1\n"
        << "level = 0.5\n"
        << "[itc]\ngamma = 2\n"
        << "[gan]\nepochs = 2\nn_critic = 2\nbatch = 16\n"
        << "[predictor]\nepochs = 3\nbatch = 16\ndropout = 0.0\n"
        << "[run]\nseeds = 1,2\n";
    return path.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config parsing and hashing") {
    auto cfg = genf::Config::parse_string("[a]\nx = 1\ny = hello # comment\n\n[b]\nz = 2.5\n");
    CHECK(cfg.get_int("a.x", 0) == 1);
    CHECK(cfg.get_string("a.y", "") == "hello");
    CHECK(cfg.get_double("b.z", 0.0) == 2.5);
    CHECK(cfg.get_int("a.missing", 7) == 7);
    CHECK(cfg.hash() ==
          genf::Config::parse_string("[b]\nz = 2.5\n[a]\ny = hello\nx = 1\n").hash());
    CHECK(cfg.hash() != genf::Config::parse_string("[a]\nx = 2\n").hash());

    CHECK_THROWS_AS(cfg.check_known_keys({"a.x"}), genf::ConfigKeyError);
    CHECK_THROWS_AS(genf::Config::parse_string("nonsense line"), std::runtime_error);
}

TEST_CASE("experiment config surface") {
    auto cfg = genf::Config::parse_string(
        "[data]\nM = 10\nN = 4\nL_set = 1,3\n[gan]\neta = 5\n[run]\nseeds = 7,8\n");
    auto e = genf::load_experiment_config(cfg);
    CHECK(e.M == 10);
    CHECK(e.N == 4);
    CHECK(e.L_set == std::vector<int>{1, 3});
    CHECK(e.gan.eta == 5.0);
    CHECK(e.seeds == std::vector<std::uint64_t>{7, 8});
    CHECK(!e.config_hash.empty());

    CHECK_THROWS_AS(
        genf::load_experiment_config(genf::Config::parse_string("[data]\ntypo_key = 1\n")),
        genf::ConfigKeyError);
}

TEST_CASE("cli: theory subcommand prints the bounds table") {
    std::string out;
    const int rc = run_cli("theory --n 8 --grid", &out);
    CHECK(rc == 0);
    CHECK(out.find("U_dir") != std::string::npos);
    CHECK(out.find("corollary:") != std::string::npos);

    const int rc_json = run_cli("theory --n 5 --json", &out);
    CHECK(rc_json == 0);
    CHECK(out.find("\"u_dir\"") != std::string::npos);
}

TEST_CASE("cli: forecast is byte-identical across reruns") {
    const auto cfg = write_tiny_config("genf_cli_tiny.cfg");
    const auto out1 = (fs::temp_directory_path() / "genf_fc1").string();
    const auto out2 = (fs::temp_directory_path() / "genf_fc2").string();
    fs::remove_all(out1);
    fs::remove_all(out2);

    REQUIRE(run_cli("forecast --config " + cfg + " --strategy genf --L 2 --out " + out1) == 0);
    REQUIRE(run_cli("forecast --config " + cfg + " --strategy genf --L 2 --out " + out2) == 0);
    CHECK(slurp(out1 + "/report_GENF-2_seed1.json") == slurp(out2 + "/report_GENF-2_seed1.json"));
    CHECK(slurp(out1 + "/report_GENF-2_seed1_predictions.csv") ==
          slurp(out2 + "/report_GENF-2_seed1_predictions.csv"));
    CHECK(!slurp(out1 + "/report_GENF-2_seed1.json").empty());
}

TEST_CASE("cli: distinct errors with distinct exit codes") {
    const auto cfg = write_tiny_config("genf_cli_tiny2.cfg");
    std::string out;

    // bad config key -> 2
    const auto bad = (fs::temp_directory_path() / "genf_bad.cfg").string();
    std::ofstream(bad) << "[data]\nbogus = 1\n";
    CHECK(run_cli("sweep --config " + bad, &out) == 2);
    CHECK(out.find("bad_config_key") != std::string::npos);

    // missing checkpoint -> 3
    CHECK(run_cli("generate --config " + cfg + " --gen /nonexistent.ck --L 1 --out /tmp/x.csv",
                  &out) == 3);
    CHECK(out.find("missing_checkpoint") != std::string::npos);

    // L >= N -> 4
    CHECK(run_cli("forecast --config " + cfg + " --strategy genf --L 3", &out) == 4);
    CHECK(out.find("invalid_argument") != std::string::npos);
    CHECK(out.find("L < N") != std::string::npos);
}

TEST_CASE("cli: bench emit feeds ingest and split") {
    const auto cfg = write_tiny_config("genf_cli_tiny3.cfg");
    const auto csv = (fs::temp_directory_path() / "genf_bench.csv").string();
    std::string out;
    REQUIRE(run_cli("bench emit --config " + cfg + " --out " + csv, &out) == 0);

    auto units = genf::load_csv(csv);
    CHECK(units.size() == 12);
    CHECK(units[0].length() == 40);

    REQUIRE(run_cli("ingest --config " + cfg + " --csv " + csv, &out) == 0);
    CHECK(out.find("\"units\": 12") != std::string::npos);

    const auto split_dir = (fs::temp_directory_path() / "genf_split").string();
    REQUIRE(run_cli("split --config " + cfg + " --out " + split_dir, &out) == 0);
    auto train = genf::read_split_manifest(split_dir + "/train.txt");
    auto test = genf::read_split_manifest(split_dir + "/test.txt");
    auto val = genf::read_split_manifest(split_dir + "/validation.txt");
    CHECK(train.size() + test.size() + val.size() == 12);
}

TEST_CASE("cli: staged pipeline train-gan, generate, train-predictor, evaluate") {
    const auto cfg = write_tiny_config("genf_cli_tiny4.cfg");
    const auto dir = (fs::temp_directory_path() / "genf_staged").string();
    fs::remove_all(dir);
    std::string out;

    REQUIRE(run_cli("train-gan --config " + cfg + " --out " + dir, &out) == 0);
    CHECK(fs::exists(dir + "/gan_generator.ck"));
    CHECK(fs::exists(dir + "/gan_critic.ck"));
    CHECK(fs::exists(dir + "/itc_partition.tsv"));
    CHECK(fs::exists(dir + "/gan_log.csv"));

    REQUIRE(run_cli("generate --config " + cfg + " --gen " + dir + "/gan_generator.ck --L 2 --out " +
                        dir + "/synth.csv",
                    &out) == 0);
    CHECK(fs::exists(dir + "/synth.csv"));

    REQUIRE(run_cli("train-predictor --config " + cfg + " --strategy genf --L 2 --gan " + dir +
                        "/gan_generator.ck --out " + dir,
                    &out) == 0);
    CHECK(fs::exists(dir + "/predictor.ck"));
    CHECK(fs::exists(dir + "/predictor_log.csv"));

    REQUIRE(run_cli("forecast --config " + cfg + " --strategy df --out " + dir, &out) == 0);
    REQUIRE(run_cli("evaluate --pred " + dir + "/report_DF_seed1_predictions.csv", &out) == 0);
    CHECK(out.find("\"mse\"") != std::string::npos);
}

TEST_CASE("cli: sweep writes the comparison artifacts") {
    const auto cfg = write_tiny_config("genf_cli_tiny5.cfg");
    const auto dir = (fs::temp_directory_path() / "genf_sweepdir").string();
    fs::remove_all(dir);
    std::string out;
    REQUIRE(run_cli("sweep --config " + cfg + " --out " + dir, &out) == 0);
    CHECK(out.find("GENF-2") != std::string::npos);
    CHECK(fs::exists(dir + "/sweep.json"));
    CHECK(fs::exists(dir + "/sweep_table.txt"));
    const auto j = slurp(dir + "/sweep.json");
    CHECK(j.find("\"schema_version\"") != std::string::npos);
    CHECK(j.find("\"config_hash\"") != std::string::npos);
}
