#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out_path = fs::temp_directory_path() / ("mogro_cli_out_" +
                                                           std::to_string(counter) + ".txt");
    const fs::path err_path = fs::temp_directory_path() / ("mogro_cli_err_" +
                                                           std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = std::string(MOGRO_CLI_PATH) + " " + args + " >" + out_path.string() +
                            " 2>" + err_path.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    fs::remove(out_path);
    fs::remove(err_path);
    return r;
}

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "mogro_cli_work";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("gen-lowerbound writes the horizon-tuned epsilon") {
    const fs::path out = work_dir() / "lb.json";
    const CliResult r = run_cli("gen-lowerbound --d 2 --t 1000 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    std::ifstream f(out);
    nlohmann::json j;
    f >> j;
    CHECK(std::abs(j.at("epsilon").get<double>() - 0.14789) <= 1e-5);
    CHECK(j.at("verification_pass").get<bool>());
    REQUIRE(j.at("features").size() == 4);
    // explicit epsilon variant, d = 3
    const fs::path out3 = work_dir() / "lb3.json";
    const CliResult r3 = run_cli("gen-lowerbound --d 3 --epsilon 0.05 --out " + out3.string());
    REQUIRE(r3.exit_code == 0);
}

TEST_CASE("gen-instance then verify-goodness passes for anchored instances") {
    int passes = 0;
    for (int seed = 0; seed < 10; ++seed) {
        const fs::path inst = work_dir() / ("inst_" + std::to_string(seed) + ".json");
        const CliResult g = run_cli("gen-instance --d 5 --k 50 --m 5 --sigma 0.1 --seed " +
                                    std::to_string(seed) + " --out " + inst.string());
        REQUIRE(g.exit_code == 0);
        const CliResult v = run_cli("verify-goodness --instance " + inst.string() +
                                    " --gamma 0.5 --alpha 0.05 --n 10000 --seed 1");
        REQUIRE((v.exit_code == 0 || v.exit_code == 2));
        passes += v.exit_code == 0;
        if (seed == 0) {
            nlohmann::json j = nlohmann::json::parse(v.out);
            CHECK(j.contains("worst_margin"));
            CHECK(j.contains("B"));
        }
    }
    CHECK(passes >= 9);
}

TEST_CASE("verify-goodness exits 2 when the condition fails") {
    // a single-arm instance cannot serve two orthogonal objectives
    const fs::path inst = work_dir() / "bad_inst.json";
    std::ofstream f(inst);
    f << R"({"d":2,"M":2,"K":2,"sigma":0.1,"x_max":1,"l":1,"L":1,
            "features":[[1,0],[0.99,0.01]],
            "objectives":[[1,0],[0,1]]})";
    f.close();
    const CliResult v = run_cli("verify-goodness --instance " + inst.string() +
                                " --gamma 0.9 --alpha 0.05 --n 5000");
    CHECK(v.exit_code == 2);
}

TEST_CASE("run executes a config and summarize prints the table") {
    const fs::path dir = work_dir();
    const fs::path cfg = dir / "run_cfg.json";
    {
        std::ofstream f(cfg);
        f << R"({
  "T": 40, "n_instances": 1, "n_repeats": 2, "master_seed": 5,
  "instance": {"kind": "synthetic", "d": 3, "k": 10, "m": 3, "sigma": 0.1},
  "context": {"kind": "fixed"},
  "policies": [{"kind": "mogro_rw", "b": 1.0}, {"kind": "mogro_rr", "b": 1.0}],
  "metrics": {"epfi_epsilon": 0.1, "weight_grid_resolution": 40}
})";
    }
    const fs::path out = dir / "run_out";
    fs::remove_all(out);
    const CliResult r =
        run_cli("run --config " + cfg.string() + " --out " + out.string() +
                " --save-trajectories");
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(out / "curves.csv"));
    CHECK(fs::exists(out / "summary.json"));
    CHECK(fs::exists(out / "manifest.json"));

    const CliResult s = run_cli("summarize --in " + out.string());
    CHECK(s.exit_code == 0);
    CHECK(s.out.find("mogro_rw") != std::string::npos);
    CHECK(s.out.find("mogro_rr") != std::string::npos);

    // synthetic runs persist their instances, so trajectories replay directly
    const fs::path traj = out / "trajectories" / "mogro_rw_i0_r0.csv";
    const fs::path inst = out / "instances" / "instance_0.json";
    REQUIRE(fs::exists(traj));
    REQUIRE(fs::exists(inst));
    const CliResult m =
        run_cli("metrics --trajectory " + traj.string() + " --instance " + inst.string());
    CHECK(m.exit_code == 0);
    CHECK(m.out.find("replay-match: true") != std::string::npos);
}

TEST_CASE("metrics replay matches the recorded curves") {
    const fs::path dir = work_dir();
    const fs::path inst_path = dir / "replay_inst.json";
    const CliResult g =
        run_cli("gen-instance --d 3 --k 9 --m 3 --sigma 0.1 --seed 4 --out " +
                inst_path.string());
    REQUIRE(g.exit_code == 0);

    const fs::path cfg = dir / "replay_cfg.json";
    {
        std::ofstream f(cfg);
        f << R"({
  "T": 50, "n_instances": 1, "n_repeats": 1, "master_seed": 11,
  "instance": {"kind": "file", "path": ")" << inst_path.string() << R"("},
  "context": {"kind": "fixed"},
  "policies": [{"kind": "mogro_rw", "b": 0.8}],
  "metrics": {"epfi_epsilon": 0.1, "weight_grid_resolution": 40}
})";
    }
    const fs::path out = dir / "replay_out";
    fs::remove_all(out);
    REQUIRE(run_cli("run --config " + cfg.string() + " --out " + out.string() +
                    " --save-trajectories")
                .exit_code == 0);
    const fs::path traj = out / "trajectories" / "mogro_rw_i0_r0.csv";
    REQUIRE(fs::exists(traj));
    const CliResult m =
        run_cli("metrics --trajectory " + traj.string() + " --instance " + inst_path.string());
    REQUIRE(m.exit_code == 0);
    CHECK(m.out.find("replay-match: true") != std::string::npos);
}

TEST_CASE("ingest builds an instance json from a csv table") {
    const fs::path dir = work_dir();
    const fs::path csv = dir / "wine_like.csv";
    {
        std::ofstream f(csv);
        f << "fixed acidity,volatile acidity,alcohol,quality\n";
        // y columns linear in the features plus jitter
        const double rows[8][2] = {{7.1, 0.3}, {6.4, 0.5}, {8.2, 0.2}, {7.7, 0.8},
                                   {5.9, 0.4}, {7.3, 0.6}, {6.8, 0.7}, {8.8, 0.35}};
        for (const auto& r : rows)
            f << r[0] << "," << r[1] << "," << (1.2 * r[0] - 0.5 * r[1]) << ","
              << (0.3 * r[0] + 2.0 * r[1]) << "\n";
    }
    const fs::path out = dir / "wine_like.json";
    const CliResult r = run_cli("ingest --csv " + csv.string() +
                                " --features \"fixed acidity,volatile acidity\""
                                " --objectives alcohol,quality --noise-sd 1.0 --k 6 --seed 2"
                                " --out " +
                                out.string());
    REQUIRE(r.exit_code == 0);
    std::ifstream f(out);
    nlohmann::json j;
    f >> j;
    CHECK(j.at("d") == 2);
    CHECK(j.at("M") == 2);
    CHECK(j.at("K") == 6);
    CHECK(j.at("sigma") == 1.0);

    CHECK(run_cli("ingest --csv " + csv.string() +
                  " --features nope --objectives alcohol --out " + out.string())
              .exit_code == 1);
}

TEST_CASE("malformed configs and unknown flags exit 1") {
    const fs::path dir = work_dir();
    const fs::path cfg = dir / "missing_t.json";
    {
        std::ofstream f(cfg);
        f << R"({"n_instances": 1,
  "instance": {"kind": "synthetic", "d": 3, "k": 10, "m": 3, "sigma": 0.1},
  "policies": [{"kind": "mogro_rw", "b": 1.0}]})";
    }
    const CliResult r = run_cli("run --config " + cfg.string() + " --out " +
                                (dir / "never").string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("T") != std::string::npos);

    CHECK(run_cli("run --config nonexistent.json --out x").exit_code == 1);
    CHECK(run_cli("gen-instance --d 5 --bogus-flag 3").exit_code == 1);
    CHECK(run_cli("").exit_code == 1);
}
