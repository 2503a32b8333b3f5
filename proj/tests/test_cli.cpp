// Runs the faircomp executable as a subprocess.
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "faircomp_cli_test";

struct Run {
    int code;
    std::string out, err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Run run(const std::string& args)
{
    fs::create_directories(kWork);
    const fs::path out = kWork / "stdout.txt", err = kWork / "stderr.txt";
    const std::string cmd = std::string("\"") + FAIRCOMP_CLI + "\" " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write(const std::string& name, const std::string& text)
{
    fs::create_directories(kWork);
    const fs::path p = kWork / name;
    std::ofstream(p) << text;
    return p;
}

std::string config(const std::string& name) { return (fs::path(FAIRCOMP_CONFIG_DIR) / name).string(); }

}  // namespace

TEST_CASE("solve on the trivial config")
{
    const fs::path out = kWork / "trivial_solution.json";
    const Run r = run("solve --config " + config("trivial.json") + " --out " + out.string());
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    const auto report = nlohmann::json::parse(slurp(out));
    CHECK(report["mse"]["total"].get<double>() == doctest::Approx(0.5));
    CHECK(report["mse"]["misalignment"].get<double>() == doctest::Approx(0.25));
}

TEST_CASE("solve with each scheme")
{
    for (const char* scheme : {"proposed", "ignore_csi", "fixed_position"}) {
        const fs::path out = kWork / (std::string(scheme) + ".json");
        const Run r = run("solve --config " + config("example.json") + " --out " + out.string() + " --scheme " + scheme +
                          " --verbose");
        CHECK(r.code == 0);
        CHECK(r.err.find("mse total") != std::string::npos);
        const auto report = nlohmann::json::parse(slurp(out));
        CHECK(report["solution"]["positions"].size() == 6);
    }
}

TEST_CASE("exit codes")
{
    CHECK(run("").code == 1);
    CHECK(run("solve --config").code == 1);
    CHECK(run("solve --config a.json --out b.json --scheme fpa").code == 1);
    CHECK(run("bogus").code == 1);
    CHECK(run("--help").code == 0);

    const Run missing = run("solve --config /nonexistent/x.json --out " + (kWork / "x.json").string());
    CHECK(missing.code == 2);
    CHECK(missing.err.find("/nonexistent/x.json") != std::string::npos);

    const fs::path bad = write("bad.json", R"({"num_users": 1, "num_antennas": 1, "aperture_length": "wide"})");
    const Run parse = run("solve --config " + bad.string() + " --out " + (kWork / "x.json").string());
    CHECK(parse.code == 2);
    CHECK(parse.err.find("aperture_length") != std::string::npos);

    const fs::path crowded = write("crowded.json", R"({"num_users": 1, "num_antennas": 5, "aperture_length": 1.0,
        "min_spacing": 0.5, "path_loss_exponent": 2.0, "noise_power": 1.0, "power_caps": [1.0],
        "uncertainty_widths": [0.1], "user_distances": [10.0], "nominal_angles": [1.0]})");
    const Run infeasible = run("solve --config " + crowded.string() + " --out " + (kWork / "x.json").string());
    CHECK(infeasible.code == 2);
    CHECK(infeasible.err.find("infeasible") != std::string::npos);
}

TEST_CASE("sweep writes the documented schema")
{
    const fs::path out = kWork / "fig2.csv";
    const Run r = run("sweep --spec " + config("fig2.json") + " --out " + out.string() + " --geometries 1 --seed 5");
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const std::string csv = slurp(out);
    CHECK(csv.substr(0, csv.find('\n')) == "scheme,theta0,snr_db,N,K,L,mse_mean,mse_std,num_geometries,rng_seed");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 7 * 2 * 3);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 9);
        CHECK(line.substr(line.rfind(',') + 1) == "5");
    }
}

TEST_CASE("sweep output is byte-identical across runs and worker counts")
{
    const fs::path spec = write("small_spec.json", R"({"num_users": 4, "num_antennas": 3, "aperture_length": 3.0,
        "min_spacing": 0.5, "theta0_grid": [0.0, 0.1, 0.2], "snr_db_grid": [5.0, 10.0], "num_geometries": 3,
        "rng_seed": 11})");
    const fs::path a = kWork / "a.csv", b = kWork / "b.csv", c = kWork / "c.csv";
    REQUIRE(run("sweep --spec " + spec.string() + " --out " + a.string() + " --jobs 1").code == 0);
    REQUIRE(run("sweep --spec " + spec.string() + " --out " + b.string() + " --jobs 1").code == 0);
    REQUIRE(run("sweep --spec " + spec.string() + " --out " + c.string() + " --jobs 4").code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) == slurp(c));
}
