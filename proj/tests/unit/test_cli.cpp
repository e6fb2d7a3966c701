#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "nsch/cli.hpp"
#include "nsch/snapshot.hpp"

using namespace nsch;
namespace fs = std::filesystem;

namespace {

const char* kSmall =
    "grid.nx = 16\ngrid.ny = 16\ngrid.lx = 6.4\ngrid.ly = 6.4\n"
    "time.T = 0.01\ntime.dt = 1e-3\n"
    "initial.radius = 1.8\ncost.target_amplitude = 20\n";

struct Run {
    int code;
    std::string out, err;
};

fs::path work_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("nsch_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "run.cfg";
    std::ofstream(p) << text << "output.dir = " << (dir / "out").string() << "\n";
    return p;
}

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "nsch");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> r;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) r.push_back(l);
    return r;
}

// Exit status and stderr of the installed executable.
Run run_exe(const std::string& args, const fs::path& dir) {
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + NSCH_EXE + "\" " + args + " > /dev/null 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, "", slurp(err)};
}

}  // namespace

TEST_CASE("simulate at equilibrium") {
    const fs::path d = work_dir("equilibrium");
    const fs::path cfg = write_config(d, std::string(kSmall) + "initial.preset = equilibrium\ninitial.value = 0.4\n"
                                                                 "output.snapshot_stride = 5\n");
    const Run r = run({"simulate", "--config", cfg.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("simulate: 10 steps") != std::string::npos);

    const auto rows = lines_of(slurp(d / "out" / "diagnostics.csv"));
    REQUIRE(rows.size() == 12);
    CHECK(rows[0].rfind("step,time,", 0) == 0);
    // Everything after the time column is constant.
    auto tail = [](const std::string& row) { return row.substr(row.find(',', row.find(',') + 1)); };
    for (std::size_t k = 2; k < rows.size(); ++k) CHECK(tail(rows[k]) == tail(rows[1]));

    for (int n : {0, 5, 10}) {
        char name[32];
        std::snprintf(name, sizeof name, "phi_%05d.nschf", n);
        const ScalarField phi = read_scalar_snapshot(d / "out" / name);
        CHECK(max_abs(phi - ScalarField(phi.grid(), 0.4)) <= 1e-13);
    }
    CHECK_FALSE(fs::exists(d / "out" / "phi_00001.nschf"));
    CHECK(fs::exists(d / "out" / "v_00010.nschv"));
}

TEST_CASE("verify writes one row per check") {
    const fs::path d = work_dir("verify");
    const fs::path cfg = write_config(d, kSmall);
    const Run r = run({"verify", "mass", "--config", cfg.string(), "--seed", "9"});
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS mass") != std::string::npos);
    CHECK(r.out.find("seed 9") != std::string::npos);
    const auto rows = lines_of(slurp(d / "out" / "verify.csv"));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "check,pass,value,threshold,seed,detail");
    CHECK(rows[1].rfind("mass,1,", 0) == 0);
}

TEST_CASE("optimize writes a monotone history and is reproducible") {
    const fs::path d = work_dir("optimize");
    const std::string text = std::string(kSmall) + "time.T = 0.05\noptimizer.max_iter = 4\noutput.snapshot_stride = 10\n";
    const fs::path cfg = write_config(d, text);
    REQUIRE(run({"optimize", "--config", cfg.string()}).code == 0);
    const std::string first = slurp(d / "out" / "optim.csv");
    REQUIRE(run({"optimize", "--config", cfg.string(), "--out", (d / "again").string()}).code == 0);
    CHECK(slurp(d / "again" / "optim.csv") == first);
    CHECK(fs::exists(d / "again" / "u_00050.nschv"));

    const auto rows = lines_of(first);
    REQUIRE(rows.size() >= 3);
    CHECK(rows[0] == "iter,J,J_track,J_terminal,J_control,grad_norm,stationarity,step,accepted");
    double previous = 1e300;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double J = std::stod(rows[k].substr(rows[k].find(',') + 1));
        CHECK(J <= previous);
        previous = J;
    }
}

TEST_CASE("configuration errors exit with 2") {
    const fs::path d = work_dir("errors");
    SUBCASE("nonconstant mobility") {
        const fs::path cfg = write_config(d, std::string(kSmall) + "physics.nonconstant_mobility = true\n"
                                                                   "physics.mobility_amp = 0.1\n");
        const Run r = run({"optimize", "--config", cfg.string()});
        CHECK(r.code == 2);
        CHECK(r.err.find("constant unit mobility") != std::string::npos);
        // Forward runs do not need the adjoint.
        CHECK(run({"simulate", "--config", cfg.string()}).code == 0);
    }
    SUBCASE("zero cost weights") {
        const fs::path cfg = write_config(d, std::string(kSmall) + "cost.alpha1 = 0\ncost.alpha2 = 0\ncost.alpha3 = 0\n");
        const Run r = run({"optimize", "--config", cfg.string()});
        CHECK(r.code == 2);
        CHECK(r.err.find("A6") != std::string::npos);
    }
    SUBCASE("command line") {
        CHECK(run({"optimize"}).code == 2);
        CHECK(run({}).code == 2);
        CHECK(run({"verify", "speed", "--config", write_config(d, kSmall).string()}).code == 2);
        CHECK(run({"simulate", "--config", (d / "absent.cfg").string()}).code == 2);
        CHECK(run({"simulate", "--config", write_config(d, kSmall).string(), "--seed", "x"}).code == 2);
    }
    SUBCASE("syntax") {
        const Run r = run({"simulate", "--config", write_config(d, "grid.nx = 16\ngrid.mx = 3\n").string()});
        CHECK(r.code == 2);
        CHECK(r.err.find("line 2") != std::string::npos);
    }
}

TEST_CASE("numerical failure exits with 1") {
    const fs::path d = work_dir("blowup");
    const fs::path cfg = write_config(d,
                                      "grid.nx = 16\ngrid.ny = 16\ngrid.lx = 6.4\ngrid.ly = 6.4\n"
                                      "time.T = 0.5\ntime.dt = 0.1\ninitial.radius = 1.8\n"
                                      "initial.velocity = vortex\ninitial.velocity_amplitude = 1e5\n"
                                      "cost.target = initial\n");
    const Run r = run({"simulate", "--config", cfg.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("numerical failure") != std::string::npos);
}

TEST_CASE("executable exit codes") {
    const fs::path d = work_dir("exe");
    const fs::path cfg = write_config(d, std::string(kSmall) + "physics.nonconstant_mobility = true\n"
                                                               "physics.mobility_amp = 0.1\n");
    const Run r = run_exe("optimize --config \"" + cfg.string() + "\"", d);
    CHECK(r.code == 2);
    CHECK(r.err.find("constant unit mobility") != std::string::npos);
    CHECK(run_exe("--help", d).code == 0);
    CHECK(run_exe("bogus", d).code == 2);
}
