#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nsch/config.hpp"
#include "nsch/snapshot.hpp"
#include "support.hpp"

using namespace nsch;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

std::string message_of(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const char* kSmall =
    "grid.nx = 16\ngrid.ny = 16\ngrid.lx = 6.4\ngrid.ly = 6.4\n"
    "time.T = 0.01\ntime.dt = 1e-3\ninitial.radius = 1.8\n";

fs::path scratch_dir(const char* name) {
    const fs::path d = fs::temp_directory_path() / (std::string("nsch_config_") + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("defaults of a minimal configuration") {
    const RunConfig c = parse("# nothing but a comment\n\n");
    CHECK(c.grid == GridSpec{64, 64, 12.8, 12.8});
    CHECK(c.time.T == 0.1);
    CHECK(c.time.dt == 1e-3);
    CHECK(c.physics.eta == 0.0);
    CHECK(c.physics.nu_bar == 1.0);
    CHECK(c.physics.nu_amp == 0.2);
    CHECK(c.physics.mob_const == 1.0);
    CHECK_FALSE(c.physics.nonconstant_mobility);
    CHECK(c.physics.stabilization == 2.0);
    CHECK(c.initial.preset == "bubble");
    CHECK(c.initial.radius == 3.2);
    CHECK(c.initial.velocity == "zero");
    CHECK(c.control.shape == "zero");
    CHECK(c.alpha1 == 1.0);
    CHECK(c.alpha2 == 1.0);
    CHECK(c.alpha3 == 1e-7);
    CHECK(c.target.kind == "generated");
    CHECK(c.target.control.shape == "strain");
    CHECK(c.target.control.amplitude == 40.0);
    CHECK(c.bounds.lo[0] == -30.0);
    CHECK(c.bounds.hi[1] == 30.0);
    CHECK(c.optimizer.tol_rel == 1e-3);
    CHECK(c.optimizer.max_iter == 50);
    CHECK(c.optimizer.armijo_c1 == 1e-4);
    CHECK(c.optimizer.backtrack == 0.5);
    CHECK(c.optimizer.max_halvings == 30);
    CHECK(c.out_dir == "out");
    CHECK(c.snapshot_stride == 0);
    CHECK(c.threads == 1);
    CHECK(c.seed == 1);
    CHECK(c.verify_control.amplitude == 20.0);
    CHECK(c.verify_amplitude == 150.0);
    CHECK(c.refine_duality);
}

TEST_CASE("values are read") {
    const RunConfig c = parse(std::string(kSmall) +
                              "physics.eta = -0.5  # trailing comment\n"
                              "bounds.u_min_x = -2\nbounds.u_max_y = 4\n"
                              "optimizer.tol = 1e-4\nrun.seed = 77\nverify.refine = false\n"
                              "initial.preset = stripe\ninitial.width = 2.5\n");
    CHECK(c.grid.nx == 16);
    CHECK(c.physics.eta == -0.5);
    CHECK(c.bounds.lo[0] == -2.0);
    CHECK(c.bounds.lo[1] == -30.0);
    CHECK(c.bounds.hi[1] == 4.0);
    CHECK(c.optimizer.tol_rel == 1e-4);
    CHECK(c.seed == 77);
    CHECK_FALSE(c.refine_duality);
    CHECK(c.initial.preset == "stripe");
    CHECK(c.initial.width == 2.5);
}

TEST_CASE("assumption violations name the assumption") {
    const std::string a1 = message_of("physics.nu_bar = 0.01\nphysics.nu_amp = 0.05\n");
    CHECK(a1.find("A1 positivity violated") != std::string::npos);
    CHECK(a1.find("physics.nu_bar") != std::string::npos);

    const std::string a6 = message_of("cost.alpha1 = 0\ncost.alpha2 = 0\ncost.alpha3 = 0\n");
    CHECK(a6.find("A6") != std::string::npos);
    CHECK(a6.find("nonnegative and not all zeros") != std::string::npos);
    CHECK(message_of("cost.alpha2 = -1\n").find("A6") != std::string::npos);

    CHECK(message_of("physics.mobility = 0\n").find("A2") != std::string::npos);
    CHECK(message_of("bounds.u_min = 3\nbounds.u_max = 1\n").find("A4") != std::string::npos);
    CHECK(message_of("time.dt = 0.03\n").find("time") == 0);
    CHECK(message_of("grid.nx = 2\n").find("grid") == 0);
    CHECK(message_of("initial.preset = snapshot\n").find("initial.phi_file") != std::string::npos);
    CHECK(message_of("optimizer.armijo_c1 = 2\n").find("optimizer.armijo_c1") != std::string::npos);
}

TEST_CASE("syntax errors carry the line number") {
    CHECK(message_of("grid.nx = 16\n\nnonsense\n").find("line 3") == 0);
    CHECK(message_of("grid.nx = 16\nfoo.bar = 1\n").find("line 2: unknown key 'foo.bar'") == 0);
    CHECK(message_of("time.dt = fast\n").find("line 1") == 0);
    CHECK(message_of("grid.nx = 8.5\n").find("line 1") == 0);
    CHECK(message_of("initial.preset = sphere\n").find("line 1") == 0);
    CHECK(message_of("nx = 8\n").find("no section") != std::string::npos);
    CHECK(message_of("verify.refine = maybe\n").find("line 1") == 0);
    CHECK_THROWS_AS(parse_config(fs::path("/nonexistent/nsch.cfg")), ConfigError);
}

TEST_CASE("control shapes") {
    const GridSpec g{16, 12, 6.4, 4.8};
    const TimeSpec t{0.003, 1e-3};
    const ControlField zero = make_control(ControlSpec{}, g, t);
    CHECK(zero.size() == 4);
    CHECK(max_abs(zero[0]) == 0.0);
    const ControlField s = make_control(ControlSpec{"strain", 5.0, {}}, g, t);
    CHECK(s[0].max_boundary_normal() == 0.0);
    CHECK(max_abs(s[0]) > 0.5);
    CHECK(max_abs(s[0]) <= 5.0 * 2.0 * 3.141592653589793 / 4.8 + 1e-12);
    CHECK(testing::max_diff(s[0], s[3]) == 0.0);
}

TEST_CASE("problem assembly") {
    SUBCASE("generated target") {
        // Default amplitude 40 on a 6.4 box peaks near 39, outside the default bounds.
        const Problem p = build_problem(parse(std::string(kSmall) + "cost.target_amplitude = 20\n"));
        CHECK(p.cost.phi_Q.size() == 11);
        CHECK(p.cost.phi_Omega.grid() == p.grid);
        CHECK(testing::max_diff(p.cost.phi_Q.back(), p.cost.phi_Omega) == 0.0);
        CHECK(testing::max_diff(p.cost.phi_Q.front(), p.phi0) == 0.0);
        CHECK(max_abs(p.v0) == 0.0);
    }
    SUBCASE("target outside the bounds") {
        const RunConfig c = parse(kSmall);
        CHECK_THROWS_WITH_AS(build_problem(c), doctest::Contains("A4"), ConfigError);
    }
    SUBCASE("snapshot initial data and targets") {
        const fs::path d = scratch_dir("snap");
        const GridSpec g{16, 16, 6.4, 6.4};
        const ScalarField phi = testing::random_cells(g, 1, 0.5);
        write_snapshot(d / "phi.nschf", "phi", phi, 0.0);
        write_snapshot(d / "v.nschv", "v", testing::random_solenoidal(g, 2), 0.0);
        write_snapshot(d / "wrong.nschf", "phi", ScalarField(GridSpec{8, 8, 1, 1}), 0.0);
        const std::string base = std::string(kSmall) + "initial.preset = snapshot\ninitial.phi_file = " +
                                 (d / "phi.nschf").string() + "\ninitial.velocity = snapshot\ninitial.v_file = " +
                                 (d / "v.nschv").string() + "\n";
        const Problem p = build_problem(parse(base + "cost.target = initial\n"));
        CHECK(testing::max_diff(p.phi0, phi) == 0.0);
        CHECK(testing::max_diff(p.cost.phi_Omega, phi) == 0.0);

        const Problem q = build_problem(parse(base + "cost.target = snapshot\ncost.phi_Q_file = " +
                                              (d / "phi.nschf").string() + "\ncost.phi_Omega_file = " +
                                              (d / "phi.nschf").string() + "\n"));
        CHECK(q.cost.phi_Q.size() == 11);

        const RunConfig wrong = parse(std::string(kSmall) + "initial.preset = snapshot\ninitial.phi_file = " +
                                      (d / "wrong.nschf").string() + "\n");
        CHECK_THROWS_AS(build_problem(wrong), ConfigError);
        CHECK(message_of(std::string(kSmall) + "initial.preset = snapshot\ninitial.phi_file = " +
                         (d / "missing.nschf").string() + "\n")
                  .find("does not exist") != std::string::npos);
    }
}

TEST_CASE("refinement and threads") {
    const RunConfig c = parse(kSmall);
    const RunConfig r = refined(c);
    CHECK(r.grid.nx == 32);
    CHECK(r.grid.ny == 32);
    CHECK(r.grid.lx == c.grid.lx);
    CHECK(r.time.dt == 5e-4);
    CHECK(r.time.T == c.time.T);

    unsetenv("NSCH_THREADS");
    CHECK(effective_threads(parse("run.threads = 3\n")) == 3);
    setenv("NSCH_THREADS", "5", 1);
    CHECK(effective_threads(c) == 5);
    setenv("NSCH_THREADS", "zero", 1);
    CHECK_THROWS_AS(effective_threads(c), ConfigError);
    unsetenv("NSCH_THREADS");
}
