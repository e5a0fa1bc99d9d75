#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dense.hpp"
#include "nanosr/cumulant.hpp"
#include "nanosr/errors.hpp"
#include "nanosr/units.hpp"
#include "nanosr/green.hpp"
#include "nanosr/observables.hpp"
#include "nanosr/solve.hpp"

#include <chrono>
#include <random>

using namespace nanosr;
using cd = std::complex<double>;

namespace {

Scenario single(double gamma, double detuning, cd v, double t_final, SolverKind solver) {
    Scenario s;
    s.ensemble.emitters.push_back({Vec3::Zero(), CVec3(0, 0, 4), 1800.0 + detuning});
    s.couplings = uniform_couplings(1, gamma);
    s.drive = make_uniform_drive(1, 1800.0, v, Continuous{});
    s.t_final = t_final;
    s.solver = solver;
    return s;
}

double max_population_gap(const Trajectory& a, const Trajectory& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto ta = moment_reductions(*a.layout, a.states[i]);
        const auto tb = moment_reductions(*b.layout, b.states[i]);
        worst = std::max(worst, (ta.P - tb.P).cwiseAbs().maxCoeff());
    }
    return worst;
}

Scenario square_scenario(int n, SolverKind solver, double t_final) {
    Scenario s;
    s.ensemble = make_square_fill(n, 1.0, Vec3::Zero(), CVec3(0, 0, 4), 1878.7);
    s.couplings = couplings_from_green(s.ensemble, as_green_evaluator(PlasmonicProfile{}, 4.0));
    s.couplings.k_factors = Eigen::MatrixXcd::Ones(n, n);
    s.drive = make_uniform_drive(static_cast<std::size_t>(n), 1878.7, 30.0, Gaussian{100.0, 50.0});
    s.t_final = t_final;
    s.solver = solver;
    return s;
}

} // namespace

TEST_CASE("single-emitter plan is the Bloch system") {
    const auto s = single(7.0, 3.0, cd(20.0, 5.0), 10.0, SolverKind::cumulant1);
    const auto plan = compile_plan(generate_ode_system(1, 1), s.ensemble, s.couplings, s.drive);
    CHECK(plan.term_count() <= 6);
    CHECK(plan.size() == 2);
}

TEST_CASE("nothing to do without couplings, detuning or drive") {
    for (int order = 1; order <= 2; ++order) {
        Scenario s = single(0.0, 0.0, 0.0, 10.0, SolverKind::cumulant2);
        s.ensemble = make_square_array(2, 1.0, Vec3::Zero(), CVec3(0, 0, 4), 1800.0);
        s.couplings = uniform_couplings(4, 0.0);
        s.drive = make_uniform_drive(4, 1800.0, 0.0, Continuous{});
        const auto plan = compile_plan(generate_ode_system(4, order), s.ensemble, s.couplings, s.drive);
        CHECK(plan.term_count() == 0);
        const auto traj = integrate(plan, initial_moments(plan.layout(), InitialState::ground), 10.0, 1.0);
        for (const auto& y : traj.states) CHECK(y.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("plan evaluation matches the dense Liouvillian on product states") {
    std::mt19937_64 rng(23);
    const auto sys = generate_ode_system(3, 1);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = oracle::random_model(3, rng);
        const auto sc = oracle::scenario_from(m, SolverKind::cumulant1);
        const auto plan = compile_plan(sys, sc.ensemble, sc.couplings, sc.drive);
        std::vector<oracle::Mat> sites;
        for (int s = 0; s < 3; ++s) sites.push_back(oracle::random_qubit(rng));
        const auto dy = plan.evaluate(0.0, product_state_moments(plan.layout(), oracle::to_sites(sites)).values);
        const auto drho = oracle::liouvillian(m, oracle::product_density(sites));
        for (std::size_t k = 0; k < plan.size(); ++k) {
            const cd ref = oracle::expect(drho, oracle::dense(plan.layout()[k], 3));
            CHECK(std::abs(dy[static_cast<Eigen::Index>(k)] - ref) < 1e-10 * std::max(1.0, std::abs(ref)));
        }
    }
}

TEST_CASE("Rabi oscillation") {
    const double v = 30.0;
    const double period = units::pi * oracle::hbar / v;  // P = sin^2(v t / hbar)
    for (const auto solver : {SolverKind::cumulant1, SolverKind::cumulant2}) {
        auto s = single(0.0, 0.0, v, 3.0 * period, solver);
        const auto traj = solve_scenario(s, {0.25, 1e-12, 1e-10});
        double worst = 0.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const double p = traj.states[i][0].real();
            worst = std::max(worst, std::abs(p - std::pow(std::sin(v * traj.times[i] / oracle::hbar), 2)));
        }
        CHECK(worst < 1e-8);

        // population returns to zero after exactly one period
        const double half = period / 2.0;
        const auto at = [&](double t) {
            auto probe = single(0.0, 0.0, v, t, solver);
            const auto r = solve_scenario(probe, {t, 1e-13, 1e-11});
            return r.states.back()[0].real();
        };
        CHECK(std::abs(at(half) - 1.0) < 1e-9);
        CHECK(std::abs(at(period)) < 1e-9);
    }
}

TEST_CASE("Bloch vector length is conserved without decay") {
    auto s = single(0.0, 12.0, cd(25.0, -10.0), 300.0, SolverKind::cumulant2);
    const auto spin = collective_spin(solve_scenario(s, {0.5, 1e-12, 1e-10}));
    for (const auto& a : spin.A) CHECK(std::abs(a.norm() - 0.5) < 1e-8);
}

TEST_CASE("one emitter: exact, order 1 and order 2 agree") {
    auto s = single(7.0, 4.0, cd(20.0, 8.0), 400.0, SolverKind::exact);
    s.drive.envelope = Gaussian{150.0, 80.0};
    const SolveOptions o{0.5, 1e-12, 1e-10};
    const auto e = solve_scenario(s, o);
    s.solver = SolverKind::cumulant1;
    const auto m1 = solve_scenario(s, o);
    s.solver = SolverKind::cumulant2;
    const auto m2 = solve_scenario(s, o);
    CHECK(max_population_gap(e, m1) < 1e-7);
    CHECK(max_population_gap(e, m2) < 1e-7);
}

TEST_CASE("two emitters: order 2 is exact") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 3; ++trial) {
        const auto m = oracle::random_model(2, rng);
        auto sc = oracle::scenario_from(m, SolverKind::exact, 200.0);
        sc.drive.envelope = Gaussian{60.0, 40.0};
        const SolveOptions o{0.5, 1e-12, 1e-10};
        const auto e = solve_scenario(sc, o);
        sc.solver = SolverKind::cumulant2;
        const auto c = solve_scenario(sc, o);
        CHECK(max_population_gap(e, c) < 1e-6);
        // every tracked moment, not just populations
        double worst = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) worst = std::max(worst, (e.states[i] - c.states[i]).cwiseAbs().maxCoeff());
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("tolerance halving leaves populations unchanged") {
    auto s = square_scenario(4, SolverKind::cumulant2, 300.0);
    const auto a = solve_scenario(s, {0.5, 1e-10, 1e-8});
    const auto b = solve_scenario(s, {0.5, 0.5e-10, 0.5e-8});
    CHECK(max_population_gap(a, b) < 1e-6);
}

TEST_CASE("coherence Gram matrix stays positive") {
    auto s = square_scenario(6, SolverKind::cumulant2, 400.0);
    const auto traj = solve_scenario(s);
    CHECK(traj.diagnostics.min_gram_eigenvalue > -1e-6);
}

TEST_CASE("nine emitters, order 2, one picosecond") {
    auto s = square_scenario(9, SolverKind::cumulant2, 1000.0);
    const auto start = std::chrono::steady_clock::now();
    const auto traj = solve_scenario(s);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    MESSAGE("N = 9 order-2 run: " << seconds << " s, " << traj.diagnostics.stats.rhs_evals << " evaluations");
    CHECK(seconds < 10.0);
    CHECK(traj.size() == 2001);
}

TEST_CASE("integration errors surface with the failure time") {
    auto s = single(7.0, 0.0, 20.0, 100.0, SolverKind::cumulant1);
    const auto plan = compile_plan(generate_ode_system(1, 1), s.ensemble, s.couplings, s.drive);
    ode::Options o;
    o.max_steps = 3;
    CHECK_THROWS_AS(integrate(plan, initial_moments(plan.layout(), InitialState::ground), 100.0, 1.0, o),
                    IntegrationError);
}
