#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nanosr/core_model.hpp"
#include "nanosr/green.hpp"

#include <random>

using namespace nanosr;

namespace {

const CVec3 zdip(0, 0, 4.0);

bool contains(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

Scenario nine_square() {
    Scenario s;
    s.ensemble = make_square_array(3, 1.0, Vec3::Zero(), zdip, 1878.7);
    s.couplings = couplings_from_green(s.ensemble, as_green_evaluator(PlasmonicProfile{}, 4.0));
    s.drive = make_uniform_drive(9, 1878.7, 10.0, Continuous{});
    s.t_final = 100.0;
    return s;
}

} // namespace

TEST_CASE("square array layout") {
    const auto e = make_square_array(3, 1.0, Vec3::Zero(), zdip, 1878.7);
    REQUIRE(e.size() == 9);
    double xmin = 1e9, xmax = -1e9, ymin = 1e9, ymax = -1e9;
    for (const auto& em : e.emitters) {
        xmin = std::min(xmin, em.position.x());
        xmax = std::max(xmax, em.position.x());
        ymin = std::min(ymin, em.position.y());
        ymax = std::max(ymax, em.position.y());
        CHECK(em.position.z() == 0.0);
        CHECK(em.transition_energy == 1878.7);
    }
    CHECK(xmin == doctest::Approx(-1.0));
    CHECK(xmax == doctest::Approx(1.0));
    CHECK(ymin == doctest::Approx(-1.0));
    CHECK(ymax == doctest::Approx(1.0));

    const auto one = make_square_array(1, 1.0, Vec3::Zero(), zdip, 1878.7);
    REQUIRE(one.size() == 1);
    CHECK(one[0].position.norm() == 0.0);

    const auto four = make_square_array(2, 0.5, Vec3::Zero(), zdip, 1878.7);
    REQUIRE(four.size() == 4);
    for (const auto& em : four.emitters) {
        CHECK(std::abs(em.position.x()) == doctest::Approx(0.25));
        CHECK(std::abs(em.position.y()) == doctest::Approx(0.25));
    }
}

TEST_CASE("linear array layout") {
    const auto e = make_linear_array(9, 1.0, Vec3::Zero(), Vec3::UnitX(), zdip, 1878.7);
    REQUIRE(e.size() == 9);
    CHECK((e[8].position - e[0].position).norm() == doctest::Approx(8.0));

    const auto f = make_linear_array(3, 2.0, Vec3(1, 0, 0), Vec3::UnitX(), zdip, 1878.7);
    CHECK(f[0].position.x() == doctest::Approx(1.0));
    CHECK(f[1].position.x() == doctest::Approx(3.0));
    CHECK(f[2].position.x() == doctest::Approx(5.0));

    CHECK_THROWS_AS(make_linear_array(3, 1.0, Vec3::Zero(), Vec3(1, 1, 0), zdip, 1878.7), std::invalid_argument);
}

TEST_CASE("geometry argument errors") {
    CHECK_THROWS_AS(make_square_array(3, 0.0, Vec3::Zero(), zdip, 1878.7), std::invalid_argument);
    CHECK_THROWS_AS(make_square_array(3, -1.0, Vec3::Zero(), zdip, 1878.7), std::invalid_argument);
    CHECK_THROWS_AS(make_square_array(0, 1.0, Vec3::Zero(), zdip, 1878.7), std::invalid_argument);
    CHECK_THROWS_AS(make_linear_array(0, 1.0, Vec3::Zero(), Vec3::UnitX(), zdip, 1878.7), std::invalid_argument);
}

TEST_CASE("square fill counts and spacing") {
    for (int count = 1; count <= 16; ++count) {
        const auto e = make_square_fill(count, 1.0, Vec3::Zero(), zdip, 1878.7);
        REQUIRE(e.size() == static_cast<std::size_t>(count));
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::size_t j = 0; j < i; ++j) CHECK((e[i].position - e[j].position).norm() >= 1.0 - 1e-12);
    }
    const auto nine = make_square_fill(9, 1.0, Vec3::Zero(), zdip, 1878.7);
    const auto sq = make_square_array(3, 1.0, Vec3::Zero(), zdip, 1878.7);
    for (std::size_t i = 0; i < 9; ++i) CHECK((nine[i].position - sq[i].position).norm() < 1e-12);
}

TEST_CASE("generators are translation equivariant") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 shift(u(rng), u(rng), u(rng));
        const auto a = make_square_array(3, 1.3, Vec3::Zero(), zdip, 1878.7);
        const auto b = make_square_array(3, 1.3, shift, zdip, 1878.7);
        const auto c = make_linear_array(5, 0.7, Vec3::Zero(), Vec3::UnitY(), zdip, 1878.7);
        const auto d = make_linear_array(5, 0.7, shift, Vec3::UnitY(), zdip, 1878.7);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK((b[i].position - a[i].position - shift).norm() < 1e-12);
        for (std::size_t i = 0; i < c.size(); ++i) CHECK((d[i].position - c[i].position - shift).norm() < 1e-12);
    }
}

TEST_CASE("envelopes") {
    CHECK(envelope_value(Continuous{}, 123.0) == 1.0);
    const Rectangular r{10.0, 20.0};
    CHECK(envelope_value(r, 9.999) == 0.0);
    CHECK(envelope_value(r, 10.0) == 1.0);
    CHECK(envelope_value(r, 19.999) == 1.0);
    CHECK(envelope_value(r, 20.0) == 0.0);
    const Gaussian g{50.0, 20.0};
    CHECK(envelope_value(g, 50.0) == doctest::Approx(1.0));
    CHECK(envelope_value(g, 60.0) == doctest::Approx(0.5));
    CHECK(envelope_value(g, 40.0) == doctest::Approx(0.5));
    CHECK(envelope_breakpoints(r) == std::vector<double>{10.0, 20.0});
    CHECK(envelope_breakpoints(Continuous{}).empty());
}

TEST_CASE("validate_scenario") {
    SUBCASE("well-formed nine-emitter scenario") {
        CHECK(validate_scenario(nine_square()).empty());
    }
    SUBCASE("dissipative matrix with a negative eigenvalue") {
        auto s = nine_square();
        Eigen::MatrixXd g = Eigen::MatrixXd::Identity(9, 9) * 7.0;
        g(4, 4) = -0.1;
        s.couplings.gamma = g;
        const auto v = validate_scenario(s);
        REQUIRE(v.size() == 1);
        CHECK(contains(v, "dissipative matrix not PSD"));
    }
    SUBCASE("drive amplitude length mismatch") {
        auto s = nine_square();
        s.drive.amplitudes = Eigen::VectorXcd::Constant(8, 10.0);
        const auto v = validate_scenario(s);
        REQUIRE(v.size() == 1);
        CHECK(contains(v, "length"));
    }
    SUBCASE("exact solver size guard") {
        auto s = nine_square();
        s.ensemble = make_square_fill(13, 1.0, Vec3::Zero(), zdip, 1878.7);
        s.couplings = uniform_couplings(13, 7.0);
        s.drive = make_uniform_drive(13, 1878.7, 0.0, Continuous{});
        s.solver = SolverKind::exact;
        CHECK(contains(validate_scenario(s), "exact solver limited"));
    }
    SUBCASE("coincident emitters and non-positive time") {
        auto s = nine_square();
        s.ensemble.emitters[1].position = s.ensemble.emitters[0].position;
        s.t_final = 0.0;
        const auto v = validate_scenario(s);
        CHECK(contains(v, "share a position"));
        CHECK(contains(v, "t_final"));
    }
}

TEST_CASE("positive semidefinite check") {
    CHECK(is_positive_semidefinite(Eigen::MatrixXd::Ones(4, 4)));
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
    m(0, 0) = -1e-3;
    CHECK_FALSE(is_positive_semidefinite(m));
    CHECK(min_eigenvalue(m) == doctest::Approx(-1e-3));
}
