#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nanosr/errors.hpp"
#include "nanosr/green.hpp"
#include "nanosr/units.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <random>

using namespace nanosr;
using cd = std::complex<double>;

namespace {

const CVec3 zdip(0, 0, 4.0);

// Textbook vacuum rate from SI constants, returned as hbar*Gamma0 in meV.
double vacuum_rate_si(double wavelength_nm, double dipole_debye) {
    using boost::multiprecision::cpp_bin_float_50;
    using F = cpp_bin_float_50;
    const F c = 299792458, hbar = F("1.054571817e-34"), e = F("1.602176634e-19"), eps0 = F("8.8541878128e-12");
    const F pi = boost::math::constants::pi<F>();
    const F d = F(dipole_debye) * F("1e-21") / c;
    const F omega = 2 * pi * c / (F(wavelength_nm) * F("1e-9"));
    const F gamma = omega * omega * omega * d * d / (3 * pi * eps0 * hbar * c * c * c);
    return static_cast<double>(gamma * hbar / e * 1000);
}

} // namespace

TEST_CASE("coincidence limit of the free-space tensor") {
    const double e = units::energy_from_wavelength(660.0);
    const double k = units::wavenumber(e);
    const auto g = free_space_green(Vec3(1, 2, 3), Vec3(1, 2, 3), e);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(g(i, j).real() == 0.0);
            CHECK(g(i, j).imag() == doctest::Approx(i == j ? k / (6 * units::pi) : 0.0));
        }
}

namespace {

// Transverse and longitudinal tensor components evaluated with 50 significant digits.
std::pair<cd, cd> reference_components(double k, double r) {
    using F = boost::multiprecision::cpp_bin_float_50;
    const F kr = F(k) * F(r);
    const F pi = boost::math::constants::pi<F>();
    const F pre = 1 / (4 * pi * F(r));
    // a = 1 + i/x - 1/x^2, a + b = -2i/x + 2/x^2; multiply by exp(ix)
    const F cs = cos(kr), sn = sin(kr);
    const F a_re = 1 - 1 / (kr * kr), a_im = 1 / kr;
    const F l_re = 2 / (kr * kr), l_im = -2 / kr;
    const cd perp(static_cast<double>(pre * (cs * a_re - sn * a_im)), static_cast<double>(pre * (sn * a_re + cs * a_im)));
    const cd para(static_cast<double>(pre * (cs * l_re - sn * l_im)), static_cast<double>(pre * (sn * l_re + cs * l_im)));
    return {perp, para};
}

} // namespace

TEST_CASE("closed form against a 50-digit evaluation") {
    const double e = units::energy_from_wavelength(660.0);
    const double k = units::wavenumber(e);
    for (const double kr : {1.0, 0.3, 0.01, 3.0, 40.0}) {
        CAPTURE(kr);
        const double r = kr / k;
        const auto g = free_space_green(Vec3(0, 0, r), Vec3::Zero(), e);
        const auto [perp, para] = reference_components(k, r);
        CHECK(std::abs(g(0, 0).real() / perp.real() - 1.0) < 1e-13);
        CHECK(std::abs(g(0, 0).imag() / perp.imag() - 1.0) < 1e-13);
        CHECK(std::abs(g(2, 2).real() / para.real() - 1.0) < 1e-13);
        CHECK(std::abs(g(2, 2).imag() / para.imag() - 1.0) < 1e-13);
        CHECK(g(1, 1) == g(0, 0));
        CHECK(std::abs(g(0, 1)) < 1e-18);
        CHECK(std::abs(g(0, 2)) < 1e-18);
    }
}

TEST_CASE("near-field series and far-field asymptotics") {
    const double e = units::energy_from_wavelength(660.0);
    const double k = units::wavenumber(e);
    SUBCASE("kR = 1e-3: transverse part approaches (1/4piR)(-1/x^2 + 1/2 + 2ix/3)") {
        const double x = 1e-3, r = x / k;
        const cd g = free_space_green(Vec3(r, 0, 0), Vec3::Zero(), e)(1, 1);
        const double pre = 1.0 / (4 * units::pi * r);
        CHECK(std::abs(g.real() / pre - (-1.0 / (x * x) + 0.5)) < 1e-6);
        CHECK(std::abs(g.imag() / (pre * 2.0 * x / 3.0) - 1.0) < 1e-5);
    }
    SUBCASE("kR = 1e3: transverse magnitude 1/(4piR), longitudinal 2/(kR) of it") {
        const double x = 1e3, r = x / k;
        const auto g = free_space_green(Vec3(r, 0, 0), Vec3::Zero(), e);
        const double pre = 1.0 / (4 * units::pi * r);
        CHECK(std::abs(std::abs(g(1, 1)) / pre - 1.0) < 1e-3);
        CHECK(std::abs(std::abs(g(0, 0)) / pre * x / 2.0 - 1.0) < 1e-3);
    }
}

TEST_CASE("reciprocity G(r1, r2) = G(r2, r1)^T") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    const double e = units::energy_from_wavelength(820.0);
    for (int i = 0; i < 100; ++i) {
        const Vec3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng));
        const auto g1 = free_space_green(a, b, e);
        const auto g2 = free_space_green(b, a, e);
        CHECK((g1 - g2.transpose()).norm() <= 1e-12 * g1.norm());
    }
}

TEST_CASE("single-emitter vacuum rate") {
    for (const double lambda : {660.0, 820.0}) {
        Ensemble one;
        one.emitters.push_back({Vec3::Zero(), zdip, units::energy_from_wavelength(lambda)});
        const auto c = couplings_from_green(one, free_space_green);
        const double expected = vacuum_rate_si(lambda, 4.0);
        CHECK(std::abs(c.gamma(0, 0) / expected - 1.0) < 1e-10);
        CHECK(c.omega(0, 0) == 0.0);
    }
}

TEST_CASE("zero dipole gives zero couplings") {
    Ensemble one;
    one.emitters.push_back({Vec3::Zero(), CVec3::Zero(), 1878.7});
    const auto c = couplings_from_green(one, free_space_green);
    CHECK(c.gamma(0, 0) == 0.0);
    CHECK(c.omega(0, 0) == 0.0);
}

TEST_CASE("collapsing pair reaches the Dicke limit") {
    Ensemble two;
    two.emitters.push_back({Vec3::Zero(), zdip, 1878.7});
    two.emitters.push_back({Vec3(1e-6, 0, 0), zdip, 1878.7});
    const auto c = couplings_from_green(two, free_space_green);
    CHECK(std::abs(c.gamma(0, 1) / c.gamma(0, 0) - 1.0) < 1e-9);
}

TEST_CASE("translation invariance and PSD of free-space couplings") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        Ensemble ens;
        for (int s = 0; s < 6; ++s) ens.emitters.push_back({Vec3(u(rng), u(rng), u(rng)), CVec3(u(rng), u(rng), u(rng)), 1878.7});
        const Vec3 shift(u(rng), u(rng), u(rng));
        Ensemble moved = ens;
        for (auto& em : moved.emitters) em.position += shift;
        const auto a = couplings_from_green(ens, free_space_green);
        const auto b = couplings_from_green(moved, free_space_green);
        CHECK((a.gamma - b.gamma).cwiseAbs().maxCoeff() < 1e-10 * a.gamma.cwiseAbs().maxCoeff());
        CHECK((a.omega - b.omega).cwiseAbs().maxCoeff() < 1e-9 * a.omega.cwiseAbs().maxCoeff());
        CHECK(min_eigenvalue(a.gamma) >= -1e-10 * a.gamma.cwiseAbs().maxCoeff());
    }
}

namespace {

TabulatedGreen table_for(double lambda, double omega_self, double gamma_self) {
    const double energy = units::energy_from_wavelength(lambda);
    const double k = units::wavenumber(energy);
    const double d = 4.0 * units::debye_in_e_nm;
    const double pref = units::e2_over_eps0 * k * k * d * d;
    TabulatedGreen t;
    t.wavelength = lambda;
    t.radial = {0.0, 1.0, 2.0, 4.0};
    t.g_zz = {cd(3.0, 1.0) / pref, cd(2.0, 0.8) / pref, cd(1.0, 0.5) / pref, cd(0.2, 0.1) / pref};
    t.self_term = cd(omega_self, 0.5 * gamma_self) / pref;
    return t;
}

} // namespace

TEST_CASE("tabulated Green tensor") {
    const auto table = table_for(660.0, 15.0, 7.0);
    const double energy = units::energy_from_wavelength(660.0);

    SUBCASE("interpolation reproduces samples and is linear between them") {
        for (std::size_t i = 0; i < table.radial.size(); ++i) CHECK(interpolate(table, table.radial[i]) == table.g_zz[i]);
        CHECK(std::abs(interpolate(table, 1.5) - 0.5 * (table.g_zz[1] + table.g_zz[2])) < 1e-15);
        CHECK_THROWS_AS(interpolate(table, 4.5), std::out_of_range);
    }
    SUBCASE("self terms") {
        Ensemble one;
        one.emitters.push_back({Vec3::Zero(), zdip, energy});
        const auto c = load_tabulated_green(table, one);
        CHECK(c.omega(0, 0) == doctest::Approx(15.0).epsilon(1e-12));
        CHECK(c.gamma(0, 0) == doctest::Approx(7.0).epsilon(1e-12));
    }
    SUBCASE("pair at a sample distance") {
        Ensemble two;
        two.emitters.push_back({Vec3::Zero(), zdip, energy});
        two.emitters.push_back({Vec3(2.0, 0, 0), zdip, energy});
        const auto c = load_tabulated_green(table, two);
        const double k = units::wavenumber(energy);
        const double d = 4.0 * units::debye_in_e_nm;
        const double pref = units::e2_over_eps0 * k * k * d * d;
        const cd g = table.g_zz[2] + free_space_green(Vec3(2.0, 0, 0), Vec3::Zero(), energy)(2, 2);
        CHECK(c.omega(0, 1) == doctest::Approx(pref * g.real()).epsilon(1e-12));
        CHECK(c.gamma(0, 1) == doctest::Approx(2 * pref * g.imag()).epsilon(1e-12));
    }
    SUBCASE("radial symmetry") {
        Ensemble three;
        three.emitters.push_back({Vec3::Zero(), zdip, energy});
        three.emitters.push_back({Vec3(1.3, 0, 0), zdip, energy});
        three.emitters.push_back({Vec3(-1.3, 0, 0), zdip, energy});
        const auto c = load_tabulated_green(table, three);
        CHECK(c.omega(0, 1) == doctest::Approx(c.omega(0, 2)).epsilon(1e-14));
        CHECK(c.gamma(0, 1) == doctest::Approx(c.gamma(0, 2)).epsilon(1e-14));
    }
    SUBCASE("errors") {
        Ensemble tilted;
        tilted.emitters.push_back({Vec3::Zero(), CVec3(1, 0, 4), energy});
        CHECK_THROWS_AS(load_tabulated_green(table, tilted), UnsupportedGeometry);

        Ensemble far;
        far.emitters.push_back({Vec3::Zero(), zdip, energy});
        far.emitters.push_back({Vec3(5.0, 0, 0), zdip, energy});
        try {
            load_tabulated_green(table, far);
            FAIL("expected out_of_range");
        } catch (const std::out_of_range& err) {
            CHECK(std::string(err.what()).find("pair (") != std::string::npos);
        }

        Ensemble other;
        other.emitters.push_back({Vec3::Zero(), zdip, units::energy_from_wavelength(820.0)});
        CHECK_THROWS_AS(load_tabulated_green(table, other), std::invalid_argument);
    }
    SUBCASE("file format round trip") {
        const auto back = parse_tabulated_green(format_tabulated_green(table));
        CHECK(back.wavelength == table.wavelength);
        CHECK(back.radial == table.radial);
        CHECK(back.g_zz == table.g_zz);
        CHECK(back.self_term == table.self_term);
        CHECK_THROWS_AS(parse_tabulated_green(R"({"wavelength_nm": 660, "radial_nm": [0, 1], "g_zz_re": [1], "g_zz_im": [1, 2], "self_re": 0, "self_im": 0})"),
                        std::invalid_argument);
        CHECK_THROWS_AS(parse_tabulated_green(R"({"wavelength_nm": 660, "radial_nm": [0.5, 1], "g_zz_re": [1, 1], "g_zz_im": [1, 2], "self_re": 0, "self_im": 0})"),
                        std::invalid_argument);
    }
}

TEST_CASE("shipped tabulated data set loads") {
    const auto t = read_tabulated_green(std::string(NANOSR_DATA_DIR) + "/bqp_660nm_zz.json");
    CHECK(t.wavelength == 660.0);
    CHECK(t.radial.front() == 0.0);
}

TEST_CASE("synthetic plasmonic profile") {
    const PlasmonicProfile p = synthetic_plasmonic_profile(7.0, 15.0);
    const double energy = 1878.7;

    SUBCASE("shape") {
        CHECK(p.scattered(0.0).real() == 15.0);
        CHECK(p.scattered(0.0).imag() == 3.5);
        CHECK(2.0 * p.scattered(p.gamma_range).imag() == doctest::Approx(7.0 / std::exp(1.0)));
        CHECK_THROWS_AS(synthetic_plasmonic_profile(7.0, 15.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(synthetic_plasmonic_profile(7.0, 15.0, 10.0, 1.0, 2), std::invalid_argument);
    }
    SUBCASE("couplings of the nine-emitter square") {
        const auto ens = make_square_array(3, 1.0, Vec3::Zero(), zdip, energy);
        const auto c = couplings_from_green(ens, as_green_evaluator(p, 4.0));
        CHECK(c.omega(0, 0) == doctest::Approx(15.0));
        CHECK(c.gamma(0, 0) == doctest::Approx(7.0));
        CHECK(min_eigenvalue(c.gamma) >= 0.0);
        CHECK(std::abs(c.gamma(0, 1)) > std::abs(c.omega(0, 1)));
        CHECK(c.gamma(0, 1) == doctest::Approx(7.0 * std::exp(-0.1)));
        CHECK((c.omega - c.omega.transpose()).norm() == 0.0);
    }
    SUBCASE("free-space and scattered coherent parts partly cancel") {
        const double k = units::wavenumber(energy);
        const double d = 4.0 * units::debye_in_e_nm;
        const double pref = units::e2_over_eps0 * k * k * d * d;
        for (const double r : {1.0, 1.5, 1.9}) {
            const double scattered = p.scattered(r).real();
            const double free = pref * free_space_green(Vec3(r, 0, 0), Vec3::Zero(), energy)(2, 2).real();
            Ensemble two;
            two.emitters.push_back({Vec3::Zero(), zdip, energy});
            two.emitters.push_back({Vec3(r, 0, 0), zdip, energy});
            const double total = couplings_from_green(two, as_green_evaluator(p, 4.0)).omega(0, 1);
            CHECK(free < 0.0);
            CHECK(total == doctest::Approx(scattered + free));
            CHECK(std::abs(total) < std::abs(scattered));
            CHECK(std::abs(total) < std::abs(free));
        }
    }
}

TEST_CASE("uniform couplings") {
    const auto c = uniform_couplings(4, 7.0);
    CHECK(c.gamma.isApproxToConstant(7.0));
    CHECK(c.omega.isZero());
    CHECK(c.k_factors.isApproxToConstant(1.0));
}

TEST_CASE("propagation factors") {
    SUBCASE("constant mode") {
        const auto ens = make_square_array(3, 1.0, Vec3::Zero(), zdip, 1878.7);
        const auto k = propagation_factors(ens, ConstantPropagation{});
        CHECK(k.rows() == 9);
        CHECK(k.isApproxToConstant(1.0));
        Ensemble mixed = ens;
        mixed.emitters[3].dipole = CVec3(4.0, 0, 0);
        CHECK_THROWS_AS(propagation_factors(mixed, ConstantPropagation{}), UnsupportedGeometry);
    }
    SUBCASE("distant detector sees a nearly uniform matrix") {
        const CVec3 xdip(4.0, 0, 0);
        Ensemble two;
        two.emitters.push_back({Vec3::Zero(), xdip, 1878.7});
        two.emitters.push_back({Vec3(1.0, 0, 0), xdip, 1878.7});
        const auto k = propagation_factors(two, FreeSpaceDetector{Vec3(0, 0, 1e6)});
        CHECK(std::abs(k(0, 1) / k(0, 0) - 1.0) < 1e-4);
        CHECK((k - k.adjoint()).norm() < 1e-12 * k.norm());

        Ensemble one;
        one.emitters.push_back({Vec3::Zero(), xdip, 1878.7});
        const auto k1 = propagation_factors(one, FreeSpaceDetector{Vec3(0, 0, 1e6)});
        CHECK(k1(0, 0).real() > 0.0);
        CHECK(k1(0, 0).imag() == 0.0);
    }
}
