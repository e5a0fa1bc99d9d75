#include "nanosr/green.hpp"

#include "nanosr/errors.hpp"
#include "nanosr/units.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nanosr {

namespace {

using cd = std::complex<double>;

CVec3 to_e_nm(const CVec3& debye) { return debye * units::debye_in_e_nm; }

// (e^2/eps0) k^2, the factor turning d.G.d (e^2 nm^2 / nm) into meV.
double coupling_prefactor(double energy) {
    const double k = units::wavenumber(energy);
    return units::e2_over_eps0 * k * k;
}

void check_psd(const Eigen::MatrixXd& gamma) {
    if (!is_positive_semidefinite(gamma)) {
        std::ostringstream os;
        os << "dissipative matrix not PSD: most negative eigenvalue " << min_eigenvalue(gamma)
           << " meV";
        throw NotPositiveSemidefinite(os.str());
    }
}

bool is_parallel(const CVec3& a, const CVec3& b) {
    return a.cross(b).norm() <= 1e-12 * a.norm() * b.norm();
}

} // namespace

GreenTensor free_space_green(const Vec3& r1, const Vec3& r2, double energy) {
    return free_space_green_k<double>(r1 - r2, units::wavenumber(energy));
}

double coupling_energy(const Ensemble& ensemble) {
    if (ensemble.size() == 0) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& e : ensemble.emitters) {
        sum += e.transition_energy;
    }
    return sum / static_cast<double>(ensemble.size());
}

CouplingSet couplings_from_green(const Ensemble& ensemble, const GreenEvaluator& green) {
    const auto n = static_cast<Eigen::Index>(ensemble.size());
    const double energy = coupling_energy(ensemble);
    const double pref = coupling_prefactor(energy);

    CouplingSet c;
    c.omega = Eigen::MatrixXd::Zero(n, n);
    c.gamma = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index s = 0; s < n; ++s) {
        const CVec3 ds = to_e_nm(ensemble[s].dipole);
        for (Eigen::Index t = s; t < n; ++t) {
            const CVec3 dt = to_e_nm(ensemble[t].dipole);
            const GreenTensor g = green(ensemble[s].position, ensemble[t].position, energy);
            const cd re = ds.dot(g.real().cast<cd>() * dt);  // dot() conjugates its left operand
            const cd im = ds.dot(g.imag().cast<cd>() * dt);
            c.omega(s, t) = c.omega(t, s) = pref * re.real();
            c.gamma(s, t) = c.gamma(t, s) = 2.0 * pref * im.real();
        }
    }
    check_psd(c.gamma);
    return c;
}

TabulatedGreen parse_tabulated_green(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    TabulatedGreen t;
    t.wavelength = j.at("wavelength_nm").get<double>();
    t.radial = j.at("radial_nm").get<std::vector<double>>();
    const auto re = j.at("g_zz_re").get<std::vector<double>>();
    const auto im = j.at("g_zz_im").get<std::vector<double>>();
    if (re.size() != t.radial.size() || im.size() != t.radial.size()) {
        throw std::invalid_argument("tabulated Green: radial_nm, g_zz_re, g_zz_im must have equal length");
    }
    for (std::size_t i = 0; i < re.size(); ++i) {
        t.g_zz.emplace_back(re[i], im[i]);
    }
    t.self_term = {j.at("self_re").get<double>(), j.at("self_im").get<double>()};

    if (t.radial.size() < 2) {
        throw std::invalid_argument("tabulated Green: need at least two radial samples");
    }
    if (t.radial.front() != 0.0) {
        throw std::invalid_argument("tabulated Green: radial samples must start at 0");
    }
    for (std::size_t i = 1; i < t.radial.size(); ++i) {
        if (!(t.radial[i] > t.radial[i - 1])) {
            throw std::invalid_argument("tabulated Green: radial samples must be strictly ascending");
        }
    }
    if (!(t.wavelength > 0.0)) {
        throw std::invalid_argument("tabulated Green: wavelength must be positive");
    }
    return t;
}

TabulatedGreen read_tabulated_green(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("tabulated Green: cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_tabulated_green(ss.str());
}

std::string format_tabulated_green(const TabulatedGreen& table) {
    nlohmann::json j;
    j["wavelength_nm"] = table.wavelength;
    j["radial_nm"] = table.radial;
    std::vector<double> re, im;
    for (const auto& g : table.g_zz) {
        re.push_back(g.real());
        im.push_back(g.imag());
    }
    j["g_zz_re"] = re;
    j["g_zz_im"] = im;
    j["self_re"] = table.self_term.real();
    j["self_im"] = table.self_term.imag();
    return j.dump(2);
}

std::complex<double> interpolate(const TabulatedGreen& table, double r) {
    const auto& x = table.radial;
    if (r < 0.0 || r > x.back()) {
        std::ostringstream os;
        os << "distance " << r << " nm outside tabulated range [0, " << x.back() << "]";
        throw std::out_of_range(os.str());
    }
    auto hi = std::upper_bound(x.begin(), x.end(), r);
    if (hi == x.end()) {
        return table.g_zz.back();
    }
    const auto i1 = static_cast<std::size_t>(hi - x.begin());
    const auto i0 = i1 - 1;
    const double w = (r - x[i0]) / (x[i1] - x[i0]);
    return (1.0 - w) * table.g_zz[i0] + w * table.g_zz[i1];
}

CouplingSet load_tabulated_green(const TabulatedGreen& table, const Ensemble& ensemble) {
    const auto n = ensemble.size();
    if (n == 0) {
        return {Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 0), {}};
    }
    const double energy = coupling_energy(ensemble);
    const double table_energy = units::energy_from_wavelength(table.wavelength);
    if (std::abs(table_energy - energy) > 0.01 * energy) {
        throw std::invalid_argument("tabulated Green: table wavelength does not match the emitter transition");
    }
    const double z0 = ensemble[0].position.z();
    for (std::size_t s = 0; s < n; ++s) {
        const auto& d = ensemble[s].dipole;
        if (std::abs(d.x()) > 1e-12 * d.norm() || std::abs(d.y()) > 1e-12 * d.norm()) {
            throw UnsupportedGeometry("tabulated Green: emitter " + std::to_string(s) +
                                      " has a non-vertical dipole (zz-only data)");
        }
        if (std::abs(ensemble[s].position.z() - z0) > 1e-9) {
            throw UnsupportedGeometry("tabulated Green: emitters must be coplanar in the gap plane");
        }
    }

    // zz-only scattered tensor: G = g zz^T
    const GreenEvaluator scattered_plus_free = [&](const Vec3& r1, const Vec3& r2, double e) {
        GreenTensor g = GreenTensor::Zero();
        const double r = (r1 - r2).norm();
        if (r == 0.0) {
            g(2, 2) = table.self_term;
            return g;
        }
        try {
            g(2, 2) = interpolate(table, r);
        } catch (const std::out_of_range& err) {
            std::size_t a = 0, b = 0;
            for (std::size_t s = 0; s < n; ++s) {
                if (ensemble[s].position == r1) a = s;
                if (ensemble[s].position == r2) b = s;
            }
            throw std::out_of_range("tabulated Green: pair (" + std::to_string(a) + ", " +
                                    std::to_string(b) + "): " + err.what());
        }
        return GreenTensor(g + free_space_green(r1, r2, e));
    };
    return couplings_from_green(ensemble, scattered_plus_free);
}

PlasmonicProfile synthetic_plasmonic_profile(double gamma_self, double omega_self, double gamma_range,
                                             double omega_range, int omega_sign) {
    if (!(gamma_range > 0.0) || !(omega_range > 0.0)) {
        throw std::invalid_argument("synthetic profile: ranges must be positive");
    }
    if (omega_sign != 1 && omega_sign != -1) {
        throw std::invalid_argument("synthetic profile: omega_sign must be +1 or -1");
    }
    return {gamma_self, omega_self, gamma_range, omega_range, omega_sign};
}

GreenEvaluator as_green_evaluator(const PlasmonicProfile& profile, double dipole_debye) {
    const double d = dipole_debye * units::debye_in_e_nm;
    return [profile, d](const Vec3& r1, const Vec3& r2, double energy) {
        const double r = (r1 - r2).norm();
        GreenTensor g = GreenTensor::Zero();
        g(2, 2) = profile.scattered(r) / (coupling_prefactor(energy) * d * d);
        if (r > 0.0) {
            g += free_space_green(r1, r2, energy).real().cast<cd>();
        }
        return g;
    };
}

CouplingSet uniform_couplings(std::size_t n, double gamma) {
    const auto m = static_cast<Eigen::Index>(n);
    return {Eigen::MatrixXd::Zero(m, m), Eigen::MatrixXd::Constant(m, m, gamma),
            Eigen::MatrixXcd::Ones(m, m)};
}

Eigen::MatrixXcd propagation_factors(const Ensemble& ensemble, const PropagationMode& mode) {
    const auto n = static_cast<Eigen::Index>(ensemble.size());
    if (std::holds_alternative<ConstantPropagation>(mode)) {
        for (Eigen::Index s = 1; s < n; ++s) {
            if (!is_parallel(ensemble[0].dipole, ensemble[s].dipole)) {
                throw UnsupportedGeometry("constant propagation factors require parallel dipoles");
            }
        }
        return Eigen::MatrixXcd::Ones(n, n);
    }

    const Vec3 det = std::get<FreeSpaceDetector>(mode).detector;
    const double energy = coupling_energy(ensemble);
    const double k = units::wavenumber(energy);
    // Common factor c/(4 pi^2 eps0) in meV-nm-fs units; results are arbitrary units anyway.
    const double pref = det.squaredNorm() * units::c * units::e2_over_eps0 / (4.0 * units::pi * units::pi);

    std::vector<CVec3> u(static_cast<std::size_t>(n));
    for (Eigen::Index s = 0; s < n; ++s) {
        const GreenTensor g = free_space_green(det, ensemble[s].position, energy);
        u[s] = k * k * (g * to_e_nm(ensemble[s].dipole).conjugate());
    }
    Eigen::MatrixXcd kf(n, n);
    for (Eigen::Index s = 0; s < n; ++s) {
        for (Eigen::Index t = 0; t < n; ++t) {
            // [G^*(r, r_t) d_t] . [G(r, r_s) d_s^*]
            kf(s, t) = pref * u[t].dot(u[s]);
        }
    }
    return kf;
}

} // namespace nanosr
