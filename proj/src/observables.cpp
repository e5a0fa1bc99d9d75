#include "nanosr/observables.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nanosr {

namespace {

using cd = std::complex<double>;
using ops::OpKind;

cd value(const Eigen::VectorXcd& v, const MomentRef& r) {
    const cd x = v[r.index];
    return r.conjugate ? std::conj(x) : x;
}

} // namespace

MomentTable moment_reductions(const MomentLayout& layout, const Eigen::VectorXcd& values) {
    if (values.size() != static_cast<Eigen::Index>(layout.size())) {
        throw std::invalid_argument("moment_reductions: state does not match layout");
    }
    const int n = layout.sites();
    MomentTable t;
    t.P.resize(n);
    t.C.resize(n);
    for (int s = 0; s < n; ++s) {
        t.P[s] = values[layout.population(s)].real();
        t.C[s] = values[layout.coherence(s)];
    }
    t.G = Eigen::MatrixXcd::Zero(n, n);
    t.Z = Eigen::MatrixXd::Zero(n, n);
    t.W = Eigen::MatrixXcd::Zero(n, n);
    t.L = Eigen::MatrixXcd::Zero(n, n);

    auto pair = [&](int s, OpKind a, int u, OpKind b) -> cd {
        const ops::OpProduct p({{s, a}, {u, b}});
        if (layout.order() == 2) {
            return value(values, *layout.find(p));
        }
        auto one = [&](int site, OpKind k) {
            return value(values, *layout.find(ops::OpProduct({{site, k}})));
        };
        return one(s, a) * one(u, b);
    };

    for (int s = 0; s < n; ++s) {
        t.G(s, s) = t.P[s];
        t.Z(s, s) = t.P[s];
        for (int u = 0; u < n; ++u) {
            if (u == s) continue;
            t.G(s, u) = pair(s, OpKind::raise, u, OpKind::lower);
            t.Z(s, u) = pair(s, OpKind::project, u, OpKind::project).real();
            t.W(s, u) = pair(s, OpKind::project, u, OpKind::lower);
            t.L(s, u) = pair(s, OpKind::lower, u, OpKind::lower);
        }
    }
    return t;
}

std::complex<double> MomentTable::expectation(const ops::OpProduct& p) const {
    auto one = [&](const ops::OpSymbol& f) -> cd {
        switch (f.kind) {
        case OpKind::project: return P[f.site];
        case OpKind::lower: return C[f.site];
        case OpKind::raise: return std::conj(C[f.site]);
        }
        return {};
    };
    switch (p.factors.size()) {
    case 0: return 1.0;
    case 1: return one(p.factors[0]);
    case 2: break;
    default: throw std::invalid_argument("MomentTable::expectation: more than two sites");
    }
    const auto [s, a] = std::pair{p.factors[0].site, p.factors[0].kind};
    const auto [u, b] = std::pair{p.factors[1].site, p.factors[1].kind};
    // Different sites commute: <x_s y_u> for every kind combination.
    if (a == OpKind::raise && b == OpKind::lower) return G(s, u);
    if (a == OpKind::lower && b == OpKind::raise) return G(u, s);
    if (a == OpKind::project && b == OpKind::project) return Z(s, u);
    if (a == OpKind::project && b == OpKind::lower) return W(s, u);
    if (a == OpKind::lower && b == OpKind::project) return W(u, s);
    if (a == OpKind::project && b == OpKind::raise) return std::conj(W(s, u));
    if (a == OpKind::raise && b == OpKind::project) return std::conj(W(u, s));
    if (a == OpKind::lower && b == OpKind::lower) return L(s, u);
    return std::conj(L(s, u));  // raise, raise
}

std::complex<double> MomentTable::expectation(const ops::OpSum& s) const {
    cd sum{};
    for (const auto& [p, c] : s.terms()) {
        sum += c * expectation(p);
    }
    return sum;
}

RadiationSample radiation(const MomentTable& table, const Eigen::MatrixXcd& k) {
    const Eigen::Index n = table.sites();
    if (k.rows() != n || k.cols() != n) {
        throw std::invalid_argument("far_field_intensity: propagation matrix dimension does not match N");
    }
    RadiationSample r;
    for (Eigen::Index s = 0; s < n; ++s) {
        r.individual += (k(s, s) * table.P[s]).real();
        for (Eigen::Index u = 0; u < n; ++u) {
            if (u != s) {
                r.interference += (k(s, u) * table.G(u, s)).real();
            }
        }
    }
    r.total = r.individual + r.interference;
    return r;
}

RadiationSeries far_field_intensity(const Trajectory& traj, const Eigen::MatrixXcd& k) {
    RadiationSeries out;
    out.times = traj.times;
    for (const auto& state : traj.states) {
        const auto r = radiation(moment_reductions(*traj.layout, state), k);
        out.total.push_back(r.total);
        out.individual.push_back(r.individual);
        out.interference.push_back(r.interference);
    }
    return out;
}

SpinSample collective_spin(const MomentTable& t) {
    const Eigen::Index n = t.sites();
    SpinSample out;
    out.A.x() = t.C.real().sum();
    out.A.y() = -t.C.imag().sum();  // (i/2) sum (<s12> - <s21>)
    out.A.z() = t.P.sum() - 0.5 * static_cast<double>(n);

    auto lr = [&](Eigen::Index s, Eigen::Index u) -> cd {  // <s12_s s21_u>
        return s == u ? cd(1.0 - t.P[s]) : t.G(u, s);
    };
    double jx2 = 0.0, jy2 = 0.0, jz2 = 0.0;
    for (Eigen::Index s = 0; s < n; ++s) {
        for (Eigen::Index u = 0; u < n; ++u) {
            const cd ll = t.L(s, u);
            const cd rr = std::conj(t.L(s, u));
            const cd rl = t.G(s, u);
            jx2 += 0.25 * (ll + lr(s, u) + rl + rr).real();
            jy2 += -0.25 * (ll - lr(s, u) - rl + rr).real();
            jz2 += 0.25 * (4.0 * t.Z(s, u) - 2.0 * (t.P[s] + t.P[u]) + 1.0);
        }
    }
    out.j_squared = jx2 + jy2 + jz2;
    double sq = out.j_squared;
    if (sq < 0.0) {
        out.clamped = sq < -1e-8;
        sq = 0.0;
    }
    out.J_bar = 0.5 * (std::sqrt(1.0 + 4.0 * sq) - 1.0);
    out.M_bar = out.A.z();
    return out;
}

SpinSeries collective_spin(const Trajectory& traj) {
    SpinSeries out;
    out.times = traj.times;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto s = collective_spin(moment_reductions(*traj.layout, traj.states[i]));
        out.A.push_back(s.A);
        out.J_bar.push_back(s.J_bar);
        out.M_bar.push_back(s.M_bar);
        if (s.clamped) {
            std::ostringstream os;
            os << "negative sum <J_i^2> = " << s.j_squared << " at t = " << traj.times[i] << " fs, clamped to 0";
            out.warnings.push_back(os.str());
        }
    }
    return out;
}

double gram_min_eigenvalue(const MomentTable& table) {
    if (table.sites() == 0) {
        return 0.0;
    }
    const Eigen::MatrixXcd herm = 0.5 * (table.G + table.G.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace nanosr
