// oracle.hpp: Dense reference constructions used only by the tests
//
// Operators are built by explicit Kronecker products (site 0 is the least
// significant factor) and the master equation is applied in its textbook form.
// Nothing here goes through the library's sparse or symbolic paths.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <random>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// meV fs from the SI values, kept independent of units.hpp
inline constexpr double hbar = 1.054571817e-34 / 1.602176634e-19 * 1e18;

// Single-site matrices in the basis {|1> (ground), |2> (excited)}.
inline Mat s12() { Mat m = Mat::Zero(2, 2); m(0, 1) = 1.0; return m; }  // |1><2|
inline Mat s21() { Mat m = Mat::Zero(2, 2); m(1, 0) = 1.0; return m; }  // |2><1|
inline Mat s22() { Mat m = Mat::Zero(2, 2); m(1, 1) = 1.0; return m; }
inline Mat id2() { return Mat::Identity(2, 2); }

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Embeds a single-site matrix at `site` in an n-site register.
inline Mat embed(const Mat& op, int site, int n) {
    Mat out = Mat::Identity(1, 1);
    for (int s = n - 1; s >= 0; --s) {
        out = kron(out, s == site ? op : id2());
    }
    return out;
}

inline Mat lower(int s, int n) { return embed(s12(), s, n); }
inline Mat raise(int s, int n) { return embed(s21(), s, n); }
inline Mat proj(int s, int n) { return embed(s22(), s, n); }

struct Model {
    int n = 0;
    Eigen::VectorXd detuning;     // meV
    Eigen::VectorXcd drive;       // meV
    Eigen::MatrixXd omega;        // meV
    Eigen::MatrixXd gamma;        // meV
};

inline Mat hamiltonian(const Model& m, double envelope = 1.0) {
    const Eigen::Index dim = Eigen::Index(1) << m.n;
    Mat h = Mat::Zero(dim, dim);
    for (int s = 0; s < m.n; ++s) {
        h += m.detuning[s] * proj(s, m.n);
        h += envelope * (m.drive[s] * raise(s, m.n) + std::conj(m.drive[s]) * lower(s, m.n));
        for (int t = 0; t < m.n; ++t) {
            h -= m.omega(s, t) * raise(s, m.n) * lower(t, m.n);
        }
    }
    return h;
}

/// d rho / dt in 1/fs.
inline Mat liouvillian(const Model& m, const Mat& rho, double envelope = 1.0) {
    const Mat h = hamiltonian(m, envelope);
    Mat out = cd(0.0, -1.0) * (h * rho - rho * h);
    for (int s = 0; s < m.n; ++s) {
        for (int t = 0; t < m.n; ++t) {
            const Mat up = raise(s, m.n), down = lower(t, m.n);
            out += 0.5 * m.gamma(s, t) * (2.0 * down * rho * up - up * down * rho - rho * up * down);
        }
    }
    return out / hbar;
}

/// Heisenberg-picture generator applied to an observable, 1/fs.
inline Mat adjoint_liouvillian(const Model& m, const Mat& o, double envelope = 1.0) {
    const Mat h = hamiltonian(m, envelope);
    Mat out = cd(0.0, 1.0) * (h * o - o * h);
    for (int s = 0; s < m.n; ++s) {
        for (int t = 0; t < m.n; ++t) {
            const Mat up = raise(s, m.n), down = lower(t, m.n);
            out += 0.5 * m.gamma(s, t) * (2.0 * up * o * down - up * down * o - o * up * down);
        }
    }
    return out / hbar;
}

/// Random density matrix (full rank, correlated) from a Ginibre matrix.
inline Mat random_density(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    const Eigen::Index dim = Eigen::Index(1) << n;
    Mat a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = cd(g(rng), g(rng));
    Mat rho = a * a.adjoint();
    return rho / rho.trace();
}

/// Random single-site density matrix.
inline Mat random_qubit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Mat a(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = cd(g(rng), g(rng));
    Mat r = a * a.adjoint();
    return r / r.trace();
}

inline Mat product_density(const std::vector<Mat>& sites) {
    Mat out = Mat::Identity(1, 1);
    for (int s = static_cast<int>(sites.size()) - 1; s >= 0; --s) out = kron(out, sites[s]);
    return out;
}

inline cd expect(const Mat& rho, const Mat& o) { return (rho * o).trace(); }

/// Random model with symmetric Omega and PSD Gamma.
inline Model random_model(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Model m;
    m.n = n;
    m.detuning.resize(n);
    m.drive.resize(n);
    for (int s = 0; s < n; ++s) {
        m.detuning[s] = 20.0 * u(rng);
        m.drive[s] = cd(30.0 * u(rng), 30.0 * u(rng));
    }
    Eigen::MatrixXd a(n, n), b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a(i, j) = u(rng);
            b(i, j) = u(rng);
        }
    m.omega = 10.0 * (a + a.transpose());
    m.gamma = 5.0 * b * b.transpose();
    return m;
}

} // namespace oracle
