// operators.hpp: Symbolic algebra of site-indexed two-level operators
//
// Every product is kept in canonical form: factors sorted by site with at most
// one factor per site. Operators on different sites commute; same-site products
// are reduced with the projector table of a two-level system:
//
//   lower   = sigma^12 = |1><2|   (ground <- excited)
//   raise   = sigma^21 = |2><1|
//   project = sigma^22 = |2><2|

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace nanosr::ops {

using cd = std::complex<double>;

enum class OpKind : std::uint8_t { lower, raise, project };

struct OpSymbol {
    int site = 0;
    OpKind kind = OpKind::project;

    friend auto operator<=>(const OpSymbol&, const OpSymbol&) = default;
};

/// Canonically ordered product of single-site operators; empty means the identity.
struct OpProduct {
    std::vector<OpSymbol> factors;

    OpProduct() = default;
    explicit OpProduct(std::vector<OpSymbol> f);  // canonicalises; throws on repeated sites

    bool is_identity() const { return factors.empty(); }
    std::size_t order() const { return factors.size(); }

    friend auto operator<=>(const OpProduct&, const OpProduct&) = default;
};

/// Linear combination of canonical products with complex coefficients (zeros dropped).
class OpSum {
public:
    using Terms = std::map<OpProduct, cd>;

    OpSum() = default;
    OpSum(const OpProduct& p, cd coefficient = 1.0);  // NOLINT(google-explicit-constructor)
    static OpSum identity(cd coefficient = 1.0) { return OpSum(OpProduct{}, coefficient); }

    const Terms& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    cd coefficient(const OpProduct& p) const;

    void add(const OpProduct& p, cd coefficient);
    OpSum& operator+=(const OpSum& other);
    OpSum& operator-=(const OpSum& other);
    OpSum& operator*=(cd scale);

    friend OpSum operator+(OpSum a, const OpSum& b) { return a += b; }
    friend OpSum operator-(OpSum a, const OpSum& b) { return a -= b; }
    friend OpSum operator*(cd s, OpSum a) { return a *= s; }
    friend OpSum operator*(OpSum a, cd s) { return a *= s; }
    friend OpSum operator*(const OpSum& a, const OpSum& b);
    friend bool operator==(const OpSum&, const OpSum&) = default;

    /// Drops coefficients with |c| <= tol.
    void prune(double tol = 0.0);

private:
    Terms terms_;
};

// Single-operator shorthands.
inline OpSum lower(int site) { return OpProduct({{site, OpKind::lower}}); }
inline OpSum raise(int site) { return OpProduct({{site, OpKind::raise}}); }
inline OpSum project(int site) { return OpProduct({{site, OpKind::project}}); }

/// Same-site product a*b (a acting after b) as an OpSum over {1, lower, raise, project}.
OpSum reduce_onsite(const OpSymbol& a, const OpSymbol& b);

OpSum multiply(const OpSum& a, const OpSum& b);

OpSymbol adjoint(const OpSymbol& s);
OpProduct adjoint(const OpProduct& p);
OpSum adjoint(const OpSum& s);

inline OpSum commutator(const OpSum& a, const OpSum& b) { return a * b - b * a; }

bool is_hermitian(const OpSum& s, double tol = 1e-14);

/// Collection of sites an OpSum touches.
std::vector<int> support(const OpSum& s);

/// Pairwise dissipator channel: rate * (sigma^12_{to} rho sigma^21_{from}) structure of the
/// master equation, i.e. one (s, s', Gamma_ss') entry.
struct DissipatorEntry {
    int s = 0;
    int s_prime = 0;
    double rate = 0.0;
};

/// Generator of the Heisenberg-picture expectation dynamics in energy units (hbar = 1):
///   i[H, o] + sum_ss' Gamma_ss'/2 (2 s21_s o s12_s' - s21_s s12_s' o - o s21_s s12_s')
/// Divide by hbar (meV fs) to obtain d<o>/dt in 1/fs.
OpSum adjoint_eom(const OpProduct& o, const OpSum& hamiltonian, const std::vector<DissipatorEntry>& dissipator);

/// Same, with the dissipator given as a dense Gamma matrix. Throws if H is not Hermitian.
OpSum adjoint_eom(const OpProduct& o, const OpSum& hamiltonian, const Eigen::MatrixXd& gamma);

std::string to_string(const OpSymbol& s);
std::string to_string(const OpProduct& p);
std::string to_string(const OpSum& s);
std::ostream& operator<<(std::ostream& os, const OpSum& s);

} // namespace nanosr::ops
