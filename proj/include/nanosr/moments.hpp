// moments.hpp: Tracked moments, cumulant closure and symbolic equations of motion

#pragma once

#include "nanosr/operators.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nanosr {

/// Reference to a tracked moment, possibly through complex conjugation.
struct MomentRef {
    std::uint32_t index = 0;
    bool conjugate = false;

    friend auto operator<=>(const MomentRef&, const MomentRef&) = default;
};

/// Ordered set of tracked expectation values.
///
/// Order 1: <s22_s>, <s12_s> for every site.
/// Order 2 adds, per pair s < s': <s21_s s12_s'>, <s22_s s22_s'>, <s22_s s12_s'>, <s12_s s22_s'>,
/// <s12_s s12_s'>. Every other one- or two-site product is the conjugate of a tracked one.
class MomentLayout {
public:
    MomentLayout(int n_sites, int order);

    int sites() const { return n_; }
    int order() const { return order_; }
    std::size_t size() const { return moments_.size(); }
    const std::vector<ops::OpProduct>& moments() const { return moments_; }
    const ops::OpProduct& operator[](std::size_t i) const { return moments_[i]; }

    std::uint32_t population(int s) const { return static_cast<std::uint32_t>(s); }
    std::uint32_t coherence(int s) const { return static_cast<std::uint32_t>(n_ + s); }

    /// Tracked representative of a one- or two-site product, if it exists in this layout.
    std::optional<MomentRef> find(const ops::OpProduct& p) const;

private:
    int n_;
    int order_;
    std::vector<ops::OpProduct> moments_;
    std::map<ops::OpProduct, std::uint32_t> index_;
};

/// coefficient * product of up to three moment references (no factors: a constant).
struct Monomial {
    ops::cd coefficient;
    std::vector<MomentRef> factors;
};

using Polynomial = std::vector<Monomial>;

/// Expresses an operator sum through tracked moments.
/// Order 1 factorises distinct sites; order 2 keeps two-site moments and replaces three-site
/// products by <abc> = <ab><c> + <ac><b> + <bc><a> - 2<a><b><c>.
Polynomial cumulant_close(const ops::OpSum& expr, const MomentLayout& layout);

/// Evaluates a polynomial on a moment vector.
ops::cd evaluate(const Polynomial& poly, const Eigen::VectorXcd& moments);

/// Named scalar parameter of the master equation. Pair symbols use s <= s'.
struct ParamSymbol {
    enum class Kind : std::uint8_t { detuning, drive_re, drive_im, coherent, dissipative };
    Kind kind = Kind::detuning;
    int s = 0;
    int s_prime = 0;

    friend auto operator<=>(const ParamSymbol&, const ParamSymbol&) = default;
};

std::string to_string(const ParamSymbol& p);

/// Unit generator of a parameter: Hamiltonian and dissipator entries multiplying it.
struct ParamGenerator {
    ops::OpSum hamiltonian;
    std::vector<ops::DissipatorEntry> dissipator;
};

ParamGenerator unit_generator(const ParamSymbol& p);

/// All parameters of an N-site system:
///   H = sum_s Delta_s s22_s - sum_ss' Omega_ss' s21_s s12_s' + sum_s (v_s s21_s + v_s^* s12_s)
/// in the frame rotating at the laser frequency, with the pairwise Gamma dissipator.
std::vector<ParamSymbol> all_parameters(int n_sites);

/// One symbolic right-hand-side contribution: param * coefficient * prod(factors).
struct SymbolicTerm {
    ParamSymbol param;
    ops::cd coefficient;
    std::vector<MomentRef> factors;
};

/// Closed moment equations, coefficients left symbolic (units: hbar d<o>/dt).
struct ODESystem {
    MomentLayout layout;
    std::vector<std::vector<SymbolicTerm>> rhs;  ///< one list per tracked moment

    int order() const { return layout.order(); }
};

ODESystem generate_ode_system(int n_sites, int order);

/// Plain-text listing of the generated equations.
std::string format_ode_system(const ODESystem& system);

} // namespace nanosr
