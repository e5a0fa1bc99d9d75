#include "nanosr/moments.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace nanosr {

using ops::OpKind;
using ops::OpProduct;
using ops::OpSum;
using ops::OpSymbol;

MomentLayout::MomentLayout(int n_sites, int order) : n_(n_sites), order_(order) {
    if (n_sites < 1) {
        throw std::invalid_argument("MomentLayout: need at least one site");
    }
    if (order != 1 && order != 2) {
        throw std::invalid_argument("MomentLayout: order must be 1 or 2");
    }
    for (int s = 0; s < n_; ++s) {
        moments_.push_back(OpProduct({{s, OpKind::project}}));
    }
    for (int s = 0; s < n_; ++s) {
        moments_.push_back(OpProduct({{s, OpKind::lower}}));
    }
    if (order_ == 2) {
        for (int s = 0; s < n_; ++s) {
            for (int t = s + 1; t < n_; ++t) {
                moments_.push_back(OpProduct({{s, OpKind::raise}, {t, OpKind::lower}}));
                moments_.push_back(OpProduct({{s, OpKind::project}, {t, OpKind::project}}));
                moments_.push_back(OpProduct({{s, OpKind::project}, {t, OpKind::lower}}));
                moments_.push_back(OpProduct({{s, OpKind::lower}, {t, OpKind::project}}));
                moments_.push_back(OpProduct({{s, OpKind::lower}, {t, OpKind::lower}}));
            }
        }
    }
    for (std::size_t i = 0; i < moments_.size(); ++i) {
        index_.emplace(moments_[i], static_cast<std::uint32_t>(i));
    }
}

std::optional<MomentRef> MomentLayout::find(const OpProduct& p) const {
    if (auto it = index_.find(p); it != index_.end()) {
        return MomentRef{it->second, false};
    }
    if (auto it = index_.find(ops::adjoint(p)); it != index_.end()) {
        return MomentRef{it->second, true};
    }
    return std::nullopt;
}

namespace {

MomentRef require(const MomentLayout& layout, const OpProduct& p) {
    auto ref = layout.find(p);
    if (!ref) {
        throw std::logic_error("cumulant_close: no tracked moment for " + ops::to_string(p));
    }
    return *ref;
}

MomentRef single(const MomentLayout& layout, const OpSymbol& a) {
    return require(layout, OpProduct({a}));
}

MomentRef pair(const MomentLayout& layout, const OpSymbol& a, const OpSymbol& b) {
    return require(layout, OpProduct({a, b}));
}

void push(Polynomial& poly, ops::cd c, std::vector<MomentRef> f) {
    std::sort(f.begin(), f.end());
    poly.push_back({c, std::move(f)});
}

} // namespace

Polynomial cumulant_close(const OpSum& expr, const MomentLayout& layout) {
    Polynomial poly;
    for (const auto& [p, c] : expr.terms()) {
        const auto& f = p.factors;
        switch (f.size()) {
        case 0:
            push(poly, c, {});
            break;
        case 1:
            push(poly, c, {single(layout, f[0])});
            break;
        case 2:
            if (layout.order() == 2) {
                push(poly, c, {pair(layout, f[0], f[1])});
            } else {
                push(poly, c, {single(layout, f[0]), single(layout, f[1])});
            }
            break;
        case 3: {
            const auto a = single(layout, f[0]);
            const auto b = single(layout, f[1]);
            const auto d = single(layout, f[2]);
            if (layout.order() == 1) {
                push(poly, c, {a, b, d});
                break;
            }
            push(poly, c, {pair(layout, f[0], f[1]), d});
            push(poly, c, {pair(layout, f[0], f[2]), b});
            push(poly, c, {pair(layout, f[1], f[2]), a});
            push(poly, -2.0 * c, {a, b, d});
            break;
        }
        default:
            throw std::logic_error("cumulant_close: products over more than three sites are unsupported");
        }
    }
    return poly;
}

ops::cd evaluate(const Polynomial& poly, const Eigen::VectorXcd& moments) {
    ops::cd sum{};
    for (const auto& m : poly) {
        ops::cd v = m.coefficient;
        for (const auto& r : m.factors) {
            const ops::cd x = moments[r.index];
            v *= r.conjugate ? std::conj(x) : x;
        }
        sum += v;
    }
    return sum;
}

std::string to_string(const ParamSymbol& p) {
    using K = ParamSymbol::Kind;
    const auto s = std::to_string(p.s);
    const auto t = std::to_string(p.s_prime);
    switch (p.kind) {
    case K::detuning: return "Delta_" + s;
    case K::drive_re: return "Re(v_" + s + ")";
    case K::drive_im: return "Im(v_" + s + ")";
    case K::coherent: return "Omega_" + s + "," + t;
    case K::dissipative: return "Gamma_" + s + "," + t;
    }
    return "?";
}

ParamGenerator unit_generator(const ParamSymbol& p) {
    using K = ParamSymbol::Kind;
    const ops::cd i(0.0, 1.0);
    ParamGenerator g;
    switch (p.kind) {
    case K::detuning:
        g.hamiltonian = ops::project(p.s);
        break;
    case K::drive_re:
        g.hamiltonian = ops::raise(p.s) + ops::lower(p.s);
        break;
    case K::drive_im:
        g.hamiltonian = i * ops::raise(p.s) - i * ops::lower(p.s);
        break;
    case K::coherent:
        if (p.s == p.s_prime) {
            g.hamiltonian = -1.0 * ops::project(p.s);
        } else {
            g.hamiltonian = -1.0 * (ops::raise(p.s) * ops::lower(p.s_prime) +
                                    ops::raise(p.s_prime) * ops::lower(p.s));
        }
        break;
    case K::dissipative:
        g.dissipator.push_back({p.s, p.s_prime, 1.0});
        if (p.s != p.s_prime) {
            g.dissipator.push_back({p.s_prime, p.s, 1.0});
        }
        break;
    }
    return g;
}

std::vector<ParamSymbol> all_parameters(int n_sites) {
    using K = ParamSymbol::Kind;
    std::vector<ParamSymbol> out;
    for (int s = 0; s < n_sites; ++s) {
        out.push_back({K::detuning, s, s});
        out.push_back({K::drive_re, s, s});
        out.push_back({K::drive_im, s, s});
    }
    for (int s = 0; s < n_sites; ++s) {
        for (int t = s; t < n_sites; ++t) {
            out.push_back({K::coherent, s, t});
            out.push_back({K::dissipative, s, t});
        }
    }
    return out;
}

ODESystem generate_ode_system(int n_sites, int order) {
    ODESystem sys{MomentLayout(n_sites, order), {}};
    const auto params = all_parameters(n_sites);
    std::vector<ParamGenerator> generators;
    generators.reserve(params.size());
    for (const auto& p : params) {
        generators.push_back(unit_generator(p));
    }

    sys.rhs.resize(sys.layout.size());
    for (std::size_t m = 0; m < sys.layout.size(); ++m) {
        const OpProduct& o = sys.layout[m];
        for (std::size_t k = 0; k < params.size(); ++k) {
            const auto& p = params[k];
            const bool touches = std::any_of(o.factors.begin(), o.factors.end(), [&](const OpSymbol& f) {
                return f.site == p.s || f.site == p.s_prime;
            });
            if (!touches) {
                continue;
            }
            const OpSum d = ops::adjoint_eom(o, generators[k].hamiltonian, generators[k].dissipator);
            for (auto& mono : cumulant_close(d, sys.layout)) {
                sys.rhs[m].push_back({p, mono.coefficient, std::move(mono.factors)});
            }
        }
    }
    return sys;
}

namespace {

std::string format_ref(const MomentLayout& layout, const MomentRef& r) {
    const std::string body = "<" + ops::to_string(layout[r.index]) + ">";
    return r.conjugate ? "conj" + body : body;
}

std::string format_coefficient(ops::cd c) {
    const double re = c.real() == 0.0 ? 0.0 : c.real();
    const double im = c.imag() == 0.0 ? 0.0 : c.imag();
    std::ostringstream os;
    os << std::setprecision(12);
    if (im == 0.0) {
        os << re;
    } else if (re == 0.0) {
        os << im << "i";
    } else {
        os << "(" << re << (im < 0.0 ? "" : "+") << im << "i)";
    }
    return os.str();
}

} // namespace

std::string format_ode_system(const ODESystem& system) {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "# N = " << system.layout.sites() << ", order = " << system.order() << ", "
       << system.layout.size() << " tracked moments\n";
    os << "# hbar d<o>/dt = sum param * coefficient * moments\n";
    for (std::size_t m = 0; m < system.layout.size(); ++m) {
        os << "d<" << ops::to_string(system.layout[m]) << ">/dt =";
        if (system.rhs[m].empty()) {
            os << " 0";
        }
        for (const auto& t : system.rhs[m]) {
            os << "\n    " << to_string(t.param) << " * " << format_coefficient(t.coefficient);
            for (const auto& f : t.factors) {
                os << " * " << format_ref(system.layout, f);
            }
        }
        os << "\n";
    }
    return os.str();
}

} // namespace nanosr
