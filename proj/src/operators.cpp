#include "nanosr/operators.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nanosr::ops {

OpProduct::OpProduct(std::vector<OpSymbol> f) : factors(std::move(f)) {
    std::sort(factors.begin(), factors.end());
    for (std::size_t i = 1; i < factors.size(); ++i) {
        if (factors[i].site == factors[i - 1].site) {
            throw std::invalid_argument("OpProduct: repeated site; multiply OpSums instead");
        }
    }
}

OpSum::OpSum(const OpProduct& p, cd coefficient) {
    add(p, coefficient);
}

cd OpSum::coefficient(const OpProduct& p) const {
    auto it = terms_.find(p);
    return it == terms_.end() ? cd{} : it->second;
}

void OpSum::add(const OpProduct& p, cd coefficient) {
    if (coefficient == cd{}) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(p, coefficient);
    if (!inserted) {
        it->second += coefficient;
        if (it->second == cd{}) {
            terms_.erase(it);
        }
    }
}

OpSum& OpSum::operator+=(const OpSum& other) {
    for (const auto& [p, c] : other.terms_) {
        add(p, c);
    }
    return *this;
}

OpSum& OpSum::operator-=(const OpSum& other) {
    for (const auto& [p, c] : other.terms_) {
        add(p, -c);
    }
    return *this;
}

OpSum& OpSum::operator*=(cd scale) {
    if (scale == cd{}) {
        terms_.clear();
        return *this;
    }
    for (auto& [p, c] : terms_) {
        c *= scale;
    }
    return *this;
}

void OpSum::prune(double tol) {
    std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

OpSum reduce_onsite(const OpSymbol& a, const OpSymbol& b) {
    if (a.site != b.site) {
        throw std::invalid_argument("reduce_onsite: operators act on different sites");
    }
    const int s = a.site;
    using K = OpKind;
    switch (a.kind) {
    case K::lower:
        switch (b.kind) {
        case K::lower: return {};
        case K::raise: return OpSum::identity() - project(s);  // |1><2|2><1| = |1><1|
        case K::project: return lower(s);
        }
        break;
    case K::raise:
        switch (b.kind) {
        case K::lower: return project(s);
        case K::raise: return {};
        case K::project: return {};
        }
        break;
    case K::project:
        switch (b.kind) {
        case K::lower: return {};
        case K::raise: return raise(s);
        case K::project: return project(s);
        }
        break;
    }
    return {};
}

namespace {

// Product of two canonical products: walk both site-sorted lists, reducing shared sites.
OpSum multiply_products(const OpProduct& a, const OpProduct& b) {
    // Accumulate as a list of (factors, coefficient) partial products.
    std::vector<std::pair<std::vector<OpSymbol>, cd>> partial{{{}, 1.0}};
    auto append_single = [&](const OpSymbol& sym) {
        for (auto& [f, c] : partial) {
            f.push_back(sym);
        }
    };
    auto append_sum = [&](const OpSum& local) {
        std::vector<std::pair<std::vector<OpSymbol>, cd>> next;
        next.reserve(partial.size() * local.size());
        for (const auto& [f, c] : partial) {
            for (const auto& [p, lc] : local.terms()) {
                auto nf = f;
                nf.insert(nf.end(), p.factors.begin(), p.factors.end());
                next.emplace_back(std::move(nf), c * lc);
            }
        }
        partial = std::move(next);
    };

    std::size_t i = 0, j = 0;
    while (i < a.factors.size() || j < b.factors.size()) {
        if (j == b.factors.size() || (i < a.factors.size() && a.factors[i].site < b.factors[j].site)) {
            append_single(a.factors[i++]);
        } else if (i == a.factors.size() || b.factors[j].site < a.factors[i].site) {
            append_single(b.factors[j++]);
        } else {
            const OpSum local = reduce_onsite(a.factors[i++], b.factors[j++]);
            if (local.empty()) {
                return {};
            }
            append_sum(local);
        }
    }

    OpSum out;
    for (auto& [f, c] : partial) {
        OpProduct p;
        p.factors = std::move(f);  // already site-sorted by construction
        out.add(p, c);
    }
    return out;
}

} // namespace

OpSum multiply(const OpSum& a, const OpSum& b) {
    OpSum out;
    for (const auto& [pa, ca] : a.terms()) {
        for (const auto& [pb, cb] : b.terms()) {
            out += (ca * cb) * multiply_products(pa, pb);
        }
    }
    return out;
}

OpSum operator*(const OpSum& a, const OpSum& b) {
    return multiply(a, b);
}

OpSymbol adjoint(const OpSymbol& s) {
    switch (s.kind) {
    case OpKind::lower: return {s.site, OpKind::raise};
    case OpKind::raise: return {s.site, OpKind::lower};
    case OpKind::project: return s;
    }
    return s;
}

OpProduct adjoint(const OpProduct& p) {
    // Different sites commute, so reversing the order leaves the canonical order intact.
    OpProduct out;
    out.factors.reserve(p.factors.size());
    for (const auto& f : p.factors) {
        out.factors.push_back(adjoint(f));
    }
    return out;
}

OpSum adjoint(const OpSum& s) {
    OpSum out;
    for (const auto& [p, c] : s.terms()) {
        out.add(adjoint(p), std::conj(c));
    }
    return out;
}

bool is_hermitian(const OpSum& s, double tol) {
    OpSum diff = s - adjoint(s);
    diff.prune(tol);
    return diff.empty();
}

std::vector<int> support(const OpSum& s) {
    std::set<int> sites;
    for (const auto& [p, c] : s.terms()) {
        for (const auto& f : p.factors) {
            sites.insert(f.site);
        }
    }
    return {sites.begin(), sites.end()};
}

OpSum adjoint_eom(const OpProduct& o, const OpSum& hamiltonian, const std::vector<DissipatorEntry>& dissipator) {
    const OpSum op(o);
    OpSum out = cd(0.0, 1.0) * commutator(hamiltonian, op);
    for (const auto& d : dissipator) {
        if (d.rate == 0.0) {
            continue;
        }
        const OpSum up = raise(d.s);
        const OpSum down = lower(d.s_prime);
        const OpSum hop = up * down;
        OpSum term = 2.0 * (up * op * down) - hop * op - op * hop;
        out += (0.5 * d.rate) * term;
    }
    out.prune();
    return out;
}

OpSum adjoint_eom(const OpProduct& o, const OpSum& hamiltonian, const Eigen::MatrixXd& gamma) {
    if (!is_hermitian(hamiltonian, 1e-12)) {
        throw std::invalid_argument("adjoint_eom: Hamiltonian is not Hermitian");
    }
    std::vector<DissipatorEntry> d;
    for (Eigen::Index s = 0; s < gamma.rows(); ++s) {
        for (Eigen::Index t = 0; t < gamma.cols(); ++t) {
            if (gamma(s, t) != 0.0) {
                d.push_back({static_cast<int>(s), static_cast<int>(t), gamma(s, t)});
            }
        }
    }
    return adjoint_eom(o, hamiltonian, d);
}

std::string to_string(const OpSymbol& s) {
    const char* k = s.kind == OpKind::lower ? "12" : s.kind == OpKind::raise ? "21" : "22";
    return std::string("s") + k + "_" + std::to_string(s.site);
}

std::string to_string(const OpProduct& p) {
    if (p.is_identity()) {
        return "1";
    }
    std::string out;
    for (std::size_t i = 0; i < p.factors.size(); ++i) {
        if (i) out += " ";
        out += to_string(p.factors[i]);
    }
    return out;
}

namespace {

std::string format_coefficient(cd c) {
    std::ostringstream os;
    os << std::setprecision(12);
    if (c.imag() == 0.0) {
        os << c.real();
    } else if (c.real() == 0.0) {
        os << c.imag() << "i";
    } else {
        os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    }
    return os.str();
}

} // namespace

std::string to_string(const OpSum& s) {
    if (s.empty()) {
        return "0";
    }
    std::string out;
    bool first = true;
    for (const auto& [p, c] : s.terms()) {
        if (!first) out += " + ";
        first = false;
        out += format_coefficient(c) + "*" + to_string(p);
    }
    return out;
}

std::ostream& operator<<(std::ostream& os, const OpSum& s) {
    return os << to_string(s);
}

} // namespace nanosr::ops
