// ode.hpp: Adaptive Dormand-Prince 5(4) integrator with dense output
//
// Header-only; State is any dense Eigen type (vector or matrix, real or complex).
// The rhs signature is f(t, y, dy). Integration is split at breakpoints so that
// discontinuous envelopes never fall inside a step; the stage that lands exactly
// on a segment end is evaluated one ulp inside the segment (left limit).

#pragma once

#include "nanosr/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace nanosr::ode {

struct Tolerances {
    double abs = 1e-10;
    double rel = 1e-8;
};

struct Options {
    Tolerances tol;
    double h_max = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 50'000'000;
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
};

namespace detail {

// Dormand-Prince tableau (Hairer & Wanner, DOPRI5).
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

template <class State>
double scaled_rms(const State& e, const State& y0, const State& y1, const Tolerances& tol) {
    const auto sc = tol.abs + tol.rel * y0.array().abs().max(y1.array().abs());
    return std::sqrt((e.array().abs() / sc).square().mean());
}

} // namespace detail

/// Integrates y' = f(t, y) from t0 to t1, calling observer(t, y) at each requested output time
/// (sorted, inside [t0, t1]). Returns the final state.
template <class State, class Rhs, class Observer>
State integrate(Rhs&& f, State y, double t0, double t1, std::span<const double> output_times,
                std::span<const double> breakpoints, Observer&& observer, const Options& opt = {},
                Stats* stats = nullptr) {
    using namespace detail;
    Stats local;
    Stats& st = stats ? *stats : local;

    std::vector<double> edges{t0};
    for (double b : breakpoints) {
        if (b > t0 && b < t1) {
            edges.push_back(b);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges.push_back(t1);

    std::size_t next_out = 0;
    while (next_out < output_times.size() && output_times[next_out] <= t0) {
        if (output_times[next_out] == t0) {
            observer(t0, y);
        }
        ++next_out;
    }

    State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, ytmp = y, ynew = y, err = y;
    double h_prev = 0.0;

    for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
        const double a = edges[seg];
        const double b = edges[seg + 1];
        const double b_inside = std::nextafter(b, a);
        auto eval = [&](double t, const State& x, State& dx) {
            f(std::min(t, b_inside), x, dx);
            ++st.rhs_evals;
        };

        double t = a;
        eval(t, y, k1);

        double h;
        if (h_prev > 0.0) {
            h = h_prev;
        } else {
            // Initial step guess (Hairer's heuristic).
            const State zero = State::Zero(y.rows(), y.cols());
            const double d0 = scaled_rms(y, y, zero, opt.tol);
            const double dd1 = scaled_rms(k1, y, zero, opt.tol);
            double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
            h0 = std::min(h0, b - a);
            ytmp = y + h0 * k1;
            eval(t + h0, ytmp, k2);
            const double dd2 = scaled_rms(State(k2 - k1), y, zero, opt.tol) / h0;
            const double m = std::max(dd1, dd2);
            const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
            h = std::min(100.0 * h0, h1);
        }
        h = std::min({h, opt.h_max, b - a});

        bool last_rejected = false;
        while (t < b) {
            if (st.accepted + st.rejected >= opt.max_steps) {
                throw IntegrationError("integrator exceeded the maximum number of steps", t);
            }
            if (h < 1e-13 * std::max(1.0, std::abs(t))) {
                throw IntegrationError("integrator step size underflow", t);
            }
            bool final_step = false;
            if (t + h >= b || (b - (t + h)) < 1e-12 * std::max(1.0, std::abs(b))) {
                h = b - t;
                final_step = true;
            }

            ytmp = y + h * (a21 * k1);
            eval(t + c2 * h, ytmp, k2);
            ytmp = y + h * (a31 * k1 + a32 * k2);
            eval(t + c3 * h, ytmp, k3);
            ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
            eval(t + c4 * h, ytmp, k4);
            ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            eval(t + c5 * h, ytmp, k5);
            ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            eval(t + h, ytmp, k6);
            ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            eval(t + h, ynew, k7);
            err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            const double en = scaled_rms(err, y, ynew, opt.tol);
            if (!std::isfinite(en)) {
                ++st.rejected;
                h *= 0.1;
                last_rejected = true;
                continue;
            }
            if (en > 1.0) {
                ++st.rejected;
                h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
                last_rejected = true;
                continue;
            }

            ++st.accepted;
            const double t_new = final_step ? b : t + h;
            if (next_out < output_times.size() && output_times[next_out] <= t_new) {
                // Dense output (DOPRI5 continuous extension of order 4).
                const State ydiff = ynew - y;
                const State bspl = h * k1 - ydiff;
                const State r4 = ydiff - h * k7 - bspl;
                const State r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                while (next_out < output_times.size() && output_times[next_out] <= t_new) {
                    const double tau = output_times[next_out];
                    if (tau >= t_new) {
                        observer(tau, ynew);
                    } else {
                        const double th = (tau - t) / h;
                        const double th1 = 1.0 - th;
                        ytmp = y + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5)));
                        observer(tau, ytmp);
                    }
                    ++next_out;
                }
            }

            double fac = en == 0.0 ? 10.0 : 0.9 * std::pow(en, -0.2);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
            last_rejected = false;

            y.swap(ynew);
            k1.swap(k7);
            t = t_new;
            if (!final_step) {
                h_prev = h;
            }
            h = std::min(h * fac, opt.h_max);
            if (final_step) {
                h_prev = std::max(h_prev, h);
            }
        }
    }
    return y;
}

/// Uniform grid 0, dt, 2dt, ... up to and including t_final (within rounding).
inline std::vector<double> uniform_grid(double t_final, double dt) {
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::floor(t_final / dt + 1e-9));
    g.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        g.push_back(static_cast<double>(i) * dt);
    }
    return g;
}

} // namespace nanosr::ode
