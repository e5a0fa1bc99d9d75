#include "nanosr/pulse.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nanosr {

PulseMetrics pulse_metrics(std::span<const double> t, std::span<const double> y, double t_start, double t_end) {
    if (t.size() != y.size()) {
        throw std::invalid_argument("pulse_metrics: times and values differ in length");
    }
    std::size_t lo = 0;
    while (lo < t.size() && t[lo] < t_start) ++lo;
    std::size_t hi = lo;
    while (hi < t.size() && t[hi] <= t_end) ++hi;
    if (hi <= lo) {
        throw std::invalid_argument("pulse_metrics: empty analysis window");
    }

    std::size_t k = lo;
    for (std::size_t i = lo; i < hi; ++i) {
        if (y[i] > y[k]) k = i;  // first occurrence wins ties
    }
    PulseMetrics m;
    m.i_max = y[k];
    m.t_center = t[k];
    if (k > lo && k + 1 < hi) {
        const double ym = y[k - 1], y0 = y[k], yp = y[k + 1];
        const double denom = ym - 2.0 * y0 + yp;
        if (denom < 0.0) {
            const double delta = 0.5 * (ym - yp) / denom;
            const double step = delta < 0.0 ? t[k] - t[k - 1] : t[k + 1] - t[k];
            m.t_center = t[k] + delta * step;
        }
    }

    const double half = 0.5 * m.i_max;
    double left = 0.0, right = 0.0;
    bool has_left = false, has_right = false;
    for (std::size_t i = k; i > lo; --i) {
        if (y[i - 1] < half) {
            left = t[i - 1] + (half - y[i - 1]) / (y[i] - y[i - 1]) * (t[i] - t[i - 1]);
            has_left = true;
            break;
        }
    }
    for (std::size_t i = k; i + 1 < hi; ++i) {
        if (y[i + 1] < half) {
            right = t[i] + (y[i] - half) / (y[i] - y[i + 1]) * (t[i + 1] - t[i]);
            has_right = true;
            break;
        }
    }
    m.valid = has_left && has_right && m.i_max > 0.0;
    m.width = m.valid ? right - left : 0.0;
    return m;
}

PulseMetrics pulse_metrics(const RadiationSeries& series, double t_start, double t_end) {
    return pulse_metrics(series.times, series.total, t_start, t_end);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("least_squares: need at least two (x, y) pairs");
    }
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = x[static_cast<std::size_t>(i)];
        b[i] = y[static_cast<std::size_t>(i)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-12);
    if (qr.rank() < 2) {
        throw std::invalid_argument("least_squares: rank-deficient design (all abscissae equal)");
    }
    const Eigen::Vector2d coef = qr.solve(b);
    const Eigen::VectorXd res = b - a * coef;

    LinearFit fit;
    fit.intercept = coef[0];
    fit.slope = coef[1];
    fit.residuals.assign(res.data(), res.data() + n);
    const double ss_tot = (b.array() - b.mean()).square().sum();
    fit.r_squared = ss_tot > 0.0 ? 1.0 - res.squaredNorm() / ss_tot : 1.0;
    return fit;
}

ScalingFit scaling_fit(const std::vector<std::pair<int, PulseMetrics>>& points) {
    std::vector<double> n2, inv_n, imax, width;
    ScalingFit out;
    for (const auto& [n, m] : points) {
        if (!m.valid || n < 4) continue;
        out.n_used.push_back(n);
        n2.push_back(static_cast<double>(n) * n);
        inv_n.push_back(1.0 / n);
        imax.push_back(m.i_max);
        width.push_back(m.width);
    }
    if (out.n_used.size() < 3) {
        throw std::invalid_argument("scaling_fit: need at least three valid points with N >= 4");
    }
    out.quadratic = least_squares(n2, imax);
    out.inverse = least_squares(inv_n, width);
    return out;
}

LinearFit power_law_fit(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw std::invalid_argument("power_law_fit: values must be positive");
        }
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return least_squares(lx, ly);
}

} // namespace nanosr
