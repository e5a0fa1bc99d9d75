// pulse.hpp: Superradiant pulse metrics and N-scaling fits

#pragma once

#include "nanosr/observables.hpp"

#include <span>
#include <utility>
#include <vector>

namespace nanosr {

struct PulseMetrics {
    double i_max = 0.0;     ///< maximum of the total radiation in the window
    double t_center = 0.0;  ///< time of the maximum (fs), parabolic sub-sample refinement
    double width = 0.0;     ///< FWHM (fs), linear interpolation of half-maximum crossings
    bool valid = false;     ///< false when the maximum lacks a half-maximum crossing on either side
};

/// Metrics of the global maximum of `values` inside [t_start, t_end].
PulseMetrics pulse_metrics(std::span<const double> times, std::span<const double> values, double t_start,
                           double t_end);
PulseMetrics pulse_metrics(const RadiationSeries& series, double t_start, double t_end);

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
    std::vector<double> residuals;
};

/// I_max ~ a + b N^2 and width ~ c + d / N.
struct ScalingFit {
    LinearFit quadratic;  ///< intercept a, slope b
    LinearFit inverse;    ///< intercept c, slope d
    std::vector<int> n_used;
};

/// Ordinary least squares on the basis {1, x}. Throws for fewer than 2 points or all-equal x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Fits the valid points with N >= 4. Requires at least three of them.
ScalingFit scaling_fit(const std::vector<std::pair<int, PulseMetrics>>& points);

/// Slope of log(y) against log(x).
LinearFit power_law_fit(std::span<const double> x, std::span<const double> y);

} // namespace nanosr
