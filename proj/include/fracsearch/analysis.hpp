#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracsearch/time_series.hpp"

namespace fracsearch {

/// A value with a one-sigma standard error.
struct Measured {
    double value = 0.0;
    double error = 0.0;
};

/// Formats in last-digit notation, e.g. {0.5647, 0.0006} -> "0.5647(6)".
/// The error is rounded to one significant digit and the value to the same
/// decimal place. A zero error prints the value alone.
std::string format_last_digit(const Measured& m);

/// Parses "0.5647(6)" as {0.5647, 0.0006}; a plain number parses with zero
/// error. Throws DomainError on malformed input.
Measured parse_last_digit(const std::string& text);

struct PeriodOptions {
    bool hann_window = false;
};

struct PeriodEstimate {
    double period_q = 0.0;
    /// Cycles per step.
    double dominant_frequency = 0.0;
    /// Dominant bin power over total non-DC power.
    double spectral_power_ratio = 0.0;
    std::size_t peak_bin = 0;
    std::size_t sample_count = 0;
    /// Set when the bin nearest twice the dominant frequency carries more
    /// than a quarter of the dominant bin's power.
    bool harmonic_flag = false;
    double harmonic_power_ratio = 0.0;
};

/// Dominant oscillation period of a series: mean removed, real DFT, largest
/// non-DC bin, refined by a parabola through the log-magnitudes of the peak
/// bin and its neighbors. Needs at least 64 samples.
/// Throws NoDominantOscillation when the peak holds under 5% of the power.
PeriodEstimate estimate_period(const TimeSeries& series, const PeriodOptions& opts = {});

/// Mean of the per-window maxima over consecutive disjoint windows of
/// round(Q) steps, aligned at the first sample. Partial trailing windows are
/// dropped. Throws InsufficientSpan with fewer than two whole windows.
double mean_peak_probability(const TimeSeries& series, double period_q);

struct FitRange {
    double x_min = 0.0;
    double x_max = 0.0;
};

struct PowerLawFit {
    double prefactor = 0.0;
    double exponent = 0.0;
    double stderr_exponent = 0.0;
    double stderr_prefactor = 0.0;
    std::size_t sample_count = 0;
    /// Smallest and largest x that entered the fit.
    FitRange range;

    Measured exponent_measured() const { return {exponent, stderr_exponent}; }
    Measured prefactor_measured() const { return {prefactor, stderr_prefactor}; }
};

/// Ordinary least squares of ln y on ln x, restricted to x in `range`
/// (inclusive) when given. Throws DomainError for non-positive coordinates
/// among the selected points or fewer than two of them. With exactly two
/// points the standard errors are zero.
PowerLawFit power_law_fit(const std::vector<std::pair<double, double>>& points,
                          std::optional<FitRange> range = std::nullopt);

/// Same, taking (t, value) pairs from a series.
PowerLawFit power_law_fit(const TimeSeries& series, std::optional<FitRange> range = std::nullopt);

/// ln M / ln s.
double fractal_dimension(int pieces, int scale);

/// 2 ln(d_E + 1) / ln(d_E + 3), the closed form for the gasket family.
double gasket_spectral_dimension(int euclidean_dim);

/// d_s = 2|exponent| from a return-probability fit. Throws DomainError for a
/// positive exponent.
Measured spectral_dimension_from_fit(const PowerLawFit& fit);

struct DimensionSet {
    int euclidean = 2;
    double fractal = 0.0;
    Measured spectral;
    int scale = 3;
    int pieces = 8;

    /// Carpet-family set with d_f computed from (pieces, scale).
    static DimensionSet self_similar(int euclidean, int pieces, int scale, Measured spectral);
};

struct HypothesisReport {
    /// b + a/2.
    Measured lhs;
    /// d_s / (d_E - 1) + d_f - s.
    Measured rhs;
    /// |lhs - rhs| in combined standard errors; infinite when both errors
    /// vanish and the sides differ, zero when they agree exactly.
    double discrepancy_sigma = 0.0;
};

Measured hypothesis_rhs(const DimensionSet& dims);

/// `b` and `a` are taken as positive exponents (Q ~ N^b, P ~ N^-a).
HypothesisReport check_hypothesis(const Measured& b, const Measured& a, const DimensionSet& dims);

/// Builds (b, a) from fits of Q vs N and P vs N; the P fit's exponent is
/// negated to give a.
HypothesisReport check_hypothesis(const PowerLawFit& b_fit, const PowerLawFit& a_fit,
                                  const DimensionSet& dims);

struct InverseComparison {
    Measured inverse_spectral;
    double discrepancy_sigma = 0.0;
};

/// 1/d_s with error sigma/d_s^2, and its distance from b in sigmas.
InverseComparison inverse_spectral_comparison(const Measured& b, const Measured& spectral);

} // namespace fracsearch
