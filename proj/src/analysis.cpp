#include "fracsearch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <regex>

#include <fftw3.h>

#include "fracsearch/errors.hpp"

namespace fracsearch {

namespace {

constexpr std::size_t kMinPeriodSamples = 64;
constexpr double kMinPowerRatio = 0.05;
constexpr double kHarmonicRatio = 0.25;

std::string printf_string(const char* fmt, double a, double b = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return buf;
}

struct FftwDeleter {
    void operator()(fftw_complex* p) const { fftw_free(p); }
    void operator()(double* p) const { fftw_free(p); }
};

// |X_k|^2 for k = 0..n/2 of a real input.
std::vector<double> power_spectrum(const std::vector<double>& input) {
    const int n = static_cast<int>(input.size());
    const int bins = n / 2 + 1;
    std::unique_ptr<double, FftwDeleter> in(fftw_alloc_real(static_cast<std::size_t>(n)));
    std::unique_ptr<fftw_complex, FftwDeleter> out(fftw_alloc_complex(static_cast<std::size_t>(bins)));
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE);
    std::copy(input.begin(), input.end(), in.get());
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    std::vector<double> power(static_cast<std::size_t>(bins));
    for (int k = 0; k < bins; ++k) {
        const double re = out.get()[k][0];
        const double im = out.get()[k][1];
        power[static_cast<std::size_t>(k)] = re * re + im * im;
    }
    return power;
}

} // namespace

std::string format_last_digit(const Measured& m) {
    if (!(m.error > 0.0) || !std::isfinite(m.error)) return printf_string("%.6g", m.value);
    int decimals = -static_cast<int>(std::floor(std::log10(m.error)));
    double digit = std::round(m.error * std::pow(10.0, decimals));
    if (digit >= 10.0) {
        --decimals;
        digit = std::round(m.error * std::pow(10.0, decimals));
    }
    if (decimals > 0) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.*f(%d)", decimals, m.value, static_cast<int>(digit));
        return buf;
    }
    // Error of order one or larger: print both at the error's decade.
    const double unit = std::pow(10.0, -decimals);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.0f(%.0f)", std::round(m.value / unit) * unit, digit * unit);
    return buf;
}

Measured parse_last_digit(const std::string& text) {
    static const std::regex pattern(R"(^\s*([+-]?)(\d*)(?:\.(\d*))?(?:\((\d+)\))?\s*$)");
    std::smatch match;
    if (!std::regex_match(text, match, pattern) || (match[2].length() == 0 && match[3].length() == 0))
        throw DomainError("cannot parse '" + text + "' as a number with last-digit error");
    const std::string number = match[1].str() + (match[2].length() ? match[2].str() : "0") + "." +
                               (match[3].length() ? match[3].str() : "0");
    Measured m;
    m.value = std::stod(number);
    if (match[4].matched) {
        const auto decimals = static_cast<int>(match[3].length());
        m.error = std::stod(match[4].str()) * std::pow(10.0, -decimals);
    }
    return m;
}

PeriodEstimate estimate_period(const TimeSeries& series, const PeriodOptions& opts) {
    series.validate();
    const std::size_t n = series.size();
    if (n < kMinPeriodSamples)
        throw InsufficientSpan("period estimation needs at least " +
                               std::to_string(kMinPeriodSamples) + " samples, got " +
                               std::to_string(n));

    std::vector<double> x = series.values();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : x) v -= mean;
    if (opts.hann_window) {
        for (std::size_t k = 0; k < n; ++k)
            x[k] *= 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                          static_cast<double>(n - 1)));
    }

    const std::vector<double> power = power_spectrum(x);
    const std::size_t last = power.size() - 1;
    double total = 0.0;
    std::size_t peak = 1;
    for (std::size_t k = 1; k <= last; ++k) {
        total += power[k];
        if (power[k] > power[peak]) peak = k;
    }
    const double ratio = total > 0.0 ? power[peak] / total : 0.0;
    if (!(ratio >= kMinPowerRatio))
        throw NoDominantOscillation("no dominant oscillation: peak bin holds " +
                                    printf_string("%.3g", ratio) + " of the non-DC power");

    // Parabola through the log-magnitudes of the peak and its two neighbors.
    double offset = 0.0;
    if (peak > 1 && peak < last && power[peak - 1] > 0.0 && power[peak + 1] > 0.0) {
        const double lm = 0.5 * std::log(power[peak - 1]);
        const double l0 = 0.5 * std::log(power[peak]);
        const double lp = 0.5 * std::log(power[peak + 1]);
        const double denom = lm - 2.0 * l0 + lp;
        if (denom < 0.0) offset = std::clamp(0.5 * (lm - lp) / denom, -0.5, 0.5);
    }

    PeriodEstimate est;
    est.peak_bin = peak;
    est.sample_count = n;
    est.spectral_power_ratio = ratio;
    est.dominant_frequency = (static_cast<double>(peak) + offset) /
                             (static_cast<double>(n) * static_cast<double>(series.stride()));
    est.period_q = 1.0 / est.dominant_frequency;

    const auto harmonic =
        static_cast<std::size_t>(std::llround(2.0 * (static_cast<double>(peak) + offset)));
    double harmonic_power = 0.0;
    for (std::size_t k = harmonic > 0 ? harmonic - 1 : 0; k <= harmonic + 1 && k <= last; ++k)
        if (k > peak + 1) harmonic_power = std::max(harmonic_power, power[k]);
    est.harmonic_power_ratio = harmonic_power / power[peak];
    est.harmonic_flag = est.harmonic_power_ratio > kHarmonicRatio;
    return est;
}

double mean_peak_probability(const TimeSeries& series, double period_q) {
    series.validate();
    if (!(period_q > 0.0)) throw DomainError("period must be positive");
    const auto window = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(period_q / static_cast<double>(series.stride()))));
    const std::size_t windows = series.size() / window;
    if (windows < 2)
        throw InsufficientSpan("series of " + std::to_string(series.size()) +
                               " samples holds fewer than two windows of " +
                               std::to_string(window));
    const auto& v = series.values();
    double sum = 0.0;
    for (std::size_t w = 0; w < windows; ++w) {
        const auto first = v.begin() + static_cast<std::ptrdiff_t>(w * window);
        sum += *std::max_element(first, first + static_cast<std::ptrdiff_t>(window));
    }
    return sum / static_cast<double>(windows);
}

PowerLawFit power_law_fit(const std::vector<std::pair<double, double>>& points,
                          std::optional<FitRange> range) {
    std::vector<double> lx;
    std::vector<double> ly;
    PowerLawFit fit;
    fit.range = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& [x, y] : points) {
        if (range && (x < range->x_min || x > range->x_max)) continue;
        if (!(x > 0.0) || !(y > 0.0))
            throw DomainError("power-law fit needs positive data, got (" +
                              printf_string("%.17g, %.17g", x, y) + ")");
        lx.push_back(std::log(x));
        ly.push_back(std::log(y));
        fit.range.x_min = std::min(fit.range.x_min, x);
        fit.range.x_max = std::max(fit.range.x_max, x);
    }
    const std::size_t n = lx.size();
    if (n < 2) throw DomainError("power-law fit needs at least two points in range");

    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("power-law fit needs at least two distinct x values");

    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    fit.exponent = slope;
    fit.prefactor = std::exp(intercept);
    fit.sample_count = n;
    if (n > 2) {
        double ssr = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double r = ly[k] - (intercept + slope * lx[k]);
            ssr += r * r;
        }
        const double s2 = ssr / static_cast<double>(n - 2);
        fit.stderr_exponent = std::sqrt(s2 / sxx);
        const double se_intercept = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
        fit.stderr_prefactor = fit.prefactor * se_intercept;
    }
    return fit;
}

PowerLawFit power_law_fit(const TimeSeries& series, std::optional<FitRange> range) {
    std::vector<std::pair<double, double>> points;
    points.reserve(series.size());
    for (std::size_t k = 0; k < series.size(); ++k)
        points.emplace_back(static_cast<double>(series.time(k)), series.value(k));
    return power_law_fit(points, range);
}

double fractal_dimension(int pieces, int scale) {
    if (pieces < 1 || scale < 2) throw DomainError("fractal dimension needs M >= 1 and s >= 2");
    return std::log(static_cast<double>(pieces)) / std::log(static_cast<double>(scale));
}

double gasket_spectral_dimension(int euclidean_dim) {
    if (euclidean_dim < 1) throw DomainError("Euclidean dimension must be >= 1");
    return 2.0 * std::log(euclidean_dim + 1.0) / std::log(euclidean_dim + 3.0);
}

Measured spectral_dimension_from_fit(const PowerLawFit& fit) {
    if (fit.exponent > 0.0)
        throw DomainError("return probability grows with t (exponent " +
                          printf_string("%.6g", fit.exponent) + ")");
    return {2.0 * std::abs(fit.exponent), 2.0 * fit.stderr_exponent};
}

DimensionSet DimensionSet::self_similar(int euclidean, int pieces, int scale, Measured spectral) {
    DimensionSet d;
    d.euclidean = euclidean;
    d.pieces = pieces;
    d.scale = scale;
    d.fractal = fractal_dimension(pieces, scale);
    d.spectral = spectral;
    return d;
}

Measured hypothesis_rhs(const DimensionSet& dims) {
    if (dims.euclidean < 2) throw DomainError("hypothesis needs d_E >= 2");
    const double denom = dims.euclidean - 1.0;
    return {dims.spectral.value / denom + dims.fractal - dims.scale, dims.spectral.error / denom};
}

HypothesisReport check_hypothesis(const Measured& b, const Measured& a, const DimensionSet& dims) {
    HypothesisReport r;
    r.lhs = {b.value + 0.5 * a.value, std::hypot(b.error, 0.5 * a.error)};
    r.rhs = hypothesis_rhs(dims);
    const double sigma = std::hypot(r.lhs.error, r.rhs.error);
    const double gap = std::abs(r.lhs.value - r.rhs.value);
    if (sigma > 0.0)
        r.discrepancy_sigma = gap / sigma;
    else
        r.discrepancy_sigma = gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return r;
}

HypothesisReport check_hypothesis(const PowerLawFit& b_fit, const PowerLawFit& a_fit,
                                  const DimensionSet& dims) {
    return check_hypothesis(b_fit.exponent_measured(), {-a_fit.exponent, a_fit.stderr_exponent},
                            dims);
}

InverseComparison inverse_spectral_comparison(const Measured& b, const Measured& spectral) {
    if (!(spectral.value > 0.0)) throw DomainError("spectral dimension must be positive");
    InverseComparison c;
    c.inverse_spectral = {1.0 / spectral.value, spectral.error / (spectral.value * spectral.value)};
    const double sigma = std::hypot(b.error, c.inverse_spectral.error);
    const double gap = std::abs(b.value - c.inverse_spectral.value);
    c.discrepancy_sigma =
        sigma > 0.0 ? gap / sigma : (gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    return c;
}

} // namespace fracsearch
