#pragma once

#include <cstdint>
#include <vector>

namespace fracsearch {

/// Samples (t, value) on a uniform, strictly increasing grid of steps.
class TimeSeries {
  public:
    TimeSeries() = default;
    TimeSeries(std::vector<std::int64_t> t, std::vector<double> values);

    /// Series t = first, first + stride, ... with the given values.
    static TimeSeries uniform(std::int64_t first, std::int64_t stride, std::vector<double> values);

    void push_back(std::int64_t t, double value);

    std::size_t size() const { return t_.size(); }
    bool empty() const { return t_.empty(); }
    std::int64_t stride() const { return t_.size() < 2 ? 1 : t_[1] - t_[0]; }

    const std::vector<std::int64_t>& times() const { return t_; }
    const std::vector<double>& values() const { return v_; }
    std::int64_t time(std::size_t k) const { return t_[k]; }
    double value(std::size_t k) const { return v_[k]; }

    /// Throws DomainError unless non-empty with a uniform positive stride.
    void validate() const;

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

  private:
    std::vector<std::int64_t> t_;
    std::vector<double> v_;
};

} // namespace fracsearch
