#include "fracsearch/time_series.hpp"

#include <string>
#include <utility>

#include "fracsearch/errors.hpp"

namespace fracsearch {

TimeSeries::TimeSeries(std::vector<std::int64_t> t, std::vector<double> values)
    : t_(std::move(t)), v_(std::move(values)) {
    if (t_.size() != v_.size()) throw DomainError("time and value columns differ in length");
}

TimeSeries TimeSeries::uniform(std::int64_t first, std::int64_t stride, std::vector<double> values) {
    std::vector<std::int64_t> t(values.size());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = first + static_cast<std::int64_t>(k) * stride;
    return TimeSeries(std::move(t), std::move(values));
}

void TimeSeries::push_back(std::int64_t t, double value) {
    t_.push_back(t);
    v_.push_back(value);
}

void TimeSeries::validate() const {
    if (t_.empty()) throw DomainError("empty time series");
    const std::int64_t step = stride();
    if (step <= 0) throw DomainError("time series is not strictly increasing");
    for (std::size_t k = 1; k < t_.size(); ++k)
        if (t_[k] - t_[k - 1] != step)
            throw DomainError("non-uniform stride at sample " + std::to_string(k) + " (t=" +
                              std::to_string(t_[k]) + ")");
}

} // namespace fracsearch
