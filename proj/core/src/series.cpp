#include "havoq/series.hpp"

#include <cmath>
#include <stdexcept>

namespace havoq {

int MultichannelSeries::channel_index(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return static_cast<int>(i);
        }
    }
    throw std::invalid_argument("MultichannelSeries: no channel named '" + name + "'");
}

Eigen::VectorXd MultichannelSeries::channel(const std::string& name) const {
    return values.col(channel_index(name));
}

void MultichannelSeries::validate() const {
    if (dt <= 0.0) {
        throw std::invalid_argument("MultichannelSeries: dt must be positive");
    }
    if (static_cast<int>(names.size()) != channels()) {
        throw std::invalid_argument("MultichannelSeries: name/channel count mismatch");
    }
    if (!values.allFinite()) {
        throw std::invalid_argument("MultichannelSeries: non-finite values");
    }
}

double tail_mean(const Eigen::VectorXd& v, double tail_fraction) {
    if (v.size() == 0) {
        throw std::invalid_argument("tail_mean: empty series");
    }
    if (tail_fraction <= 0.0 || tail_fraction > 1.0) {
        throw std::invalid_argument("tail_mean: tail_fraction must be in (0, 1]");
    }
    const Eigen::Index n = v.size();
    Eigen::Index count = static_cast<Eigen::Index>(std::ceil(tail_fraction * n));
    count = std::max<Eigen::Index>(1, std::min(count, n));
    return v.tail(count).mean();
}

} // namespace havoq
