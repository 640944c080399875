// series.hpp — multichannel time series sampled on a uniform grid.

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace havoq {

struct MultichannelSeries {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<std::string> names;  // one per channel
    Eigen::MatrixXd values;          // samples × channels

    int samples() const { return static_cast<int>(values.rows()); }
    int channels() const { return static_cast<int>(values.cols()); }
    double time_at(int k) const { return t0 + dt * k; }

    // Column by channel name; throws if absent.
    Eigen::VectorXd channel(const std::string& name) const;
    int channel_index(const std::string& name) const;

    void validate() const;
};

// Mean over the final `tail_fraction` of the samples (tail_fraction in (0, 1]).
double tail_mean(const Eigen::VectorXd& v, double tail_fraction);

} // namespace havoq
