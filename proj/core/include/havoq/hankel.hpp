// hankel.hpp — block Hankel delay embedding of a multichannel series.

#pragma once

#include "havoq/series.hpp"

namespace havoq {

// Column k stacks the samples z_k, z_{k+τ}, …, z_{k+(m−1)τ}; within each time
// block all q channels of one instant are contiguous.
struct BlockHankel {
    int q = 0;       // channels per block
    int m = 0;       // embedding dimension
    int stride = 1;  // delay stride τ_s
    double dt = 0.0;
    Eigen::MatrixXd mat;  // (q·m) × (N − (m−1)τ_s)

    int cols() const { return static_cast<int>(mat.cols()); }
};

BlockHankel delay_embed(const MultichannelSeries& series, int m, int stride = 1);

} // namespace havoq
