#include "havoq/hankel.hpp"

#include <stdexcept>

namespace havoq {

BlockHankel delay_embed(const MultichannelSeries& series, int m, int stride) {
    series.validate();
    if (m < 2) {
        throw std::invalid_argument("delay_embed: embedding dimension must be at least 2");
    }
    if (stride < 1) {
        throw std::invalid_argument("delay_embed: stride must be at least 1");
    }
    const int n = series.samples();
    const int q = series.channels();
    const int cols = n - (m - 1) * stride;
    if (cols < 1) {
        throw std::invalid_argument("delay_embed: series shorter than the embedding window");
    }

    BlockHankel h;
    h.q = q;
    h.m = m;
    h.stride = stride;
    h.dt = series.dt;
    h.mat.resize(q * m, cols);
    for (int k = 0; k < cols; ++k) {
        for (int b = 0; b < m; ++b) {
            h.mat.block(b * q, k, q, 1) = series.values.row(k + b * stride).transpose();
        }
    }
    return h;
}

} // namespace havoq
