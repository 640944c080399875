// baselines.hpp — reference estimators: FFT peak picking and the
// generalized pencil-of-function (matrix pencil) method.

#pragma once

#include "havoq/hilbert.hpp"

#include <vector>

namespace havoq {

struct FftPeaks {
    std::vector<double> omegas;       // angular frequencies, descending peak magnitude
    bool fewer_than_requested = false;
};

// Magnitude spectrum of the mean-removed, Hann-windowed signal; the k largest
// local maxima refined by parabolic interpolation on the log magnitude.
FftPeaks fft_peak_frequencies(const Eigen::VectorXd& x, double dt, int k);

struct PoleEstimate {
    std::vector<complexd> poles;   // continuous-time s = σ + iω, sorted by |Im|
    std::vector<bool> unstable;    // |z| outliers
    bool rank_deficient = false;
};

// Matrix pencil on one or more channels sharing the same poles (channels are
// stacked Hankel blocks). Pencil parameter L, model order p, with N > L > p.
PoleEstimate matrix_pencil(const Eigen::MatrixXd& channels, double dt, int L, int p);

// 100·|truth − estimate|/|truth|; for zero truth returns the absolute error and
// sets *absolute_fallback.
double percent_error(double truth, double estimate, bool* absolute_fallback = nullptr);

} // namespace havoq
