#include "havoq/baselines.hpp"

#include "havoq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace havoq {

namespace {

// Iterative radix-2 Cooley–Tukey; n must be a power of two.
void fft_inplace(std::vector<complexd>& a) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const complexd wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            complexd w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const complexd u = a[i + k];
                const complexd v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

} // namespace

FftPeaks fft_peak_frequencies(const Eigen::VectorXd& x, double dt, int k) {
    if (x.size() < 16) {
        throw std::invalid_argument("fft_peak_frequencies: need at least 16 samples");
    }
    if (dt <= 0.0 || k < 1) {
        throw std::invalid_argument("fft_peak_frequencies: bad dt or peak count");
    }
    const Eigen::Index n = x.size();
    const double mean = x.mean();

    const size_t nfft = next_pow2(2 * static_cast<size_t>(n));
    std::vector<complexd> buf(nfft, complexd(0.0, 0.0));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
        buf[static_cast<size_t>(i)] = complexd((x(i) - mean) * w, 0.0);
    }
    fft_inplace(buf);

    const size_t half = nfft / 2;
    std::vector<double> mag(half + 1);
    for (size_t i = 0; i <= half; ++i) {
        mag[i] = std::abs(buf[i]);
    }

    // Local maxima over the interior bins, largest first.
    std::vector<size_t> peaks;
    for (size_t i = 1; i < half; ++i) {
        if (mag[i] > mag[i - 1] && mag[i] >= mag[i + 1] && mag[i] > 0.0) {
            peaks.push_back(i);
        }
    }
    std::sort(peaks.begin(), peaks.end(),
              [&](size_t a, size_t b) { return mag[a] > mag[b]; });

    FftPeaks out;
    const double bin = 2.0 * std::numbers::pi / (static_cast<double>(nfft) * dt);
    for (size_t pi = 0; pi < peaks.size() && static_cast<int>(out.omegas.size()) < k; ++pi) {
        const size_t i = peaks[pi];
        const double lm = std::log(std::max(mag[i - 1], 1e-300));
        const double cm = std::log(std::max(mag[i], 1e-300));
        const double rm = std::log(std::max(mag[i + 1], 1e-300));
        const double denom = lm - 2.0 * cm + rm;
        const double delta = (std::abs(denom) > 1e-300) ? 0.5 * (lm - rm) / denom : 0.0;
        out.omegas.push_back(bin * (static_cast<double>(i) + std::clamp(delta, -0.5, 0.5)));
    }
    out.fewer_than_requested = static_cast<int>(out.omegas.size()) < k;
    return out;
}

PoleEstimate matrix_pencil(const Eigen::MatrixXd& channels, double dt, int L, int p) {
    const int n = static_cast<int>(channels.rows());
    const int q = static_cast<int>(channels.cols());
    if (q < 1) {
        throw std::invalid_argument("matrix_pencil: need at least one channel");
    }
    if (!(n > L && L > p && p >= 1)) {
        throw std::invalid_argument("matrix_pencil: require N > L > p >= 1");
    }
    if (dt <= 0.0) {
        throw std::invalid_argument("matrix_pencil: dt must be positive");
    }

    const int rows = n - L;
    Eigen::MatrixXd y0(rows * q, L), y1(rows * q, L);
    for (int c = 0; c < q; ++c) {
        for (int j = 0; j < L; ++j) {
            y0.block(c * rows, j, rows, 1) = channels.col(c).segment(j, rows);
            y1.block(c * rows, j, rows, 1) = channels.col(c).segment(j + 1, rows);
        }
    }

    const linalg::ThinSvd svd = linalg::thin_svd(y0);
    PoleEstimate out;
    if (svd.s(0) < 1e-300) {
        out.rank_deficient = true;
        return out;
    }

    const Eigen::MatrixXd up = svd.u.leftCols(p);
    const Eigen::MatrixXd vp = svd.v.leftCols(p);
    const Eigen::VectorXd sp = svd.s.head(p);
    if (sp(p - 1) < 1e-12 * svd.s(0)) {
        out.rank_deficient = true;  // order exceeds the numerical signal rank
    }
    Eigen::VectorXd sp_inv(p);
    for (int i = 0; i < p; ++i) {
        sp_inv(i) = sp(i) > 1e-300 ? 1.0 / sp(i) : 0.0;
    }
    const Eigen::MatrixXd z = sp_inv.asDiagonal() * (up.transpose() * y1 * vp);
    const Eigen::VectorXcd zs = linalg::eigenvalues(z);

    for (Eigen::Index i = 0; i < zs.size(); ++i) {
        const complexd zi = zs(i);
        const double az = std::abs(zi);
        const bool unstable = az > 1.0 + 1e-6 || az < 1e-12;
        const complexd s = az < 1e-300
            ? complexd(-700.0 / dt, 0.0)
            : complexd(std::log(az) / dt, std::arg(zi) / dt);
        out.poles.push_back(s);
        out.unstable.push_back(unstable);
    }

    // Sort by |Im|, keeping conjugate partners adjacent.
    std::vector<size_t> order(out.poles.size());
    for (size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const double ia = std::abs(out.poles[a].imag());
        const double ib = std::abs(out.poles[b].imag());
        if (ia != ib) {
            return ia < ib;
        }
        if (out.poles[a].imag() != out.poles[b].imag()) {
            return out.poles[a].imag() > out.poles[b].imag();
        }
        return out.poles[a].real() < out.poles[b].real();
    });
    PoleEstimate sorted;
    sorted.rank_deficient = out.rank_deficient;
    for (size_t i : order) {
        sorted.poles.push_back(out.poles[i]);
        sorted.unstable.push_back(out.unstable[i]);
    }
    return sorted;
}

double percent_error(double truth, double estimate, bool* absolute_fallback) {
    if (absolute_fallback) {
        *absolute_fallback = false;
    }
    if (truth == 0.0) {
        if (!absolute_fallback) {
            throw std::domain_error("percent_error: zero truth");
        }
        *absolute_fallback = true;
        return std::abs(estimate);
    }
    return 100.0 * std::abs(truth - estimate) / std::abs(truth);
}

} // namespace havoq
