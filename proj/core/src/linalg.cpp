#include "havoq/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <stdexcept>

namespace havoq::linalg {

ThinSvd thin_svd(const Eigen::MatrixXd& a) {
    if (a.size() == 0) {
        throw std::invalid_argument("thin_svd: empty matrix");
    }
    if (!a.allFinite()) {
        throw std::runtime_error("thin_svd: non-finite input");
    }
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    const lapack_int l = std::min(m, n);

    Eigen::MatrixXd work = a;  // dgesdd destroys its input
    ThinSvd out;
    out.u.resize(m, l);
    out.s.resize(l);
    out.v.resize(n, l);

    Eigen::MatrixXd vt(l, n);
    const lapack_int info = LAPACKE_dgesdd(
        LAPACK_COL_MAJOR, 'S', m, n, work.data(), m,
        out.s.data(), out.u.data(), m, vt.data(), l);
    if (info != 0) {
        throw std::runtime_error("thin_svd: dgesdd failed, info=" + std::to_string(info));
    }
    out.v = vt.transpose();
    return out;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& a) {
    if (a.size() == 0) {
        throw std::invalid_argument("singular_values: empty matrix");
    }
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    const lapack_int l = std::min(m, n);

    Eigen::MatrixXd work = a;
    Eigen::VectorXd s(l);
    const lapack_int info = LAPACKE_dgesdd(
        LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(),
        nullptr, m, nullptr, l);
    if (info != 0) {
        throw std::runtime_error("singular_values: dgesdd failed, info=" + std::to_string(info));
    }
    return s;
}

Eigen::MatrixXd lstsq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                      double rcond, int* rank_out) {
    if (a.rows() != b.rows()) {
        throw std::invalid_argument("lstsq: row mismatch");
    }
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    const lapack_int nrhs = static_cast<lapack_int>(b.cols());
    const lapack_int ldb = std::max(m, n);

    Eigen::MatrixXd aw = a;
    Eigen::MatrixXd bw(ldb, nrhs);
    bw.setZero();
    bw.topRows(m) = b;

    std::vector<lapack_int> jpvt(static_cast<size_t>(n), 0);
    lapack_int rank = 0;
    const lapack_int info = LAPACKE_dgelsy(
        LAPACK_COL_MAJOR, m, n, nrhs, aw.data(), m, bw.data(), ldb,
        jpvt.data(), rcond, &rank);
    if (info != 0) {
        throw std::runtime_error("lstsq: dgelsy failed, info=" + std::to_string(info));
    }
    if (rank_out) {
        *rank_out = static_cast<int>(rank);
    }
    return bw.topRows(n);
}

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("eigenvalues: matrix must be square");
    }
    if (!a.allFinite()) {
        throw std::runtime_error("eigenvalues: non-finite input");
    }
    const lapack_int n = static_cast<lapack_int>(a.rows());
    if (n == 0) {
        return Eigen::VectorXcd();
    }
    Eigen::MatrixXd work = a;
    Eigen::VectorXd wr(n), wi(n);
    const lapack_int info = LAPACKE_dgeev(
        LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n,
        wr.data(), wi.data(), nullptr, n, nullptr, n);
    if (info != 0) {
        throw std::runtime_error("eigenvalues: dgeev failed, info=" + std::to_string(info));
    }
    Eigen::VectorXcd w(n);
    for (lapack_int i = 0; i < n; ++i) {
        w(i) = std::complex<double>(wr(i), wi(i));
    }
    return w;
}

} // namespace havoq::linalg
