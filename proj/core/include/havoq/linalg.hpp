// linalg.hpp — LAPACK-backed dense factorizations used by the identification stages.

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace havoq::linalg {

struct ThinSvd {
    Eigen::MatrixXd u;   // m × l
    Eigen::VectorXd s;   // l, descending
    Eigen::MatrixXd v;   // n × l, so that a ≈ u · diag(s) · vᵀ
};

// Thin SVD via dgesdd. l = min(rows, cols).
ThinSvd thin_svd(const Eigen::MatrixXd& a);

// Singular values only.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& a);

// Minimum-norm least-squares solution of a·x = b via the rank-revealing
// QR with column pivoting (dgelsy), relative cutoff rcond.
// Returns x and reports the effective rank.
Eigen::MatrixXd lstsq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                      double rcond = 1e-12, int* rank_out = nullptr);

// Eigenvalues of a real square nonsymmetric matrix via dgeev.
Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& a);

} // namespace havoq::linalg
