// mhavok.hpp — multichannel HAVOK: thin SVD of the delay embedding, linear/forcing
// mode classification, two-stage regression, forced linear simulation, and
// condition-number rank selection.

#pragma once

#include "havoq/hankel.hpp"

#include <utility>
#include <vector>

namespace havoq {

struct SvdBundle {
    Eigen::MatrixXd u;  // (q·m) × l
    Eigen::VectorXd s;  // l singular values, descending
    Eigen::MatrixXd v;  // cols × l
};

// Thin SVD of the block Hankel matrix, l = min(qm, cols).
SvdBundle thin_svd(const BlockHankel& h);

// 4th-order central differences on the interior rows; the returned matrix has
// rows(v) − 4 rows and aligns with v.middleRows(2, rows − 4).
Eigen::MatrixXd differentiate(const Eigen::MatrixXd& v, double dt);

// C minimizing ‖V̇ − V Cᵀ‖_F (least squares, rank-revealing with pseudo-inverse
// fallback at relative cutoff 1e-12).
Eigen::MatrixXd fit_linear_map(const Eigen::MatrixXd& v, const Eigen::MatrixXd& vdot);

struct ModeClassification {
    std::vector<int> linear;         // I_c, 0-based
    std::vector<int> forcing;        // I_f
    std::vector<int> zero_variance;  // forcing modes flagged for a degenerate R² denominator
    Eigen::VectorXd r2;
};

// R²_i = 1 − ‖v̇_i − V c_i‖² / ‖v̇_i − mean(v̇_i)·1‖²; linear iff R²_i ≥ τ.
ModeClassification classify_modes(const Eigen::MatrixXd& v, const Eigen::MatrixXd& vdot,
                                  const Eigen::MatrixXd& c, double tau);

// (A, B) jointly minimizing ‖V̇_c − V_c Aᵀ − V_f Bᵀ‖_F. B has zero columns when
// there are no forcing modes.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> fit_forced_model(const Eigen::MatrixXd& v_c,
                                                             const Eigen::MatrixXd& v_f,
                                                             const Eigen::MatrixXd& vdot_c);

// Integrates ẋ = A x + B u with RK4 at step dt over n_rows samples; the forcing
// is interpolated linearly between its samples. x0 becomes row 0 of the result.
Eigen::MatrixXd simulate_forced(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                const Eigen::MatrixXd& u, const Eigen::VectorXd& x0,
                                double dt, int n_rows);

// σ_max / σ_min; +infinity when σ_min < 1e-300. Throws on an empty matrix.
double condition_number(const Eigen::MatrixXd& b);

struct HavokModel {
    int r = 0;
    double tau = 0.0;
    double dt = 0.0;
    std::vector<int> linear_modes, forcing_modes, zero_variance_modes;
    Eigen::VectorXd r2;       // per retained mode
    Eigen::MatrixXd c;        // r × r first-regression matrix
    Eigen::MatrixXd a;        // |I_c| × |I_c|
    Eigen::MatrixXd b;        // |I_c| × |I_f|
    Eigen::MatrixXd u_c;      // left singular vectors of the linear modes
    Eigen::VectorXd sigma_c;  // singular values of the linear modes

    int n_linear() const { return static_cast<int>(linear_modes.size()); }
    int n_forcing() const { return static_cast<int>(forcing_modes.size()); }
};

struct Reconstruction {
    Eigen::MatrixXd states;          // embedding columns × |I_c|
    Eigen::MatrixXd hankel;          // reconstructed block Hankel
    MultichannelSeries observables;  // first block row of the Hankel
};

struct HavokFit {
    HavokModel model;
    Reconstruction recon;
};

// Caches the embedding, SVD, and trimmed derivatives so rank sweeps only repeat
// the per-rank regressions.
class MhavokWorkspace {
public:
    MhavokWorkspace(const MultichannelSeries& series, int m, int r_cap);

    HavokModel fit_model(int r, double tau) const;
    Reconstruction reconstruct_from(const HavokModel& model) const;

    int max_rank() const { return r_cap_; }
    // Modes with σ_i ≥ tol·σ_1; directions beyond this are an arbitrary basis of
    // the numerical null space and carry no dynamics.
    int numerical_rank(double tol = 1e-13) const;
    const SvdBundle& svd() const { return svd_; }
    const BlockHankel& hankel() const { return hankel_; }

private:
    BlockHankel hankel_;
    SvdBundle svd_;
    Eigen::MatrixXd v_trim_;  // interior rows of the retained right-singular vectors
    Eigen::MatrixXd vdot_;    // aligned derivatives
    std::vector<std::string> channel_names_;
    int r_cap_ = 0;
    double dt_ = 0.0;
};

// Full pipeline at a fixed cutoff rank.
HavokFit fit_mhavok(const MultichannelSeries& series, int m, double tau, int r);

// How a rank with no forcing modes competes against finite condition numbers.
// `wins` treats "nothing left to force" as ideal (ranked above every finite
// value); `loses` ranks it below every finite value.
enum class NoForcingPolicy { wins, loses };

struct RankRecord {
    int r = 0;
    int n_linear = 0;
    int n_forcing = 0;
    double cond_b = 0.0;  // +inf marks a no-forcing rank
};

struct RankSweep {
    int r_opt = 0;
    std::vector<RankRecord> table;
};

// Sweeps r over [r_min, r_max] (r_min = smallest rank with at least one linear
// mode) and returns the condition-number argmax, ties toward smaller r.
RankSweep select_optimal_rank(const MultichannelSeries& series, int m, double tau,
                              int r_max, NoForcingPolicy policy = NoForcingPolicy::wins);

RankSweep select_optimal_rank(const MhavokWorkspace& ws, double tau, int r_max,
                              NoForcingPolicy policy = NoForcingPolicy::wins);

} // namespace havoq
