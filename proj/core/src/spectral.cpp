#include "havoq/spectral.hpp"

#include "havoq/errors.hpp"
#include "havoq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace havoq {

std::vector<double> EigenSpectrum::frequencies() const {
    std::vector<double> f;
    f.reserve(modes.size());
    for (const auto& m : modes) {
        f.push_back(m.omega);
    }
    return f;
}

EigenSpectrum eigen_spectrum(const Eigen::MatrixXd& a, double dt) {
    if (!a.allFinite()) {
        throw std::invalid_argument("eigen_spectrum: non-finite matrix");
    }
    EigenSpectrum out;
    out.dt = dt;
    out.eigenvalues = linalg::eigenvalues(a);
    const double tol = 1e-8 * std::max(a.norm(), std::numeric_limits<double>::min());

    const int n = static_cast<int>(out.eigenvalues.size());
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
        if (used[i]) {
            continue;
        }
        const complexd li = out.eigenvalues(i);
        if (std::abs(li.imag()) <= tol) {
            used[i] = true;
            SpectralMode m;
            m.decay = li.real();
            m.omega = 0.0;
            m.idx_plus = i;
            out.unpaired.push_back(m);
            continue;
        }
        int partner = -1;
        double best = tol;
        for (int j = i + 1; j < n; ++j) {
            if (used[j]) {
                continue;
            }
            const double d = std::abs(li - std::conj(out.eigenvalues(j)));
            if (d <= best) {
                best = d;
                partner = j;
            }
        }
        used[i] = true;
        if (partner < 0) {
            SpectralMode m;
            m.decay = li.real();
            m.omega = std::abs(li.imag());
            m.idx_plus = i;
            out.unpaired.push_back(m);
            continue;
        }
        used[partner] = true;
        const complexd lj = out.eigenvalues(partner);
        SpectralMode m;
        m.decay = 0.5 * (li.real() + lj.real());
        m.omega = 0.5 * (std::abs(li.imag()) + std::abs(lj.imag()));
        m.idx_plus = li.imag() > 0 ? i : partner;
        m.idx_minus = li.imag() > 0 ? partner : i;
        out.modes.push_back(m);
    }
    std::sort(out.modes.begin(), out.modes.end(),
              [](const SpectralMode& a_, const SpectralMode& b_) { return a_.omega < b_.omega; });
    return out;
}

namespace {

std::vector<int> mode_indices(const SpectralMode& m) {
    std::vector<int> idx{m.idx_plus};
    if (m.idx_minus >= 0) {
        idx.push_back(m.idx_minus);
    }
    return idx;
}

void copy_eigenvalues(ParameterReport& rep, const EigenSpectrum& spec) {
    rep.eigenvalues.assign(spec.eigenvalues.data(),
                           spec.eigenvalues.data() + spec.eigenvalues.size());
}

int nearest_mode(const EigenSpectrum& spec, double target) {
    int best = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < spec.modes.size(); ++i) {
        const double d = std::abs(spec.modes[i].omega - target);
        if (d < dist) {
            dist = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

} // namespace

void finalize_report(ParameterReport& report, const std::map<std::string, double>& truth) {
    for (const auto& [name, value] : truth) {
        const auto it = report.retrieved.find(name);
        if (it == report.retrieved.end()) {
            continue;
        }
        report.truth[name] = value;
        if (value == 0.0) {
            report.percent_errors[name] = std::abs(it->second - value);
            report.flags.push_back("absolute_error:" + name);
        } else {
            report.percent_errors[name] = 100.0 * std::abs(value - it->second) / std::abs(value);
        }
    }
}

ParameterReport retrieve_qho_params(const EigenSpectrum& spec) {
    if (spec.modes.size() < 2) {
        throw std::invalid_argument("retrieve_qho_params: need at least 2 conjugate pairs");
    }
    ParameterReport rep;
    rep.system = "qho";
    const SpectralMode& low = spec.modes.front();
    const SpectralMode& high = spec.modes.back();
    rep.retrieved["omega_y"] = low.omega;
    rep.retrieved["omega_x"] = high.omega;
    double mean_decay = 0.0;
    std::vector<int> prov_kappa;
    for (const auto& m : spec.modes) {
        mean_decay += m.decay;
        const auto idx = mode_indices(m);
        prov_kappa.insert(prov_kappa.end(), idx.begin(), idx.end());
    }
    mean_decay /= static_cast<double>(spec.modes.size());
    rep.retrieved["kappa"] = -2.0 * mean_decay;
    rep.provenance["omega_y"] = mode_indices(low);
    rep.provenance["omega_x"] = mode_indices(high);
    rep.provenance["kappa"] = prov_kappa;
    copy_eigenvalues(rep, spec);
    return rep;
}

namespace {

struct LadderFit {
    std::vector<int> members;  // indices into the frequency list
    double intercept = 0.0;
    double spacing = 0.0;
    double ssr = 0.0;
};

// Least-squares line through (0, f₀), (1, f₁), … for the selected members.
LadderFit fit_ladder(const std::vector<double>& freqs, const std::vector<int>& members) {
    LadderFit fit;
    fit.members = members;
    const int n = static_cast<int>(members.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = k;
        const double y = freqs[members[k]];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    if (n >= 2 && det > 0.0) {
        fit.spacing = (n * sxy - sx * sy) / det;
        fit.intercept = (sy - fit.spacing * sx) / n;
    } else {
        fit.spacing = 0.0;
        fit.intercept = sy / std::max(1, n);
    }
    for (int k = 0; k < n; ++k) {
        const double r = freqs[members[k]] - (fit.intercept + fit.spacing * k);
        fit.ssr += r * r;
    }
    return fit;
}

} // namespace

ParameterReport retrieve_kerr_ladder(const EigenSpectrum& spec, const KerrLadderOptions& opts) {
    const std::vector<double> all = spec.frequencies();
    const int k = std::min<int>(2 * opts.expected_rungs, static_cast<int>(all.size()));
    if (k < 4) {
        throw std::invalid_argument("retrieve_kerr_ladder: need at least 4 conjugate pairs");
    }
    std::vector<double> freqs(all.begin(), all.begin() + k);  // already ascending

    // Exhaustive split into two ladders of consecutive rungs; bit i of the mask
    // assigns freqs[i] to the second ladder. Frequency 0 stays in the first, so
    // block-contiguous splits are preferred on exact ties.
    double best_ssr = std::numeric_limits<double>::infinity();
    LadderFit best_a, best_b;
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
        if (mask & 1u) {
            continue;
        }
        std::vector<int> ma, mb;
        for (int i = 0; i < k; ++i) {
            ((mask >> i) & 1u ? mb : ma).push_back(i);
        }
        if (ma.size() < 2 || mb.size() < 2) {
            continue;
        }
        const LadderFit fa = fit_ladder(freqs, ma);
        const LadderFit fb = fit_ladder(freqs, mb);
        if (fa.spacing <= 0.0 || fb.spacing <= 0.0) {
            continue;
        }
        const double ssr = fa.ssr + fb.ssr;
        if (ssr < best_ssr) {
            best_ssr = ssr;
            best_a = fa;
            best_b = fb;
        }
    }
    if (!std::isfinite(best_ssr)) {
        throw LadderAmbiguityError("retrieve_kerr_ladder: no valid two-ladder split", freqs);
    }
    const double rms = std::sqrt(best_ssr / k);
    const double min_spacing = std::min(best_a.spacing, best_b.spacing);
    if (rms > opts.ambiguity_tol * min_spacing) {
        throw LadderAmbiguityError("retrieve_kerr_ladder: ladder grouping ambiguous (RMS " +
                                   std::to_string(rms) + ")", freqs);
    }

    // Lower first rung is the y ladder (ω_y < ω_x throughout the model zoo).
    const LadderFit& lad_y = freqs[best_a.members[0]] <= freqs[best_b.members[0]] ? best_a : best_b;
    const LadderFit& lad_x = (&lad_y == &best_a) ? best_b : best_a;

    ParameterReport rep;
    rep.system = "kerr";
    rep.retrieved["omega_y"] = freqs[lad_y.members[0]];
    rep.retrieved["omega_x"] = freqs[lad_x.members[0]];
    rep.retrieved["chi_y"] = freqs[lad_y.members[1]] - freqs[lad_y.members[0]];
    rep.retrieved["chi_x"] = freqs[lad_x.members[1]] - freqs[lad_x.members[0]];
    rep.retrieved["ladder_rms"] = rms;

    const auto provenance = [&](const LadderFit& lad, int rung) {
        return mode_indices(spec.modes[lad.members[rung]]);
    };
    rep.provenance["omega_y"] = provenance(lad_y, 0);
    rep.provenance["omega_x"] = provenance(lad_x, 0);
    auto py = provenance(lad_y, 1);
    auto py0 = provenance(lad_y, 0);
    py.insert(py.end(), py0.begin(), py0.end());
    rep.provenance["chi_y"] = py;
    auto px = provenance(lad_x, 1);
    auto px0 = provenance(lad_x, 0);
    px.insert(px.end(), px0.begin(), px0.end());
    rep.provenance["chi_x"] = px;
    copy_eigenvalues(rep, spec);
    return rep;
}

ParameterReport retrieve_cross_kerr(const EigenSpectrum& spec, const CrossKerrInputs& in) {
    if (in.n_x_ss <= 0.0 || in.n_y_ss <= 0.0) {
        throw std::domain_error("retrieve_cross_kerr: steady-state occupations must be positive");
    }
    if (spec.modes.size() < 2) {
        throw std::invalid_argument("retrieve_cross_kerr: need at least 2 conjugate pairs");
    }
    const int ix = nearest_mode(spec, in.omega_x);
    const int iy = nearest_mode(spec, in.omega_y);
    if (ix == iy) {
        throw std::invalid_argument("retrieve_cross_kerr: modes collapse onto one frequency");
    }
    const double shift_x = spec.modes[ix].omega - in.omega_x;
    const double shift_y = spec.modes[iy].omega - in.omega_y;
    ParameterReport rep;
    rep.system = "cross_kerr";
    rep.retrieved["omega_x_dressed"] = spec.modes[ix].omega;
    rep.retrieved["omega_y_dressed"] = spec.modes[iy].omega;
    rep.retrieved["chi_xy"] = 0.5 * (shift_x / in.n_y_ss + shift_y / in.n_x_ss);
    rep.provenance["chi_xy"] = mode_indices(spec.modes[ix]);
    auto more = mode_indices(spec.modes[iy]);
    rep.provenance["chi_xy"].insert(rep.provenance["chi_xy"].end(), more.begin(), more.end());
    copy_eigenvalues(rep, spec);
    return rep;
}

ParameterReport retrieve_jc_coupling(const EigenSpectrum& spec, double omega_q,
                                     double omega_x) {
    const double center = 0.5 * (omega_q + omega_x);
    const double detuning = omega_q - omega_x;
    int best_lo = -1, best_hi = -1;
    double best_err = std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(spec.modes.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double lo = spec.modes[i].omega;
            const double hi = spec.modes[j].omega;
            if (lo > center || hi < center) {
                continue;
            }
            const double err = std::abs(0.5 * (lo + hi) - center);
            if (err < best_err - 1e-12 ||
                (std::abs(err - best_err) <= 1e-12 && best_hi >= 0 &&
                 hi - lo < spec.modes[best_hi].omega - spec.modes[best_lo].omega)) {
                best_err = err;
                best_lo = i;
                best_hi = j;
            }
        }
    }
    if (best_lo < 0) {
        throw std::invalid_argument("retrieve_jc_coupling: no mode pair brackets the dressed center");
    }
    const double split = spec.modes[best_hi].omega - spec.modes[best_lo].omega;
    const double s = split * split - detuning * detuning;

    ParameterReport rep;
    rep.system = "jaynes_cummings";
    rep.retrieved["omega_minus"] = spec.modes[best_lo].omega;
    rep.retrieved["omega_plus"] = spec.modes[best_hi].omega;
    if (s < 0.0) {
        rep.retrieved["g"] = 0.0;
        rep.flags.push_back("below_detuning");
    } else {
        rep.retrieved["g"] = 0.5 * std::sqrt(s);
    }
    auto prov = mode_indices(spec.modes[best_lo]);
    auto more = mode_indices(spec.modes[best_hi]);
    prov.insert(prov.end(), more.begin(), more.end());
    rep.provenance["g"] = prov;
    copy_eigenvalues(rep, spec);
    return rep;
}

ParameterReport retrieve_modulation_frequency(const EigenSpectrum& spec,
                                              double omega_x_hint, double omega_y_hint,
                                              const SidebandOptions& opts) {
    std::vector<double> freqs = spec.frequencies();
    std::vector<int> mode_of(freqs.size());
    for (size_t i = 0; i < freqs.size(); ++i) {
        mode_of[i] = static_cast<int>(i);
    }
    if (freqs.size() < 3) {
        throw UnresolvedSidebandsError("retrieve_modulation_frequency: too few modes", freqs);
    }

    // Drop the y-mode line.
    const int iy = nearest_mode(spec, omega_y_hint);
    freqs.erase(freqs.begin() + iy);
    mode_of.erase(mode_of.begin() + iy);

    // Anchor m = 0 at the line nearest the carrier hint.
    size_t anchor = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < freqs.size(); ++i) {
        const double d = std::abs(freqs[i] - omega_x_hint);
        if (d < dist) {
            dist = d;
            anchor = i;
        }
    }

    std::vector<double> gaps;  // signed offsets from the anchor
    for (size_t i = 0; i < freqs.size(); ++i) {
        if (i != anchor) {
            gaps.push_back(freqs[i] - freqs[anchor]);
        }
    }

    // Candidate spacings from integer fractions of each observed gap; each
    // candidate implies an integer assignment which is then refit jointly.
    double best_res = std::numeric_limits<double>::infinity();
    double best_a = 0.0, best_d = 0.0;
    std::vector<int> best_m;
    for (const double g : gaps) {
        for (int q = 1; q <= opts.m_window; ++q) {
            const double cand = std::abs(g) / q;
            if (cand <= 0.0) {
                continue;
            }
            std::vector<int> ms(gaps.size());
            bool ok = true;
            std::vector<int> seen;
            for (size_t i = 0; i < gaps.size() && ok; ++i) {
                const int m = static_cast<int>(std::lround(gaps[i] / cand));
                if (m == 0 || std::abs(m) > opts.m_window) {
                    ok = false;
                    break;
                }
                if (std::find(seen.begin(), seen.end(), m) != seen.end()) {
                    ok = false;
                    break;
                }
                seen.push_back(m);
                ms[i] = m;
            }
            if (!ok) {
                continue;
            }
            // Joint least squares for (a, d) over f_i ≈ a + m_i d, anchor m = 0.
            const int n = static_cast<int>(gaps.size()) + 1;
            double sm = 0.0, smm = 0.0, sf = freqs[anchor], smf = 0.0;
            {
                size_t gi = 0;
                for (size_t i = 0; i < freqs.size(); ++i) {
                    if (i == anchor) {
                        continue;
                    }
                    const int m = ms[gi++];
                    sm += m;
                    smm += static_cast<double>(m) * m;
                    sf += freqs[i];
                    smf += m * freqs[i];
                }
            }
            const double det = n * smm - sm * sm;
            if (det <= 0.0) {
                continue;
            }
            const double d_fit = (n * smf - sm * sf) / det;
            const double a_fit = (sf - d_fit * sm) / n;
            if (d_fit <= 0.0) {
                continue;
            }
            double ssr = std::pow(freqs[anchor] - a_fit, 2);
            {
                size_t gi = 0;
                for (size_t i = 0; i < freqs.size(); ++i) {
                    if (i == anchor) {
                        continue;
                    }
                    ssr += std::pow(freqs[i] - a_fit - ms[gi++] * d_fit, 2);
                }
            }
            const double res = std::sqrt(ssr / n);
            if (res < best_res) {
                best_res = res;
                best_a = a_fit;
                best_d = d_fit;
                best_m = ms;
            }
        }
    }

    if (!std::isfinite(best_res) || best_res > opts.residual_tol * best_d) {
        throw UnresolvedSidebandsError(
            "retrieve_modulation_frequency: no consistent sideband comb (best residual " +
            std::to_string(best_res) + ")", freqs);
    }

    ParameterReport rep;
    rep.system = "modulated";
    rep.retrieved["omega_f"] = best_d;
    rep.retrieved["omega_x"] = best_a;
    rep.retrieved["comb_rms"] = best_res;
    std::vector<int> prov = mode_indices(spec.modes[mode_of[anchor]]);
    {
        size_t gi = 0;
        for (size_t i = 0; i < freqs.size(); ++i) {
            if (i == anchor) {
                continue;
            }
            if (best_m[gi++] != 0) {
                const auto idx = mode_indices(spec.modes[mode_of[i]]);
                prov.insert(prov.end(), idx.begin(), idx.end());
            }
        }
    }
    rep.provenance["omega_f"] = prov;
    copy_eigenvalues(rep, spec);
    return rep;
}

complexd modulation_oracle(complexd alpha0, double kappa, double omega_x,
                           double delta, double omega_f, double t, int bessel_order) {
    if (bessel_order < 1) {
        throw std::invalid_argument("modulation_oracle: bessel_order must be at least 1");
    }
    if (omega_f <= 0.0) {
        throw std::domain_error("modulation_oracle: omega_f must be positive");
    }
    const double z = delta / omega_f;
    complexd sum(0.0, 0.0);
    for (int m = -bessel_order; m <= bessel_order; ++m) {
        const double jm = (m >= 0 ? std::cyl_bessel_j(m, std::abs(z))
                                  : (m % 2 == 0 ? 1.0 : -1.0) * std::cyl_bessel_j(-m, std::abs(z)));
        const double sign = (z >= 0.0 || m % 2 == 0) ? 1.0 : -1.0;  // J_m(−z) = (−1)^m J_m(z)
        sum += sign * jm * std::exp(complexd(0.0, -(omega_x + m * omega_f) * t));
    }
    return alpha0 * std::exp(-0.5 * kappa * t) * sum;
}

} // namespace havoq
