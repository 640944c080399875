// repro.hpp — canned configurations for the figure and table reproduction targets.

#pragma once

#include "havoq/config.hpp"

#include <string>
#include <vector>

namespace havoq::repro {

ExperimentConfig qho(double kappa);
ExperimentConfig kerr(double chi_x, double chi_y, bool closed = false);
ExperimentConfig cross_kerr(double chi_xy);
ExperimentConfig jaynes_cummings(double g, double omega_q);
ExperimentConfig modulated(double delta, double omega_f);

std::vector<std::string> targets();  // fig2 … fig8, table2

// Runs one target into out_dir/<target>/. Returns 0 on success, 1 when any
// point failed.
int reproduce(const std::string& target, const std::string& out_dir, int threads = 1);

} // namespace havoq::repro
