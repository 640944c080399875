// io.hpp — CSV and JSON persistence for series, models, and result records.

#pragma once

#include "havoq/mhavok.hpp"
#include "havoq/series.hpp"
#include "havoq/spectral.hpp"

#include <string>
#include <vector>

namespace havoq::io {

// CSV with a header row and %.17g values.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& rows);

// Trajectory export: `t,<channel names>` header, one record per output step.
void write_series_csv(const std::string& path, const MultichannelSeries& series);
void write_series_json(const std::string& path, const MultichannelSeries& series);

// `t` column plus named channels; inverse of write_series_csv.
MultichannelSeries read_series_csv(const std::string& path);

// Model dump with r, τ, index sets, R², A/B as row-major arrays, and the
// retained singular values — enough to re-run spectral analysis without refitting.
std::string model_to_json(const HavokModel& model, const RankSweep* sweep = nullptr);
void write_model_json(const std::string& path, const HavokModel& model,
                      const RankSweep* sweep = nullptr);

std::string report_to_json(const ParameterReport& report);
void write_report_json(const std::string& path, const ParameterReport& report);

void write_text(const std::string& path, const std::string& text);

} // namespace havoq::io
