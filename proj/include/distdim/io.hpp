#pragma once

// Text formats: norm files (JSON), schedules ("k m_k M_k" lines), point and
// distance clouds (CSV), covering profiles (CSV "delta,count,provenance").

#include <string>

#include "distdim/covering.hpp"
#include "distdim/digitsets.hpp"
#include "distdim/norms.hpp"
#include "distdim/point_cloud.hpp"

namespace distdim::io {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// {"polyhedral": {"q": 3, "facets": [["2/3","0"], ...]}} or
/// {"lp": {"p": 4, "weights": [1, 1]}}. Throws ParseError.
NormSpec parse_norm(const std::string& text);
std::string norm_to_json(const NormSpec& norm);

/// Lines "k m_k M_k"; blank lines and '#' comments are skipped.
BlockSchedule parse_schedule(const std::string& text, const Rational& target_density, unsigned q,
                             BlockSchedule::GrowthRule rule = BlockSchedule::GrowthRule::required);
std::string schedule_to_text(const BlockSchedule& schedule);

enum class NumberFormat { exact, decimal };

/// One point per row. exact writes "p/q"; decimal writes `precision`
/// significant digits.
std::string cloud_to_csv(const PointCloud& cloud, NumberFormat format = NumberFormat::exact, int precision = 17);
/// Rows of "p/q" or integers give an exact cloud; any decimal or exponent
/// entry makes the whole cloud approximate. '#' lines are skipped.
PointCloud parse_cloud_csv(const std::string& text);

std::string profile_to_csv(const CoveringProfile& profile);
CoveringProfile parse_profile_csv(const std::string& text);

}  // namespace distdim::io
