#pragma once

#include <string>

#include "json.hpp"
#include "pdestab/certify.hpp"
#include "pdestab/problem.hpp"
#include "pdestab/thresholds.hpp"

namespace pdestab {

/// JSON encodings of the report types. Extended reals serialize as a number
/// when finite and as the string "inf" otherwise. CSV output uses 17
/// significant digits; JSON numbers use the shortest round-trip form.
nlohmann::json to_json(const ExtReal& v);
nlohmann::json to_json(const AssumptionReport& rep);
nlohmann::json to_json(const Thresholds& thr);
nlohmann::json to_json(const Certificate& cert);

std::string trajectory_csv_header();
std::string series_csv(const Certificate& cert);

}  // namespace pdestab
