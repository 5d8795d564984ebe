#pragma once

#include <json.hpp>

#include "folio/collection.hpp"
#include "folio/eval/runner.hpp"

namespace folio::eval {

nlohmann::json to_json(const MetricAggregate& aggregate);
nlohmann::json to_json(const MetricsReport& report);
nlohmann::json to_json(const TailReport& report);

}  // namespace folio::eval

namespace folio {

nlohmann::json to_json(const PageRef& page);
nlohmann::json to_json(const ScoreExplanation& explanation);

}  // namespace folio
