#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "nstab/bounds.hpp"
#include "nstab/junta.hpp"

namespace nstab {

nlohmann::json to_json(const BoundSpec& spec);
nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const JuntaResult& result);
nlohmann::json to_json(const FriedgutResult& result);

// Junta runs share the {spec, model, instances, summary} envelope.
nlohmann::json junta_report(const std::string& model, const nlohmann::json& spec,
                            const JuntaResult& result);
nlohmann::json friedgut_report(const std::string& model, const nlohmann::json& spec,
                               const FriedgutResult& result);

// One row per instance; numbers use %.17g, missing values are empty cells.
void write_csv(std::ostream& out, const BoundReport& report);

// %.17g, with nan and inf spelled out.
std::string format_double(double x);

}  // namespace nstab
