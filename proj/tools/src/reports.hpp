#pragma once

#include <nlohmann/json.hpp>

#include "schurlab/schurlab.hpp"

namespace schurlab::cli {

using nlohmann::json;

json to_json(const Group& g, const DecompositionReport& r);
json to_json(const Group& g, const DeltaResult& r);
json to_json(const Group& g, const Estimate& e);
json to_json(const Group& g, const MtpReport& r);
json to_json(const Group& g, const ScheduleRow& r);
json to_json(const PsdReport& r);
json to_json(const NormResult& r);
json to_json(const CpNormReport& r);
json to_json(const SchurTestBound& r);
json to_json(const L1MultiplierBound& r);
json to_json(const std::vector<LadderStep>& ladder);

}  // namespace schurlab::cli
