#pragma once

#include <string>

#include <json.hpp>

#include "conflate/distribution.hpp"

namespace conflate {

// Wire format for a DistributionSpec:
//   {"kind":"normal","params":{"mu":0.0,"sigma2":1.0}}       parametric families
//   {"kind":"pmf","atoms":[[x,m],...]}
//   {"kind":"grid","points":[...],"values":[...]}
//   {"kind":"truncated","inner":{...},"lo":...,"hi":...}     null lo/hi = unbounded
// Numbers are IEEE doubles; emitted text uses shortest round-trip formatting
// with keys sorted, so equal specs serialize byte-identically.
nlohmann::json spec_to_json(const DistributionSpec& spec);
DistributionSpec spec_from_json(const nlohmann::json& j);

// Canonical text form: compact dump, sorted keys, trailing newline.
std::string canonical_dump(const nlohmann::json& j);

}  // namespace conflate
