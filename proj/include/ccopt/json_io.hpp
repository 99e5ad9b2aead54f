#pragma once

#include <json.hpp>

#include "ccopt/avg_opt.hpp"
#include "ccopt/subpack.hpp"

namespace ccopt {

using Json = nlohmann::json;

// Instance <-> {"K":int, "N":int, "M":float,
//               "popularity": [floats] | {"zipf_gamma": float}}
Json to_json(const Instance& inst);
Instance instance_from_json(const Json& j);

// Placement parameters, tagged with their level name.
Json to_json(const PartitionParam& x);
Json to_json(const SymmetricParam& y);
Json to_json(const UniformParam& z, int N);

// Parses any of the three levels; the result is always usable as a full
// placement via the expansion chain.
PartitionParam partition_from_json(const Json& j);

// [{"subset": [users], "length": float}, ...]
Json to_json(const DeliveryPlan& plan, int K);

}  // namespace ccopt
