#pragma once

#include <cstdint>
#include <vector>

#include "ccopt/cache_model.hpp"

namespace ccopt {

// One demand realization: files[k-1] is the (1-based) file requested by user k.
using Demand = std::vector<int>;

// Bitmask of representative users: for each distinct requested file, the
// lowest-indexed user requesting it. Fixed rule, so plans are deterministic;
// for type-symmetric placements the load does not depend on the choice.
uint32_t representatives(const Demand& demand);

struct DeliveryPlan {
  struct Message {
    uint32_t subset = 0;  // user bitmask the message is formed for
    double length = 0.0;  // normalized size (zero-padded XOR of its components)
  };
  std::vector<Message> messages;  // subset size K down to 1, ascending mask within a size
  uint32_t representatives = 0;
};

// One message for every user subset intersecting the representatives; the
// message for subset S has length max_{k in S} x_{d_k, S\{k}}.
DeliveryPlan delivery(const Instance& inst, const PartitionParam& x, const Demand& demand);

// Total transmitted length for one demand (sum of message lengths).
double load(const Instance& inst, const PartitionParam& x, const Demand& demand);

// Expected load over all N^K demands, exact enumeration (Kahan-summed).
// Guarded by max_enumeration().
double average_load_exact(const Instance& inst, const PartitionParam& x);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long trials = 0;
};

// Monte Carlo estimate of the expected load. Demands are sampled by inverse
// CDF from raw std::mt19937_64 draws, so results are byte-reproducible for a
// given seed across platforms.
McEstimate average_load_mc(const Instance& inst, const PartitionParam& x, long long trials,
                           uint64_t seed);

// True when every user can reconstruct its requested file from its cache plus
// the transmitted messages: iterative peeling (a message reveals its one
// remaining unknown component to a user who knows all the others), then a
// recovered-mass-equals-one check per user within 1e-9.
bool decode_check(const Instance& inst, const PartitionParam& x, const Demand& demand);
bool decode_check(const Instance& inst, const PartitionParam& x, const Demand& demand,
                  const DeliveryPlan& plan);

// Per-variable coefficients c[n-1][s] of the closed-form expected load for
// type-symmetric placements, so that the expected load equals sum c . y.
std::vector<std::vector<double>> symmetric_load_coefficients(const Instance& inst,
                                                             const DemandStats& stats);

// Closed-form expected load for a type-symmetric placement. Rejects y that
// violates the placement constraints (including the popularity ordering).
double average_load_symmetric(const Instance& inst, const SymmetricParam& y,
                              const DemandStats& stats);

}  // namespace ccopt
