#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccopt/combinatorics.hpp"

namespace ccopt {

// Feasibility tolerance shared by all parameter validation.
inline constexpr double kFeasTol = 1e-9;

// One caching problem: K users with cache size M (in files), N files with the
// given popularity. Files are 1-based and sorted by popularity; users are
// 1-based and addressed as bits (user k <-> bit k-1) in subset masks.
struct Instance {
  int K = 0;
  int N = 0;
  double M = 0.0;
  Popularity pop;

  Instance(int K, int N, double M, Popularity pop);
};

// Canonical order of the 2^K user subsets: grouped by cardinality, ascending
// bitmask within each group. All per-file subfile vectors use this order, so
// type bands (all subsets of one size) are contiguous.
class SubsetIndexer {
 public:
  explicit SubsetIndexer(int K);
  int users() const { return K_; }
  int count() const { return static_cast<int>(masks_.size()); }
  int index_of(uint32_t mask) const { return index_[mask]; }
  uint32_t mask_at(int index) const { return masks_[index]; }
  int size_of(int index) const { return sizes_[index]; }
  // First index of the band of subsets with the given cardinality.
  int band_start(int size) const { return band_start_[size]; }

 private:
  int K_;
  std::vector<uint32_t> masks_;
  std::vector<int> index_;
  std::vector<int> sizes_;
  std::vector<int> band_start_;
};

// Full placement: x[n-1][j] is the fraction of file n stored exactly at the
// users of the j-th subset (canonical order).
struct PartitionParam {
  int K = 0, N = 0;
  std::vector<std::vector<double>> x;
};

// Type-symmetric placement: y[n-1][s] is the common size of every subset-of-
// size-s subfile of file n.
struct SymmetricParam {
  int K = 0, N = 0;
  std::vector<std::vector<double>> y;
};

// File-uniform placement: z[s] applies to every file.
struct UniformParam {
  int K = 0;
  std::vector<double> z;
};

PartitionParam expand(const SymmetricParam& y);
SymmetricParam expand(const UniformParam& z, int N);

enum class Constraint {
  SizeRange,        // a subfile size outside [0, 1]
  PartitionSum,     // a file's subfile sizes do not sum to 1
  CacheMemory,      // a user's cached volume exceeds M
  PopularityOrder,  // type sizes increase with the file index (s >= 1)
};

struct Violation {
  Constraint constraint;
  int file = 0;   // 1-based; 0 when not file-specific
  int index = 0;  // subset index, type, or user depending on the constraint
  double value = 0.0;
  std::string describe() const;
};

std::vector<Violation> validate(const PartitionParam& x, const Instance& inst);
std::vector<Violation> validate(const SymmetricParam& y, const Instance& inst);
std::vector<Violation> validate(const UniformParam& z, const Instance& inst);

// Round solver noise in [-kFeasTol, 0) up to zero, in place.
void clamp_small_negatives(std::vector<double>& v, double tol = kFeasTol);

// Total cache volume per user (all equal by symmetry for expanded params).
double memory_used(const PartitionParam& x, int user);

}  // namespace ccopt
