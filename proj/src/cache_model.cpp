#include "ccopt/cache_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace ccopt {

Instance::Instance(int K_, int N_, double M_, Popularity pop_)
    : K(K_), N(N_), M(M_), pop(std::move(pop_)) {
  if (K < 1 || K > 20) throw std::invalid_argument("instance: K out of range");
  if (N < 1) throw std::invalid_argument("instance: N must be positive");
  if (pop.size() != N) throw std::invalid_argument("instance: popularity length != N");
  if (M < 0.0 || M > static_cast<double>(N))
    throw std::invalid_argument("instance: M must lie in [0, N]");
}

SubsetIndexer::SubsetIndexer(int K) : K_(K) {
  if (K < 1 || K > 20) throw std::invalid_argument("subset indexer: K out of range");
  const int total = 1 << K;
  masks_.resize(total);
  index_.resize(total);
  sizes_.resize(total);
  band_start_.assign(K + 2, 0);
  std::vector<int> band_count(K + 1, 0);
  for (int m = 0; m < total; ++m) ++band_count[std::popcount(static_cast<uint32_t>(m))];
  for (int s = 0; s <= K; ++s) band_start_[s + 1] = band_start_[s] + band_count[s];
  std::vector<int> cursor(band_start_.begin(), band_start_.end() - 1);
  for (int m = 0; m < total; ++m) {  // ascending mask within each band
    const int s = std::popcount(static_cast<uint32_t>(m));
    const int at = cursor[s]++;
    masks_[at] = static_cast<uint32_t>(m);
    index_[m] = at;
    sizes_[at] = s;
  }
}

PartitionParam expand(const SymmetricParam& y) {
  const SubsetIndexer idx(y.K);
  PartitionParam x;
  x.K = y.K;
  x.N = y.N;
  x.x.assign(y.N, std::vector<double>(idx.count(), 0.0));
  for (int n = 0; n < y.N; ++n)
    for (int j = 0; j < idx.count(); ++j) x.x[n][j] = y.y[n][idx.size_of(j)];
  return x;
}

SymmetricParam expand(const UniformParam& z, int N) {
  SymmetricParam y;
  y.K = z.K;
  y.N = N;
  y.y.assign(N, z.z);
  return y;
}

std::string Violation::describe() const {
  std::ostringstream os;
  switch (constraint) {
    case Constraint::SizeRange:
      os << "file " << file << ", slot " << index << ": size " << value << " outside [0, 1]";
      break;
    case Constraint::PartitionSum:
      os << "file " << file << ": subfile sizes sum to " << value << " (expected 1)";
      break;
    case Constraint::CacheMemory:
      os << "user " << index << ": cached volume " << value << " exceeds the cache size";
      break;
    case Constraint::PopularityOrder:
      os << "files " << file << " -> " << file + 1 << ", type " << index
         << ": sizes increase with the file index";
      break;
  }
  return os.str();
}

double memory_used(const PartitionParam& x, int user) {
  const SubsetIndexer idx(x.K);
  const uint32_t bit = 1u << (user - 1);
  double used = 0.0;
  for (int n = 0; n < x.N; ++n)
    for (int j = 0; j < idx.count(); ++j)
      if (idx.mask_at(j) & bit) used += x.x[n][j];
  return used;
}

std::vector<Violation> validate(const PartitionParam& x, const Instance& inst) {
  if (x.K != inst.K || x.N != inst.N || static_cast<int>(x.x.size()) != inst.N)
    throw std::invalid_argument("validate: parameter shape does not match the instance");
  const SubsetIndexer idx(inst.K);
  std::vector<Violation> out;
  for (int n = 0; n < inst.N; ++n) {
    if (static_cast<int>(x.x[n].size()) != idx.count())
      throw std::invalid_argument("validate: subfile vector length != 2^K");
    double sum = 0.0;
    for (int j = 0; j < idx.count(); ++j) {
      const double v = x.x[n][j];
      if (v < -kFeasTol || v > 1.0 + kFeasTol)
        out.push_back({Constraint::SizeRange, n + 1, j, v});
      sum += v;
    }
    if (std::abs(sum - 1.0) > kFeasTol) out.push_back({Constraint::PartitionSum, n + 1, 0, sum});
  }
  for (int k = 1; k <= inst.K; ++k) {
    const double used = memory_used(x, k);
    if (used > inst.M + kFeasTol) out.push_back({Constraint::CacheMemory, 0, k, used});
  }
  return out;
}

std::vector<Violation> validate(const SymmetricParam& y, const Instance& inst) {
  if (y.K != inst.K || y.N != inst.N || static_cast<int>(y.y.size()) != inst.N)
    throw std::invalid_argument("validate: parameter shape does not match the instance");
  std::vector<Violation> out;
  double used = 0.0;
  for (int n = 0; n < inst.N; ++n) {
    if (static_cast<int>(y.y[n].size()) != inst.K + 1)
      throw std::invalid_argument("validate: type vector length != K+1");
    double sum = 0.0;
    for (int s = 0; s <= inst.K; ++s) {
      const double v = y.y[n][s];
      if (v < -kFeasTol || v > 1.0 + kFeasTol)
        out.push_back({Constraint::SizeRange, n + 1, s, v});
      sum += binomial_d(inst.K, s) * v;
      if (s >= 1) used += binomial_d(inst.K - 1, s - 1) * v;
      if (s >= 1 && n + 1 < inst.N && y.y[n + 1][s] > y.y[n][s] + kFeasTol)
        out.push_back({Constraint::PopularityOrder, n + 1, s, y.y[n + 1][s] - y.y[n][s]});
    }
    if (std::abs(sum - 1.0) > kFeasTol) out.push_back({Constraint::PartitionSum, n + 1, 0, sum});
  }
  if (used > inst.M + kFeasTol) out.push_back({Constraint::CacheMemory, 0, 0, used});
  return out;
}

std::vector<Violation> validate(const UniformParam& z, const Instance& inst) {
  if (z.K != inst.K) throw std::invalid_argument("validate: parameter shape does not match the instance");
  if (static_cast<int>(z.z.size()) != inst.K + 1)
    throw std::invalid_argument("validate: type vector length != K+1");
  std::vector<Violation> out;
  double sum = 0.0, used = 0.0;
  for (int s = 0; s <= inst.K; ++s) {
    const double v = z.z[s];
    if (v < -kFeasTol || v > 1.0 + kFeasTol) out.push_back({Constraint::SizeRange, 0, s, v});
    sum += binomial_d(inst.K, s) * v;
    used += binomial_d(inst.K, s) * s * v;
  }
  if (std::abs(sum - 1.0) > kFeasTol) out.push_back({Constraint::PartitionSum, 0, 0, sum});
  if (used > inst.K * inst.M / inst.N + kFeasTol) out.push_back({Constraint::CacheMemory, 0, 0, used});
  return out;
}

void clamp_small_negatives(std::vector<double>& v, double tol) {
  for (double& e : v)
    if (e < 0.0 && e >= -tol) e = 0.0;
}

}  // namespace ccopt
