#include "ccopt/json_io.hpp"

namespace ccopt {

Json to_json(const Instance& inst) {
  return Json{{"K", inst.K}, {"N", inst.N}, {"M", inst.M}, {"popularity", inst.pop.values()}};
}

Instance instance_from_json(const Json& j) {
  const int K = j.at("K").get<int>();
  const int N = j.at("N").get<int>();
  const double M = j.at("M").get<double>();
  const Json& pop = j.at("popularity");
  if (pop.is_object()) {
    return Instance(K, N, M, Popularity::zipf(N, pop.at("zipf_gamma").get<double>()));
  }
  return Instance(K, N, M, Popularity::from_probabilities(pop.get<std::vector<double>>()));
}

Json to_json(const PartitionParam& x) {
  return Json{{"level", "full-x"}, {"K", x.K}, {"N", x.N}, {"x", x.x}};
}

Json to_json(const SymmetricParam& y) {
  return Json{{"level", "symmetric-y"}, {"K", y.K}, {"N", y.N}, {"y", y.y}};
}

Json to_json(const UniformParam& z, int N) {
  return Json{{"level", "uniform-z"}, {"K", z.K}, {"N", N}, {"z", z.z}};
}

PartitionParam partition_from_json(const Json& j) {
  const std::string level = j.at("level").get<std::string>();
  const int K = j.at("K").get<int>();
  const int N = j.at("N").get<int>();
  if (level == "full-x") {
    PartitionParam x;
    x.K = K;
    x.N = N;
    x.x = j.at("x").get<std::vector<std::vector<double>>>();
    return x;
  }
  if (level == "symmetric-y") {
    SymmetricParam y;
    y.K = K;
    y.N = N;
    y.y = j.at("y").get<std::vector<std::vector<double>>>();
    return expand(y);
  }
  if (level == "uniform-z") {
    UniformParam z;
    z.K = K;
    z.z = j.at("z").get<std::vector<double>>();
    return expand(expand(z, N));
  }
  throw std::invalid_argument("parameter json: unknown level '" + level + "'");
}

Json to_json(const DeliveryPlan& plan, int K) {
  Json arr = Json::array();
  for (const auto& msg : plan.messages) {
    std::vector<int> users;
    for (int k = 1; k <= K; ++k)
      if (msg.subset & (1u << (k - 1))) users.push_back(k);
    arr.push_back(Json{{"subset", users}, {"length", msg.length}});
  }
  return arr;
}

}  // namespace ccopt
