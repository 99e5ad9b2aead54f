#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ccopt/avg_opt.hpp"
#include "ccopt/subpack.hpp"

namespace py = pybind11;
using namespace ccopt;

namespace {

py::dict opt_result_dict(const OptResult& r) {
  py::dict d;
  d["level"] = level_name(r.level);
  d["status"] = to_string(r.status);
  d["objective"] = r.objective;
  d["iterations"] = r.iterations;
  if (r.x) d["x"] = r.x->x;
  if (r.y) d["y"] = r.y->y;
  if (r.z) d["z"] = r.z->z;
  return d;
}

std::vector<std::string> violation_strings(const std::vector<Violation>& vs) {
  std::vector<std::string> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.push_back(v.describe());
  return out;
}

PartitionParam partition_from(const Instance& inst,
                              const std::vector<std::vector<double>>& rows) {
  // Accept either the per-subset layout (2^K columns) or the per-size
  // symmetric layout (K+1 columns) and normalize to the former.
  if (!rows.empty() && static_cast<int>(rows.front().size()) == inst.K + 1) {
    SymmetricParam y;
    y.K = inst.K;
    y.N = inst.N;
    y.y = rows;
    return expand(y);
  }
  PartitionParam x;
  x.K = inst.K;
  x.N = inst.N;
  x.x = rows;
  return x;
}

}  // namespace

PYBIND11_MODULE(_ccopt, m) {
  m.doc() = "uncoded cache placement optimization for coded delivery";

  py::class_<Popularity>(m, "Popularity")
      .def_static("zipf", &Popularity::zipf, py::arg("files"), py::arg("gamma"))
      .def_static("uniform", &Popularity::uniform, py::arg("files"))
      .def_static("from_probabilities", &Popularity::from_probabilities, py::arg("probs"))
      .def("prob", &Popularity::prob, py::arg("file"))
      .def("tail", &Popularity::tail, py::arg("file"))
      .def_property_readonly("values", &Popularity::values)
      .def("__len__", &Popularity::size);

  py::class_<Instance>(m, "Instance")
      .def(py::init<int, int, double, Popularity>(), py::arg("K"), py::arg("N"),
           py::arg("M"), py::arg("popularity"))
      .def_readonly("K", &Instance::K)
      .def_readonly("N", &Instance::N)
      .def_readonly("M", &Instance::M)
      .def_readonly("popularity", &Instance::pop);

  m.def("leftover_rank_prob", &leftover_rank_prob, py::arg("rank"), py::arg("distinct"),
        py::arg("file"), py::arg("popularity"), py::arg("users"));
  m.def("leftover_rank_prob_enum", &leftover_rank_prob_enum, py::arg("rank"),
        py::arg("distinct"), py::arg("file"), py::arg("popularity"), py::arg("users"));
  m.def("distinct_files_prob", &distinct_files_prob, py::arg("distinct"), py::arg("users"),
        py::arg("files"));

  m.def(
      "validate",
      [](const Instance& inst, const std::vector<std::vector<double>>& rows) {
        return violation_strings(validate(partition_from(inst, rows), inst));
      },
      py::arg("instance"), py::arg("placement"),
      "empty list when the placement satisfies every constraint");

  m.def(
      "expand_symmetric",
      [](const Instance& inst, const std::vector<std::vector<double>>& y) {
        SymmetricParam p;
        p.K = inst.K;
        p.N = inst.N;
        p.y = y;
        return expand(p).x;
      },
      py::arg("instance"), py::arg("y"),
      "per-size placement -> per-subset placement (2^K columns per file)");

  m.def(
      "average_load",
      [](const Instance& inst, const std::vector<std::vector<double>>& rows) {
        return average_load_exact(inst, partition_from(inst, rows));
      },
      py::arg("instance"), py::arg("placement"),
      "expected delivery load by full demand enumeration");

  m.def(
      "average_load_mc",
      [](const Instance& inst, const std::vector<std::vector<double>>& rows, long trials,
         uint64_t seed) {
        const McEstimate e = average_load_mc(inst, partition_from(inst, rows), trials, seed);
        py::dict d;
        d["mean"] = e.mean;
        d["std_error"] = e.std_error;
        d["trials"] = e.trials;
        return d;
      },
      py::arg("instance"), py::arg("placement"), py::arg("trials"), py::arg("seed") = 0);

  m.def(
      "delivery_plan",
      [](const Instance& inst, const std::vector<std::vector<double>>& rows,
         const Demand& demand) {
        const PartitionParam x = partition_from(inst, rows);
        const DeliveryPlan plan = delivery(inst, x, demand);
        py::list msgs;
        for (const auto& msg : plan.messages) {
          py::dict d;
          py::list users;
          for (int k = 1; k <= inst.K; ++k)
            if (msg.subset & (1u << (k - 1))) users.append(k);
          d["subset"] = users;
          d["length"] = msg.length;
          msgs.append(d);
        }
        return msgs;
      },
      py::arg("instance"), py::arg("placement"), py::arg("demand"));

  m.def(
      "decode_check",
      [](const Instance& inst, const std::vector<std::vector<double>>& rows,
         const Demand& demand) {
        return decode_check(inst, partition_from(inst, rows), demand);
      },
      py::arg("instance"), py::arg("placement"), py::arg("demand"),
      "true when every user can recover its file from cache plus messages");

  m.def(
      "solve_average",
      [](const Instance& inst, const std::string& level) {
        if (level == "p1") return opt_result_dict(solve_full(inst));
        if (level == "p2") return opt_result_dict(solve_symmetric(inst));
        if (level == "p3") return opt_result_dict(solve_uniform(inst));
        throw std::invalid_argument("level must be p1|p2|p3");
      },
      py::arg("instance"), py::arg("level") = "p2");

  m.def(
      "uniform_closed_form",
      [](int K, int N, double M) {
        const UniformOptimum u = uniform_closed_form(K, N, M);
        py::dict d;
        d["z"] = u.z.z;
        d["load"] = u.load;
        return d;
      },
      py::arg("K"), py::arg("N"), py::arg("M"));

  m.def("baseline_mn_load", &baseline_mn_load, py::arg("instance"));
  m.def("baseline_yu_load", &baseline_yu_load, py::arg("instance"));

  m.def(
      "subpack_optimize",
      [](const Instance& inst, int f_hat, double delta, int starts, uint64_t seed) {
        SubpackConfig cfg;
        cfg.f_hat = f_hat;
        cfg.delta = delta;
        cfg.starts = starts;
        cfg.seed = seed;
        const DemandStats stats = DemandStats::compute(inst.pop, inst.K);
        const MultiStartResult ms = dc_multi_start(inst, stats, cfg);
        py::dict d;
        d["found"] = ms.found;
        d["runs"] = ms.runs;
        d["feasible_runs"] = ms.feasible_runs;
        if (ms.found) {
          d["objective"] = ms.best.objective;
          d["iterations"] = ms.best.iterations;
          d["y"] = ms.best.y.y;
          d["l0_per_file"] = ms.best.l0_per_file;
          d["margin"] = ms.best.margin;
        }
        return d;
      },
      py::arg("instance"), py::arg("f_hat"), py::arg("delta") = 1e-4,
      py::arg("starts") = 100, py::arg("seed") = 0);

  m.def(
      "support_oracle",
      [](const Instance& inst, int f_hat) {
        const DemandStats stats = DemandStats::compute(inst.pop, inst.K);
        const SupportOracleResult r = support_oracle(inst, stats, f_hat);
        py::dict d;
        d["found"] = r.found;
        d["lp_count"] = r.lp_count;
        if (r.found) {
          d["objective"] = r.objective;
          d["y"] = r.y.y;
        }
        return d;
      },
      py::arg("instance"), py::arg("f_hat"),
      "exhaustive support enumeration; exact but exponential");

  m.def("sum_largest", &sum_largest, py::arg("values"), py::arg("count"));
  m.def(
      "sum_largest_subgradient",
      [](const std::vector<std::vector<double>>& y, int file, int f_hat) {
        SymmetricParam p;
        p.N = static_cast<int>(y.size());
        p.K = static_cast<int>(y.front().size()) - 1;
        p.y = y;
        return sum_largest_subgradient(p, file, f_hat);
      },
      py::arg("y"), py::arg("file"), py::arg("f_hat"));
  m.def(
      "l0_count", [](const std::vector<double>& v) { return l0_count(v); },
      py::arg("values"));
}
