#include "squashkit/io.hpp"

#include <cstdio>

namespace squashkit {

nlohmann::json operator_to_json(const Operator& op) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < op.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < op.cols(); ++j)
      row.push_back({op(i, j).real(), op(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json povm_to_json(const Povm& povm) {
  nlohmann::json elements = nlohmann::json::array();
  for (const auto& e : povm.elements) elements.push_back(operator_to_json(e));
  return {{"dim", povm.dim()}, {"labels", povm.labels}, {"elements", elements}};
}

nlohmann::json cpp_to_json(const CppMatrix& cpp) {
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index i = 0; i < cpp.entries.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < cpp.entries.cols(); ++j) row.push_back(cpp.entries(i, j));
    entries.push_back(row);
  }
  return {{"full_labels", cpp.full_labels},
          {"basic_labels", cpp.basic_labels},
          {"entries", entries}};
}

namespace {

const char* status_name(Feasibility status) {
  switch (status) {
    case Feasibility::Feasible:
      return "feasible";
    case Feasibility::Infeasible:
      return "infeasible";
    default:
      return "undecided";
  }
}

}  // namespace

nlohmann::json check_to_json(const DeviceCheck& report) {
  nlohmann::json j{{"device", report.device},
                   {"n", report.photons},
                   {"status", status_name(report.verdict.status)},
                   {"lambda_min", report.verdict.lambda_min},
                   {"iterations", report.verdict.iterations},
                   {"tol", report.verdict.tolerance},
                   {"residual", report.verdict.residual},
                   {"reduced", report.reduced},
                   {"cpp_valid", report.cpp_validation.ok()},
                   {"trivial_rest", report.trivial_rest},
                   {"free_dims", report.problem.free_basis.size()}};
  if (report.verdict.status == Feasibility::Infeasible) {
    nlohmann::json w = nlohmann::json::array();
    for (Eigen::Index i = 0; i < report.verdict.witness.size(); ++i)
      w.push_back({report.verdict.witness(i).real(), report.verdict.witness(i).imag()});
    j["witness"] = w;
    j["witness_value"] = report.verdict.witness_value;
  }
  return j;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string csv_comment(const std::string& config) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(config)));
  return std::string("# squashkit ") + kToolVersion + " config=" + hex;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

}  // namespace squashkit
