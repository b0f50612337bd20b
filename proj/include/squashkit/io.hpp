#pragma once

// Wire formats: JSON reports for POVMs, postprocessing matrices and
// feasibility verdicts, plus CSV curve output. Every CSV starts with a
// comment line recording the tool version and a hash of the generating
// configuration so curves stay traceable.

#include <cstdint>
#include <string>

#include "json.hpp"
#include "squashkit/check.hpp"
#include "squashkit/povm.hpp"

namespace squashkit {

inline constexpr const char* kToolVersion = "1.0.0";

// Complex matrix as row-major [re, im] pairs.
nlohmann::json operator_to_json(const Operator& op);

// {dim, labels, elements} with elements keyed in label order.
nlohmann::json povm_to_json(const Povm& povm);

// {full_labels, basic_labels, entries} with entries row-major.
nlohmann::json cpp_to_json(const CppMatrix& cpp);

// Flat verdict record for one device block decision.
nlohmann::json check_to_json(const DeviceCheck& report);

// FNV-1a hash of a configuration string.
std::uint64_t fnv1a(const std::string& text);

// "# squashkit <version> config=<fnv1a hex>"
std::string csv_comment(const std::string& config);

// Locale-independent %.12g rendering for CSV cells.
std::string format_double(double value);

}  // namespace squashkit
