#pragma once

// JSON serialization of library results. Keys keep insertion order and no
// wall-clock data is written, so a fixed seed gives a byte-identical body.

#include <string>

#include "finsmet/catalog.hpp"
#include "finsmet/metrizability.hpp"
#include "finsmet/verification.hpp"

namespace finsmet {

inline constexpr const char* kArtifactName = "finsmet";
inline constexpr const char* kArtifactVersion = "0.1.0";

/// Finite values as numbers; inf, -inf and nan as the strings "inf", "-inf", "nan".
Json number_json(double x);
/// Inverse of number_json.
double json_number(const Json& j);

Json to_json(const std::vector<SubfamilyTag>& tags);
Json to_json(const ChebyshevSeries& series);
Json to_json(const ConstraintFit& fit);
Json to_json(const LagrangianDescriptor& d);
Json to_json(const MetrizabilityReport& r);
Json to_json(const ComparisonResult& c);
Json to_json(const VerifyResult& r);

/// Two-space indented dump with a trailing newline.
std::string dump_report(const Json& report);

}  // namespace finsmet
