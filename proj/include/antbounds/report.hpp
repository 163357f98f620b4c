#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "antbounds/cic_bounds.hpp"
#include "antbounds/did_bounds.hpp"
#include "antbounds/inference.hpp"
#include "antbounds/sensitivity.hpp"
#include "antbounds/simulation.hpp"

namespace antbounds {

using Json = nlohmann::ordered_json;

/// What produced a report: command, resolved configuration, input digest.
struct RunManifest {
  std::string command;
  Json config = Json::object();
  Json input = Json::object();
  std::optional<std::uint64_t> seed;
};

const char* version() noexcept;

/// Finite numbers as numbers, infinities as the string "unbounded".
Json number_or_unbounded(double v);

Json to_json(const RunManifest& m);
Json to_json(const SignRegime& r);
Json to_json(const IdentifiedInterval& iv);
Json to_json(const VarianceComponents& vc);
Json to_json(const ConfidenceSet& cs);
Json to_json(const InferenceResult& r);
Json to_json(const SweepResult& r);
Json to_json(const CicBoundsResult& r);
Json to_json(const DgpConfig& cfg);
Json to_json(const CoverageReport& r);
Json to_json(const IdentityReport& r);
Json to_json(const DecompositionCheck& r);
Json to_json(const ContainmentReport& r);
Json to_json(const ToyCheck& r);

/// {"manifest": ..., "results": ...}
Json make_report(const RunManifest& manifest, Json results);

/// Deterministic serialization; doubles use the shortest representation
/// that parses back to the same value.
std::string dump(const Json& j);

}  // namespace antbounds
