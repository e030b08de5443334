#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kweave/erasure.hpp"
#include "kweave/jframes.hpp"
#include "kweave/weaving.hpp"

namespace kweave::io {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kBundleVersion = 1;

/// On-disk container for one space plus named vector families.
/// Layout:
///   { "version": 1,
///     "dimension": d, "signature": [+-1,...], "field": "real"|"complex",
///     "families": { "F": [vec, ...], ... },
///     "metadata": { ... } }            // optional, carried verbatim
/// Real-field vector entries are bare numbers; complex entries are [re, im]
/// (bare numbers are accepted on input as purely real).
struct FrameBundle {
  int version = kBundleVersion;
  KreinSpace space = KreinSpace::trivial(1);
  std::map<std::string, std::vector<KVector>> families;
  nlohmann::json metadata;  // null when absent

  bool has_family(const std::string& name) const;
  /// Throws ValidationError when the name is missing.
  FrameFamily family(const std::string& name) const;
};

/// Parse / load with location-bearing ValidationError messages
/// (e.g. "families.F[2]: expected 3 coordinates, got 2").
FrameBundle parse_bundle(const nlohmann::json& j);
FrameBundle parse_bundle_text(const std::string& text);
FrameBundle load_bundle(const std::string& path);

nlohmann::json bundle_to_json(const FrameBundle& b);
/// Canonical text: sorted keys, no whitespace, %.12g floats. Writing the
/// result back out reproduces it byte for byte.
std::string serialize_bundle(const FrameBundle& b);
void save_bundle(const FrameBundle& b, const std::string& path);

/// Canonical JSON dump: keys sorted, compact separators, finite floats
/// rendered with sig_digits significant digits, non-finite floats as null.
std::string canonical_dump(const nlohmann::json& j, int sig_digits = 12);

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::string_view text);
/// 16 lowercase hex digits of fnv1a64.
std::string digest_hex(std::string_view text);
/// Digest of the canonical bundle serialization.
std::string bundle_digest(const FrameBundle& b);

nlohmann::json scalar_to_json(const scalar& x, Field field);
nlohmann::json vector_to_json(const KVector& v, Field field);
nlohmann::json matrix_to_json(const Matrix& m, Field field);

nlohmann::json to_json(const FrameBounds& b);
nlohmann::json to_json(const FrameCheck& c, Field field);
nlohmann::json to_json(const SubsetBounds& s);
nlohmann::json to_json(const WeavingReport& r, Field field);
nlohmann::json to_json(const EquivalenceReport& r, Field field);
nlohmann::json to_json(const OperatorBoundReport& r);
nlohmann::json to_json(const PerturbationReport& r, Field field);
nlohmann::json to_json(const InverseOperatorReport& r, Field field);
nlohmann::json to_json(const ProjectionReport& r);
nlohmann::json to_json(const SignPartition& p);
nlohmann::json to_json(const DefinitenessReport& r);
nlohmann::json to_json(const JFrameReport& r);
nlohmann::json to_json(const JWeavingReport& r);
nlohmann::json to_json(const TwoSidedBounds& b);
nlohmann::json to_json(const ErasureReport& r);

/// Wrapper every CLI run emits. wall_seconds varies run to run; equality
/// checks between runs must compare payload (and the fields around it),
/// never the whole envelope.
struct ReportEnvelope {
  std::string tool_version = kToolVersion;
  std::string command;
  std::string input_digest;  // empty when no bundle was read
  bool seeded = false;
  std::uint64_t seed = 0;
  nlohmann::json payload;
  double wall_seconds = 0.0;
};

nlohmann::json envelope_to_json(const ReportEnvelope& e);
std::string envelope_dump(const ReportEnvelope& e);

}  // namespace kweave::io
