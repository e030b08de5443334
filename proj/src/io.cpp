#include "kweave/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace kweave::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

long long require_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<long long>();
}

scalar parse_entry(const json& j, Field field, const std::string& where) {
  if (j.is_number()) return scalar(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    scalar x(j[0].get<double>(), j[1].get<double>());
    if (field == Field::real && x.imag() != 0.0)
      fail(where, "imaginary part must be 0 in a real space");
    return x;
  }
  fail(where, "expected a number or [re, im]");
}

json index_set_json(const IndexSet& s) { return json(s); }

json optional_index_set(const std::optional<IndexSet>& s) {
  return s ? json(*s) : json(nullptr);
}

void dump_rec(const json& j, int digits, std::string& out) {
  switch (j.type()) {
    case json::value_t::null:
      out += "null";
      break;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case json::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      break;
    case json::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      break;
    case json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        break;
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.*g", digits, x);
      out += buf;
      break;
    }
    case json::value_t::string:
      out += json(j.get<std::string>()).dump();
      break;
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : j) {
        if (!first) out += ',';
        first = false;
        dump_rec(item, digits, out);
      }
      out += ']';
      break;
    }
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += json(key).dump();
        out += ':';
        dump_rec(value, digits, out);
      }
      out += '}';
      break;
    }
    default:
      out += "null";
      break;
  }
}

}  // namespace

bool FrameBundle::has_family(const std::string& name) const {
  return families.find(name) != families.end();
}

FrameFamily FrameBundle::family(const std::string& name) const {
  auto it = families.find(name);
  if (it == families.end()) fail("families." + name, "no such family");
  return FrameFamily(space, it->second);
}

FrameBundle parse_bundle(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("bundle: expected a JSON object");

  FrameBundle b;
  if (!j.contains("version")) fail("version", "missing");
  const long long ver = require_int(j.at("version"), "version");
  if (ver != kBundleVersion)
    fail("version", "unsupported value " + std::to_string(ver));
  b.version = static_cast<int>(ver);

  if (!j.contains("dimension")) fail("dimension", "missing");
  const long long dim = require_int(j.at("dimension"), "dimension");
  if (dim <= 0) fail("dimension", "expected a positive integer");
  if (!j.contains("signature") || !j.at("signature").is_array())
    fail("signature", "expected an array");
  std::vector<int> sig;
  sig.reserve(j.at("signature").size());
  for (std::size_t i = 0; i < j.at("signature").size(); ++i) {
    const std::string where = "signature[" + std::to_string(i) + "]";
    const long long s = require_int(j.at("signature")[i], where);
    if (s != 1 && s != -1) fail(where, "entries must be +1 or -1");
    sig.push_back(static_cast<int>(s));
  }
  if (sig.size() != static_cast<std::size_t>(dim))
    fail("signature", "expected " + std::to_string(dim) + " entries, got " +
                          std::to_string(sig.size()));
  if (!j.contains("field") || !j.at("field").is_string())
    fail("field", "expected \"real\" or \"complex\"");
  const std::string field_name = j.at("field").get<std::string>();
  Field field;
  if (field_name == "real")
    field = Field::real;
  else if (field_name == "complex")
    field = Field::cplx;
  else
    fail("field", "expected \"real\" or \"complex\", got \"" + field_name + "\"");
  b.space = KreinSpace(static_cast<std::size_t>(dim), sig, field);

  if (!j.contains("families") || !j.at("families").is_object())
    fail("families", "expected an object");
  if (j.at("families").empty()) fail("families", "at least one family is required");
  for (const auto& [name, arr] : j.at("families").items()) {
    const std::string fwhere = "families." + name;
    if (!arr.is_array()) fail(fwhere, "expected an array of vectors");
    std::vector<KVector> vecs;
    vecs.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string vwhere = fwhere + "[" + std::to_string(i) + "]";
      const json& row = arr[i];
      if (!row.is_array()) fail(vwhere, "expected an array of coordinates");
      if (row.size() != static_cast<std::size_t>(dim))
        fail(vwhere, "expected " + std::to_string(dim) + " coordinates, got " +
                         std::to_string(row.size()));
      KVector v(row.size());
      for (std::size_t k = 0; k < row.size(); ++k)
        v[k] = parse_entry(row[k], field, vwhere + "[" + std::to_string(k) + "]");
      vecs.push_back(std::move(v));
    }
    b.families.emplace(name, std::move(vecs));
  }

  if (j.contains("metadata")) b.metadata = j.at("metadata");
  return b;
}

FrameBundle parse_bundle_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bundle: invalid JSON: ") + e.what());
  }
  return parse_bundle(j);
}

FrameBundle load_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_bundle_text(ss.str());
}

nlohmann::json bundle_to_json(const FrameBundle& b) {
  json j;
  j["version"] = b.version;
  j["dimension"] = b.space.dim();
  j["signature"] = b.space.signature();
  j["field"] = b.space.field() == Field::real ? "real" : "complex";
  json fams = json::object();
  for (const auto& [name, vecs] : b.families) {
    json arr = json::array();
    for (const KVector& v : vecs) arr.push_back(vector_to_json(v, b.space.field()));
    fams[name] = std::move(arr);
  }
  j["families"] = std::move(fams);
  if (!b.metadata.is_null()) j["metadata"] = b.metadata;
  return j;
}

std::string serialize_bundle(const FrameBundle& b) {
  return canonical_dump(bundle_to_json(b));
}

void save_bundle(const FrameBundle& b, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << serialize_bundle(b) << '\n';
}

std::string canonical_dump(const nlohmann::json& j, int sig_digits) {
  std::string out;
  dump_rec(j, sig_digits, out);
  return out;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string digest_hex(std::string_view text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(text)));
  return std::string(buf);
}

std::string bundle_digest(const FrameBundle& b) {
  return digest_hex(serialize_bundle(b));
}

nlohmann::json scalar_to_json(const scalar& x, Field field) {
  if (field == Field::real) return x.real();
  return json::array({x.real(), x.imag()});
}

nlohmann::json vector_to_json(const KVector& v, Field field) {
  json arr = json::array();
  for (const scalar& x : v) arr.push_back(scalar_to_json(x, field));
  return arr;
}

nlohmann::json matrix_to_json(const Matrix& m, Field field) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(scalar_to_json(m(i, k), field));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json to_json(const FrameBounds& b) {
  return {{"lower", b.lower}, {"upper", b.upper}, {"is_frame", b.is_frame}};
}

nlohmann::json to_json(const FrameCheck& c, Field field) {
  json j;
  j["is_frame"] = c.is_frame;
  j["bounds"] = to_json(c.bounds);
  j["witness"] = c.witness ? vector_to_json(*c.witness, field) : json(nullptr);
  return j;
}

nlohmann::json to_json(const SubsetBounds& s) {
  return {{"subset", index_set_json(s.subset)}, {"lower", s.lower}, {"upper", s.upper}};
}

nlohmann::json to_json(const WeavingReport& r, Field field) {
  json j;
  j["universal_lower"] = r.universal_lower;
  j["universal_upper"] = r.universal_upper;
  j["is_weaving"] = r.is_weaving;
  j["exhaustive"] = r.exhaustive;
  j["examined"] = r.examined;
  j["worst_subset"] = index_set_json(r.worst_subset);
  j["witness"] = r.witness.empty() ? json(nullptr) : vector_to_json(r.witness, field);
  json per = json::array();
  for (const SubsetBounds& s : r.per_subset) per.push_back(to_json(s));
  j["per_subset"] = std::move(per);
  return j;
}

nlohmann::json to_json(const EquivalenceReport& r, Field field) {
  json forms = json::array();
  const char* names[4] = {"plain", "j_vectors", "j_inner", "j_both"};
  for (std::size_t i = 0; i < r.formulations.size(); ++i) {
    json f = to_json(r.formulations[i], field);
    f["formulation"] = names[i];
    forms.push_back(std::move(f));
  }
  return {{"formulations", std::move(forms)},
          {"max_relative_gap", r.max_relative_gap},
          {"bounds_agree", r.bounds_agree},
          {"verdicts_agree", r.verdicts_agree}};
}

nlohmann::json to_json(const OperatorBoundReport& r) {
  return {{"s_min", r.s_min},
          {"s_min_subset", index_set_json(r.s_min_subset)},
          {"universal_lower", r.universal_lower},
          {"universal_upper", r.universal_upper},
          {"is_weaving", r.is_weaving},
          {"upper_f", r.upper_f},
          {"upper_g", r.upper_g},
          {"lower_bound_holds", r.lower_bound_holds},
          {"quotient_bound_holds", r.quotient_bound_holds}};
}

nlohmann::json to_json(const PerturbationReport& r, Field field) {
  return {{"base", to_json(r.base)},
          {"deviation", r.deviation},
          {"u_invertible", r.u_invertible},
          {"hypothesis_holds", r.hypothesis_holds},
          {"predicted_lower", r.predicted_lower},
          {"woven", to_json(r.woven, field)},
          {"prediction_confirmed", r.prediction_confirmed}};
}

nlohmann::json to_json(const InverseOperatorReport& r, Field field) {
  return {{"pair", to_json(r.pair, field)},
          {"norm_f", r.norm_f},
          {"norm_g", r.norm_g},
          {"inverse_gap", r.inverse_gap},
          {"hypothesis_holds", r.hypothesis_holds},
          {"diagnostic_lower", r.diagnostic_lower},
          {"inverse_pair",
           r.inverse_pair ? to_json(*r.inverse_pair, field) : json(nullptr)}};
}

nlohmann::json to_json(const ProjectionReport& r) {
  return {{"sigma", index_set_json(r.sigma)},
          {"complement_dim", r.complement_dim},
          {"vacuous", r.vacuous},
          {"projected_lower", r.projected_lower},
          {"projected_upper", r.projected_upper},
          {"projected_is_frame", r.projected_is_frame},
          {"woven_is_frame", r.woven_is_frame},
          {"equivalent", r.equivalent}};
}

nlohmann::json to_json(const SignPartition& p) {
  return {{"positive", index_set_json(p.positive)},
          {"negative", index_set_json(p.negative)}};
}

nlohmann::json to_json(const DefinitenessReport& r) {
  return {{"sign", r.sign},
          {"subspace_dim", r.subspace_dim},
          {"margin", r.margin},
          {"uniformly_definite", r.uniformly_definite},
          {"maximal", r.maximal}};
}

nlohmann::json to_json(const JFrameReport& r) {
  return {{"partition", to_json(r.partition)},
          {"positive", r.positive ? to_json(*r.positive) : json(nullptr)},
          {"negative", r.negative ? to_json(*r.negative) : json(nullptr)},
          {"is_j_frame", r.is_j_frame}};
}

nlohmann::json to_json(const JWeavingReport& r) {
  return {{"is_j_weaving", r.is_j_weaving},
          {"exhaustive", r.exhaustive},
          {"examined", r.examined},
          {"failing_subset", optional_index_set(r.failing_subset)},
          {"failing_report", r.failing_report ? to_json(*r.failing_report) : json(nullptr)}};
}

nlohmann::json to_json(const TwoSidedBounds& b) {
  auto side = [](const std::optional<TwoSidedBounds::Side>& s) -> json {
    if (!s) return nullptr;
    return {{"dim", s->dim}, {"definite", s->definite}, {"alpha", s->alpha},
            {"beta", s->beta}};
  };
  return {{"plus", side(b.plus)}, {"minus", side(b.minus)}};
}

nlohmann::json to_json(const ErasureReport& r) {
  json cfg = {{"n", r.config.n},
              {"m", r.config.m},
              {"trials", r.config.trials},
              {"erasure_prob", r.config.erasure_prob},
              {"seed", r.config.seed},
              {"test_vectors", r.config.test_vectors}};
  json j;
  j["config"] = std::move(cfg);
  j["mean_relative_error"] = r.mean_relative_error;
  j["std_error"] = r.std_error;
  j["epsilon"] = r.epsilon;
  j["m_hat"] = r.m_hat;
  j["m_hat_std_error"] = r.m_hat_std_error;
  j["unbiased_estimator"] = r.unbiased_estimator;
  j["rng_algorithm"] = r.rng_algorithm;
  if (!r.per_trial.empty()) j["per_trial"] = r.per_trial;
  return j;
}

nlohmann::json envelope_to_json(const ReportEnvelope& e) {
  json j;
  j["tool_version"] = e.tool_version;
  j["command"] = e.command;
  j["input_digest"] = e.input_digest;
  j["seeded"] = e.seeded;
  j["seed"] = e.seed;
  j["payload"] = e.payload;
  j["wall_seconds"] = e.wall_seconds;
  return j;
}

std::string envelope_dump(const ReportEnvelope& e) {
  return canonical_dump(envelope_to_json(e)) + "\n";
}

}  // namespace kweave::io
