// kweave: command line front end for the weaving library.
//
// Subcommands: analyze, weave, jweave, erasure. Human-readable tables go to
// stdout; --out writes the canonical JSON report envelope ("-" for stdout).
// Exit codes: 0 certified pass, 1 error, 2 certified counterexample found,
// 3 pass on a non-exhaustive sweep (not refuted).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kweave/erasure.hpp"
#include "kweave/io.hpp"
#include "kweave/jframes.hpp"
#include "kweave/weaving.hpp"

namespace {

using namespace kweave;

struct CommonOpts {
  std::string in_path;
  std::string out_path;
  int threads = -1;  // -1: unset, fall back to KW_THREADS, then all cores
};

// Tables are suppressed when the JSON envelope itself goes to stdout.
bool g_quiet = false;

template <class... Args>
void table(const char* fmt, Args... args) {
  if (g_quiet) return;
  if constexpr (sizeof...(args) == 0)
    std::fputs(fmt, stdout);
  else
    std::printf(fmt, args...);
}

// KW_THREADS overrides the flag; 0 means machine parallelism.
unsigned resolve_threads(const CommonOpts& c) {
  if (const char* env = std::getenv("KW_THREADS"); env && *env)
    return static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  if (c.threads >= 0) return static_cast<unsigned>(c.threads);
  return 0;
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  const std::uint64_t hi = rd(), lo = rd();
  const auto now = std::chrono::steady_clock::now().time_since_epoch().count();
  return (hi << 32) ^ lo ^ static_cast<std::uint64_t>(now);
}

IndexSet parse_indices(const std::string& text) {
  IndexSet out;
  std::string token;
  std::istringstream ss(text);
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(token, &pos);
    } catch (const std::exception&) {
      throw ValidationError("bad index list \"" + text + "\"");
    }
    if (pos != token.size() || v <= 0)
      throw ValidationError("bad index list \"" + text + "\": indices are positive integers");
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SubsetSpec make_spec(const std::string& mode, std::size_t m,
                     const std::vector<std::string>& subset_args, std::uint64_t seed,
                     bool* sampled) {
  *sampled = false;
  if (!subset_args.empty()) {
    std::vector<IndexSet> sets;
    sets.reserve(subset_args.size());
    for (const std::string& s : subset_args) sets.push_back(parse_indices(s));
    return SubsetSpec::explicit_sets(m, std::move(sets));
  }
  if (mode == "exhaustive") return SubsetSpec::exhaustive(m);
  if (mode.rfind("sampled", 0) == 0) {
    std::size_t count = 64;
    if (mode.size() > 7) {
      if (mode[7] != ':')
        throw ValidationError("--mode: expected \"exhaustive\" or \"sampled[:N]\"");
      count = static_cast<std::size_t>(std::strtoull(mode.c_str() + 8, nullptr, 10));
      if (count == 0) throw ValidationError("--mode sampled:N needs N >= 1");
    }
    *sampled = true;
    return SubsetSpec::sampled(m, count, seed);
  }
  throw ValidationError("--mode: expected \"exhaustive\" or \"sampled[:N]\"");
}

std::string subset_str(const IndexSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "}";
}

std::string signature_str(const KreinSpace& sp) {
  std::string out;
  for (int s : sp.signature()) out += (s > 0 ? '+' : '-');
  return out;
}

void emit_envelope(io::ReportEnvelope& env, const CommonOpts& c,
                   std::chrono::steady_clock::time_point start) {
  env.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.out_path.empty()) return;
  const std::string text = io::envelope_dump(env);
  if (c.out_path == "-") {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream out(c.out_path);
  if (!out) throw ValidationError("cannot open " + c.out_path + " for writing");
  out << text;
  table("report written to %s\n", c.out_path.c_str());
}

int weaving_exit(const WeavingReport& r) {
  if (!r.is_weaving) return 2;
  return r.exhaustive ? 0 : 3;
}

// ---- analyze ----

struct AnalyzeOpts {
  CommonOpts common;
  std::vector<std::string> families;
  bool with_gramian = false;
};

int run_analyze(const AnalyzeOpts& o) {
  g_quiet = (o.common.out_path == "-");
  const auto start = std::chrono::steady_clock::now();
  const io::FrameBundle bundle = io::load_bundle(o.common.in_path);
  std::vector<std::string> names = o.families;
  if (names.empty())
    for (const auto& [name, vecs] : bundle.families) names.push_back(name);

  const KreinSpace& sp = bundle.space;
  table("space: dim %zu, signature %s, field %s\n", sp.dim(),
              signature_str(sp).c_str(),
              sp.field() == Field::real ? "real" : "complex");

  bool all_frames = true;
  nlohmann::json fams = nlohmann::json::object();
  for (const std::string& name : names) {
    const FrameFamily fam = bundle.family(name);
    const FrameCheck chk = is_frame(fam);
    const JFrameReport jf = is_j_frame(fam);
    all_frames = all_frames && chk.is_frame;
    table("family %s (%zu vectors): frame: %s, bounds [%.6g, %.6g]; J-frame: %s\n",
                name.c_str(), fam.size(), chk.is_frame ? "yes" : "no",
                chk.bounds.lower, chk.bounds.upper, jf.is_j_frame ? "yes" : "no");
    table("  sign partition: positive %s, negative %s\n",
                subset_str(jf.partition.positive).c_str(),
                subset_str(jf.partition.negative).c_str());
    {
      const Matrix gram = gramian(fam);
      std::string diag = "  self products:";
      for (std::size_t n = 0; n < fam.size(); ++n) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %.6g", gram(n, n).real());
        diag += buf;
      }
      table("%s\n", diag.c_str());
    }
    if (jf.positive)
      table("  positive side: dim %zu, margin %.6g, uniformly definite: %s\n",
                  jf.positive->subspace_dim, jf.positive->margin,
                  jf.positive->uniformly_definite ? "yes" : "no");
    if (jf.negative)
      table("  negative side: dim %zu, margin %.6g, uniformly definite: %s\n",
                  jf.negative->subspace_dim, jf.negative->margin,
                  jf.negative->uniformly_definite ? "yes" : "no");

    nlohmann::json entry;
    entry["frame"] = io::to_json(chk, sp.field());
    entry["j_frame"] = io::to_json(jf);
    if (o.with_gramian) entry["gramian"] = io::matrix_to_json(gramian(fam), sp.field());
    fams[name] = std::move(entry);
  }

  io::ReportEnvelope env;
  env.command = "analyze";
  env.input_digest = io::bundle_digest(bundle);
  env.payload = {{"space",
                  {{"dimension", sp.dim()},
                   {"signature", sp.signature()},
                   {"field", sp.field() == Field::real ? "real" : "complex"}}},
                 {"families", std::move(fams)}};
  emit_envelope(env, o.common, start);
  return all_frames ? 0 : 2;
}

// ---- weave ----

struct WeaveOpts {
  CommonOpts common;
  std::string f_name = "F";
  std::string g_name = "G";
  std::string mode = "exhaustive";
  std::vector<std::string> subsets;
  std::vector<std::string> checks;
  bool per_subset = false;
  bool seed_given = false;
  std::uint64_t seed = 0;
};

int run_weave(const WeaveOpts& o) {
  g_quiet = (o.common.out_path == "-");
  const auto start = std::chrono::steady_clock::now();
  const io::FrameBundle bundle = io::load_bundle(o.common.in_path);
  const FrameFamily f = bundle.family(o.f_name);
  const FrameFamily g = bundle.family(o.g_name);
  const unsigned threads = resolve_threads(o.common);

  std::uint64_t seed = o.seed;
  bool sampled = false;
  const SubsetSpec spec = make_spec(o.mode, f.size(), o.subsets, seed, &sampled);
  if (sampled && !o.seed_given) {
    seed = entropy_seed();
    std::fprintf(stderr, "seed: %llu (generated)\n",
                 static_cast<unsigned long long>(seed));
  }
  SubsetSpec seeded_spec = spec;
  seeded_spec.seed = seed;

  const WeavingReport rep = universal_bounds(f, g, seeded_spec, {}, threads);
  table("weaving: %s (%s, %llu subsets)\n", rep.is_weaving ? "yes" : "no",
              rep.exhaustive ? "exhaustive" : "not exhaustive",
              static_cast<unsigned long long>(rep.examined));
  table("universal bounds: [%.6g, %.6g]\n", rep.universal_lower,
              rep.universal_upper);
  table("worst subset: %s\n", subset_str(rep.worst_subset).c_str());

  nlohmann::json payload;
  {
    nlohmann::json wj = io::to_json(rep, f.space().field());
    if (!o.per_subset) wj.erase("per_subset");
    payload["weaving"] = std::move(wj);
  }

  for (const std::string& check : o.checks) {
    const std::size_t colon = check.find(':');
    const std::string kind = check.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : check.substr(colon + 1);
    if (kind == "equivalences") {
      const EquivalenceReport eq = check_equivalences(f, g, seeded_spec, {}, threads);
      table("formulations agree: %s (max relative gap %.6g)\n",
                  eq.bounds_agree && eq.verdicts_agree ? "yes" : "no",
                  eq.max_relative_gap);
      payload["equivalences"] = io::to_json(eq, f.space().field());
    } else if (kind == "operator-bound") {
      const OperatorBoundReport ob = operator_lower_bound_check(f, g, seeded_spec, {}, threads);
      table("smallest woven singular value: %.6g at %s\n", ob.s_min,
                  subset_str(ob.s_min_subset).c_str());
      table("lower bound holds: %s; quotient bound holds: %s\n",
                  ob.lower_bound_holds ? "yes" : "no",
                  ob.quotient_bound_holds ? "yes" : "no");
      payload["operator_bound"] = io::to_json(ob);
    } else if (kind == "perturbation") {
      if (arg.empty())
        throw ValidationError("--check perturbation needs a family of U columns, "
                              "e.g. perturbation:U_cols");
      const FrameFamily ucols = bundle.family(arg);
      const Matrix u = Matrix::from_columns(ucols.vectors(), f.space().dim());
      const PerturbationReport pr = perturbation_weaving_check(f, u, seeded_spec, {}, threads);
      table("perturbation: deviation %.6g, hypothesis %s, woven weaving %s, "
                  "prediction confirmed %s\n",
                  pr.deviation, pr.hypothesis_holds ? "holds" : "fails",
                  pr.woven.is_weaving ? "yes" : "no",
                  pr.prediction_confirmed ? "yes" : "no");
      payload["perturbation"] = io::to_json(pr, f.space().field());
    } else if (kind == "inverse-operator") {
      const InverseOperatorReport ir = inverse_operator_weaving_check(f, g, seeded_spec, {}, threads);
      table("inverse operator: gap %.6g, hypothesis %s%s\n", ir.inverse_gap,
                  ir.hypothesis_holds ? "holds" : "fails",
                  ir.inverse_pair
                      ? (ir.inverse_pair->is_weaving ? ", inverse pair weaves"
                                                     : ", inverse pair does not weave")
                      : "");
      payload["inverse_operator"] = io::to_json(ir, f.space().field());
    } else if (kind == "projection") {
      if (colon == std::string::npos)
        throw ValidationError("--check projection needs indices, e.g. projection:1,3 "
                              "(projection: for the empty subset)");
      const IndexSet sigma = parse_indices(arg);
      const ProjectionReport pj = projection_characterization_check(f, g, sigma);
      table("projection %s: complement dim %zu, projected frame %s, woven frame "
                  "%s, equivalent %s\n",
                  subset_str(pj.sigma).c_str(), pj.complement_dim,
                  pj.projected_is_frame ? "yes" : "no", pj.woven_is_frame ? "yes" : "no",
                  pj.equivalent ? "yes" : "no");
      payload["projection"] = io::to_json(pj);
    } else {
      throw ValidationError("unknown --check \"" + check + "\"");
    }
  }

  io::ReportEnvelope env;
  env.command = "weave";
  env.input_digest = io::bundle_digest(bundle);
  env.seeded = sampled;
  env.seed = sampled ? seed : 0;
  env.payload = std::move(payload);
  emit_envelope(env, o.common, start);
  return weaving_exit(rep);
}

// ---- jweave ----

struct JweaveOpts {
  CommonOpts common;
  std::string f_name = "F";
  std::string g_name = "G";
  std::string mode = "exhaustive";
  std::vector<std::string> subsets;
  std::string two_sided;
  bool two_sided_given = false;
  bool seed_given = false;
  std::uint64_t seed = 0;
};

int run_jweave(const JweaveOpts& o) {
  g_quiet = (o.common.out_path == "-");
  const auto start = std::chrono::steady_clock::now();
  const io::FrameBundle bundle = io::load_bundle(o.common.in_path);
  const FrameFamily f = bundle.family(o.f_name);
  const FrameFamily g = bundle.family(o.g_name);
  const unsigned threads = resolve_threads(o.common);

  std::uint64_t seed = o.seed;
  bool sampled = false;
  SubsetSpec spec = make_spec(o.mode, f.size(), o.subsets, seed, &sampled);
  if (sampled && !o.seed_given) {
    seed = entropy_seed();
    std::fprintf(stderr, "seed: %llu (generated)\n",
                 static_cast<unsigned long long>(seed));
  }
  spec.seed = seed;

  const JWeavingReport rep = is_j_weaving(f, g, spec, {}, threads);
  if (rep.is_j_weaving)
    table("J-weaving: yes (%s, %llu subsets)\n",
                rep.exhaustive ? "exhaustive" : "not exhaustive",
                static_cast<unsigned long long>(rep.examined));
  else
    table("J-weaving: no; first failing subset %s\n",
                rep.failing_subset ? subset_str(*rep.failing_subset).c_str() : "?");

  nlohmann::json payload;
  payload["j_weaving"] = io::to_json(rep);

  if (o.two_sided_given) {
    const IndexSet sigma = parse_indices(o.two_sided);
    const TwoSidedBounds tb = two_sided_bounds(f, g, sigma);
    const bool ok = two_sided_success(tb, f.space());
    auto side_line = [](const char* name, const std::optional<TwoSidedBounds::Side>& s) {
      if (s)
        table("  %s side: dim %zu, definite %s, alpha %.6g, beta %.6g\n", name,
                    s->dim, s->definite ? "yes" : "no", s->alpha, s->beta);
      else
        table("  %s side: empty\n", name);
    };
    table("two-sided bounds for %s (success: %s)\n", subset_str(sigma).c_str(),
                ok ? "yes" : "no");
    side_line("plus", tb.plus);
    side_line("minus", tb.minus);
    nlohmann::json tj = io::to_json(tb);
    tj["sigma"] = sigma;
    tj["success"] = ok;
    payload["two_sided"] = std::move(tj);
  }

  io::ReportEnvelope env;
  env.command = "jweave";
  env.input_digest = io::bundle_digest(bundle);
  env.seeded = sampled;
  env.seed = sampled ? seed : 0;
  env.payload = std::move(payload);
  emit_envelope(env, o.common, start);
  if (!rep.is_j_weaving) return 2;
  return rep.exhaustive ? 0 : 3;
}

// ---- erasure ----

struct ErasureOpts {
  CommonOpts common;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t trials = 10000;
  double prob = 0.5;
  std::size_t test_vectors = 1;
  bool per_trial = false;
  bool seed_given = false;
  std::uint64_t seed = 0;
};

int run_erasure(const ErasureOpts& o) {
  g_quiet = (o.common.out_path == "-");
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t seed = o.seed;
  if (!o.seed_given) {
    seed = entropy_seed();
    std::fprintf(stderr, "seed: %llu (generated)\n",
                 static_cast<unsigned long long>(seed));
  }
  ErasureConfig cfg;
  cfg.n = o.n;
  cfg.m = o.m;
  cfg.trials = o.trials;
  cfg.erasure_prob = o.prob;
  cfg.seed = seed;
  cfg.test_vectors = o.test_vectors;
  cfg.collect_per_trial = o.per_trial;

  const ErasureReport rep = monte_carlo_bound(cfg, resolve_threads(o.common));
  table("uniform tight frame: n=%zu m=%zu, trials=%zu, erasure prob %.6g, seed %llu\n",
              cfg.n, cfg.m, cfg.trials, cfg.erasure_prob,
              static_cast<unsigned long long>(seed));
  table("mean relative error: %.6g (std error %.6g)\n", rep.mean_relative_error,
              rep.std_error);
  table("epsilon = sqrt((n/m) ln n) = %.6g\n", rep.epsilon);
  if (rep.epsilon > 0.0)
    table("normalized constant mean/epsilon = %.6g (std error %.6g)\n", rep.m_hat,
                rep.m_hat_std_error);
  else
    table("normalized constant undefined (epsilon = 0 at n = 1)\n");

  io::ReportEnvelope env;
  env.command = "erasure";
  env.seeded = true;
  env.seed = seed;
  env.payload = io::to_json(rep);
  emit_envelope(env, o.common, start);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weaving diagnostics for frames in indefinite inner product spaces"};
  app.require_subcommand(1);

  AnalyzeOpts ao;
  CLI::App* analyze = app.add_subcommand("analyze", "frame and J-frame diagnostics per family");
  analyze->add_option("--in", ao.common.in_path, "bundle JSON file")->required();
  analyze->add_option("--family", ao.families, "family name (repeatable; default: all)");
  analyze->add_flag("--gramian", ao.with_gramian, "include the Gram matrices in the report");
  analyze->add_option("--out", ao.common.out_path, "write the JSON report here (- for stdout)");
  analyze->add_option("--threads", ao.common.threads, "worker threads (0 = all cores)");

  WeaveOpts wo;
  CLI::App* weave = app.add_subcommand("weave", "universal woven frame bounds over subsets");
  weave->add_option("--in", wo.common.in_path, "bundle JSON file")->required();
  weave->add_option("--f", wo.f_name, "first family name (default F)");
  weave->add_option("--g", wo.g_name, "second family name (default G)");
  weave->add_option("--mode", wo.mode, "exhaustive | sampled[:N] (default exhaustive)");
  weave->add_option("--subset", wo.subsets,
                    "explicit subset as comma separated 1-based indices (repeatable)");
  weave->add_option("--check", wo.checks,
                    "extra check: equivalences | operator-bound | perturbation:<family> | "
                    "inverse-operator | projection:<indices> (repeatable)");
  weave->add_flag("--per-subset", wo.per_subset, "keep per-subset bounds in the report");
  weave->add_option("--seed", wo.seed, "seed for sampled mode")
      ->check(CLI::NonNegativeNumber);
  weave->add_option("--out", wo.common.out_path, "write the JSON report here (- for stdout)");
  weave->add_option("--threads", wo.common.threads, "worker threads (0 = all cores)");

  JweaveOpts jo;
  CLI::App* jweave = app.add_subcommand("jweave", "J-frame property across weaves");
  jweave->add_option("--in", jo.common.in_path, "bundle JSON file")->required();
  jweave->add_option("--f", jo.f_name, "first family name (default F)");
  jweave->add_option("--g", jo.g_name, "second family name (default G)");
  jweave->add_option("--mode", jo.mode, "exhaustive | sampled[:N] (default exhaustive)");
  jweave->add_option("--subset", jo.subsets,
                     "explicit subset as comma separated 1-based indices (repeatable)");
  jweave->add_option("--two-sided", jo.two_sided,
                     "also report two-sided bounds for this subset");
  jweave->add_option("--seed", jo.seed, "seed for sampled mode")
      ->check(CLI::NonNegativeNumber);
  jweave->add_option("--out", jo.common.out_path, "write the JSON report here (- for stdout)");
  jweave->add_option("--threads", jo.common.threads, "worker threads (0 = all cores)");

  ErasureOpts eo;
  CLI::App* erasure = app.add_subcommand("erasure", "Monte Carlo erasure reconstruction error");
  erasure->add_option("--n", eo.n, "space dimension")->required();
  erasure->add_option("--m", eo.m, "number of frame vectors")->required();
  erasure->add_option("--trials", eo.trials, "Monte Carlo trials (default 10000)");
  erasure->add_option("--erasure-prob", eo.prob, "erasure probability (default 0.5)");
  erasure->add_option("--test-vectors", eo.test_vectors,
                      "random test vectors per trial (default 1)");
  erasure->add_flag("--per-trial", eo.per_trial, "keep per-trial errors in the report");
  erasure->add_option("--seed", eo.seed, "RNG seed");
  erasure->add_option("--out", eo.common.out_path, "write the JSON report here (- for stdout)");
  erasure->add_option("--threads", eo.common.threads, "worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return run_analyze(ao);
    if (weave->parsed()) {
      wo.seed_given = weave->count("--seed") > 0;
      return run_weave(wo);
    }
    if (jweave->parsed()) {
      jo.seed_given = jweave->count("--seed") > 0;
      jo.two_sided_given = jweave->count("--two-sided") > 0;
      return run_jweave(jo);
    }
    if (erasure->parsed()) {
      eo.seed_given = erasure->count("--seed") > 0;
      return run_erasure(eo);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 1;
}
