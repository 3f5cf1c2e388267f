#pragma once

// Experiment harness: twist-limit runs comparing the length and log-trace
// compactifications, representation checks, amoeba and Bergman probes, and intersection
// cross-validation. Each run returns a report; write_* functions export it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "teichtrop/error.hpp"
#include "teichtrop/fuchsian.hpp"
#include "teichtrop/io.hpp"
#include "teichtrop/laminations.hpp"
#include "teichtrop/logtropic.hpp"
#include "teichtrop/word.hpp"

namespace teichtrop::lab {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

enum class ExperimentKind { TwistLimit, Amoeba, Bergman, Intersect, RepCheck };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::TwistLimit: return "twist-limit";
    case ExperimentKind::Amoeba: return "amoeba";
    case ExperimentKind::Bergman: return "bergman";
    case ExperimentKind::Intersect: return "intersect";
    case ExperimentKind::RepCheck: return "rep-check";
  }
  return "?";
}

struct Tolerances {
  double angular = 1e-2;      // estimate to target direction
  double mutual = 1e-3;       // length estimate to log-trace estimate
  double convergence = 1e-3;  // DirectionEstimate residual
  double trace = 1e-9;        // trace reality and |tr| >= 2
  double relator = 1e-9;      // relator defect
  double cluster = 1e-2;      // angular clustering and ray matching
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::TwistLimit;
  FenchelNielsen base{{2, 2, 2}, {0, 0, 0}};
  std::vector<FenchelNielsen> points;  // intersect: base points (empty: just `base`)
  int twist_curve = 0;                 // pants curve index: 0 = a1, 1 = a2, 2 = c
  double twist_step = 5.0;
  int twist_count = 64;
  int family_length = 4;  // embedding set word length
  fs::path curve_table;
  Tolerances tol;
  double divergence_threshold = 1e3;
  int oracle_radius = 6;
  std::vector<fs::path> varieties;
  std::size_t samples = 10000;
  double min_norm = 7;  // amoeba points closer to the origin carry no direction
  std::optional<std::size_t> declared_dim;  // overrides the variety's own (negative controls)
  bool negative_control = true;             // bergman: line with d = 0 must fail
  int corrupt_generator = -1;               // rep-check: add corrupt_delta to this image
  double corrupt_delta = 0.1;
  fs::path output_dir = "out";
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be positive");
    };
    positive(tol.angular, "angular tolerance");
    positive(tol.mutual, "mutual tolerance");
    positive(tol.convergence, "convergence tolerance");
    positive(tol.trace, "trace tolerance");
    positive(tol.relator, "relator tolerance");
    positive(tol.cluster, "cluster tolerance");
    if (tol.cluster > 0.2) throw Error(ErrorCode::InvalidArgument, "cluster tolerance must not exceed 0.2");
    if (base.lengths.size() != 3 || base.twists.size() != 3)
      throw Error(ErrorCode::InvalidArgument, "base point needs 3 lengths and 3 twists");
    for (const FenchelNielsen& p : points)
      if (p.lengths.size() != 3 || p.twists.size() != 3)
        throw Error(ErrorCode::InvalidArgument, "each point needs 3 lengths and 3 twists");
    if (kind == ExperimentKind::TwistLimit) {
      if (twist_count < 8) throw Error(ErrorCode::InvalidArgument, "twist count must be at least 8");
      if (twist_curve < 0 || twist_curve > 2) throw Error(ErrorCode::InvalidArgument, "twist curve must be a pants curve");
      if (twist_step == 0 || !std::isfinite(twist_step)) throw Error(ErrorCode::InvalidArgument, "twist step must be nonzero");
    }
    if (family_length < 1 || family_length > 6) throw Error(ErrorCode::InvalidArgument, "family length must lie in [1, 6]");
    if (oracle_radius < 2) throw Error(ErrorCode::InvalidArgument, "oracle radius must be at least 2");
    positive(divergence_threshold, "divergence threshold");
    positive(min_norm, "min_norm");
  }
};

inline int parse_curve_index(const std::string& s) {
  const auto names = pants_curve_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (s == names[i] || s == std::to_string(i)) return static_cast<int>(i);
  throw Error(ErrorCode::InvalidArgument, "unknown pants curve '" + s + "' (use a1, a2, c or 0, 1, 2)");
}

inline FenchelNielsen parse_point(const std::string& key, const std::string& text) {
  const std::vector<double> v = io::Config::parse_doubles(key, text);
  if (v.size() != 6) throw Error(ErrorCode::ParseError, key + " needs 6 numbers: l1 l2 l3 t1 t2 t3");
  return {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
}

/// Builds a config from key-value text. Unknown keys are configuration errors. Relative
/// paths resolve against the config file; defaults point into `data_dir`.
inline ExperimentConfig config_from(const io::Config& c, ExperimentKind kind, const fs::path& data_dir) {
  static const std::vector<std::string> known = {
      "lengths", "twists", "point", "twist_curve", "twist_step", "twist_count", "family_length", "curve_table",
      "angular_tolerance", "mutual_tolerance", "convergence_tolerance", "trace_tolerance", "relator_tolerance",
      "cluster_tolerance", "divergence_threshold", "oracle_radius", "variety", "samples", "min_norm", "declared_dim",
      "negative_control", "corrupt_generator", "corrupt_delta", "output", "seed", "threads"};
  for (const std::string& k : c.keys())
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw Error(ErrorCode::InvalidArgument, "unknown config key '" + k + "'");

  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.base.lengths = c.get_doubles("lengths", cfg.base.lengths);
  cfg.base.twists = c.get_doubles("twists", cfg.base.twists);
  for (const std::string& p : c.all("point")) cfg.points.push_back(parse_point("point", p));
  if (c.has("twist_curve")) cfg.twist_curve = parse_curve_index(c.get("twist_curve", ""));
  cfg.twist_step = c.get_double("twist_step", cfg.twist_step);
  cfg.twist_count = static_cast<int>(c.get_long("twist_count", cfg.twist_count));
  cfg.family_length = static_cast<int>(c.get_long("family_length", cfg.family_length));
  cfg.curve_table = c.get_path("curve_table", data_dir / "curves_genus2.txt");
  cfg.tol.angular = c.get_double("angular_tolerance", cfg.tol.angular);
  cfg.tol.mutual = c.get_double("mutual_tolerance", cfg.tol.mutual);
  cfg.tol.convergence = c.get_double("convergence_tolerance", cfg.tol.convergence);
  cfg.tol.trace = c.get_double("trace_tolerance", cfg.tol.trace);
  cfg.tol.relator = c.get_double("relator_tolerance", cfg.tol.relator);
  cfg.tol.cluster = c.get_double("cluster_tolerance", cfg.tol.cluster);
  cfg.divergence_threshold = c.get_double("divergence_threshold", cfg.divergence_threshold);
  cfg.oracle_radius = static_cast<int>(c.get_long("oracle_radius", cfg.oracle_radius));
  if (c.has("variety")) {
    for (const std::string& v : c.all("variety")) cfg.varieties.push_back(c.resolve(v));
  } else if (kind == ExperimentKind::Amoeba) {
    cfg.varieties = {data_dir / "demos" / "line.var"};
  } else {
    for (const char* name : {"line", "line_hypersurface", "conic", "cubic", "quartic"}) cfg.varieties.push_back(data_dir / "demos" / (std::string(name) + ".var"));
  }
  const long samples = c.get_long("samples", static_cast<long>(cfg.samples));
  if (samples < 0) throw Error(ErrorCode::InvalidArgument, "samples must be non-negative");
  cfg.samples = static_cast<std::size_t>(samples);
  cfg.min_norm = c.get_double("min_norm", cfg.min_norm);
  if (c.has("declared_dim")) {
    const long d = c.get_long("declared_dim", 0);
    if (d < 0) throw Error(ErrorCode::InvalidArgument, "declared_dim must be non-negative");
    cfg.declared_dim = static_cast<std::size_t>(d);
  }
  cfg.negative_control = c.get_bool("negative_control", cfg.negative_control);
  cfg.corrupt_generator = static_cast<int>(c.get_long("corrupt_generator", cfg.corrupt_generator));
  cfg.corrupt_delta = c.get_double("corrupt_delta", cfg.corrupt_delta);
  cfg.output_dir = c.get_path("output", cfg.output_dir);
  const long seed = c.get_long("seed", 1);
  cfg.seed = static_cast<std::uint64_t>(seed);
  const long threads = c.get_long("threads", 1);
  if (threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be at least 1");
  cfg.threads = static_cast<unsigned>(threads);
  return cfg;
}

/// Runs f(0..count-1) on up to `threads` threads; f writes into its own slot.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) f(i);
    });
  for (auto& th : pool) th.join();
}

inline EmbeddingFamily load_family(const ExperimentConfig& cfg) {
  return joint_family(load_curve_table(cfg.curve_table.string()), embedding_set(SurfaceGroup(2), cfg.family_length));
}

// ---------------------------------------------------------------------------------------
// Twist limit

struct StepRow {
  int n = 0;
  double twist = 0;
  double c_length = 0;  // 1 / |length vector|
  double c_trace = 0;   // 1 / |log-trace vector|
  double mutual_angle = 0;
  double length_target_angle = 0;
  double trace_target_angle = 0;
  double asymptotic_gap = 0;  // max |c (arccosh(|tr|/2) - log|tr|)| over words with log|tr| > 20
  std::size_t asymptotic_words = 0;
};

struct ConvergenceReport {
  std::string curve_name;
  std::vector<std::string> words;
  RealVector target;  // intersection numbers of the twist curve with the family
  bool target_converged = true;
  std::vector<StepRow> steps;
  std::vector<RealVector> lengths;
  std::vector<RealVector> log_traces;
  DirectionEstimate length_estimate;
  DirectionEstimate trace_estimate;
  double mutual_angle = 0;
  double length_target_angle = 0;
  double trace_target_angle = 0;
  double max_asymptotic_gap = 0;
  bool overflow_free = true;
  bool monotone = true;  // mutual angle non-increasing on the last quartile (WARN only)
  Tolerances tol;
  bool pass = false;
};

inline ConvergenceReport run_twist_limit(const ExperimentConfig& cfg) {
  cfg.validate();
  const EmbeddingFamily family = load_family(cfg);
  const std::vector<Word> words = family.words();
  const Word twist_word = pants_curve_words()[static_cast<std::size_t>(cfg.twist_curve)];

  ConvergenceReport rep;
  rep.tol = cfg.tol;
  rep.curve_name = pants_curve_names()[static_cast<std::size_t>(cfg.twist_curve)];
  for (const Word& w : words) rep.words.push_back(w.to_string());

  // Target: intersection numbers of the twist curve, counted on the base surface.
  {
    const Representation base = build_representation(cfg.base);
    OracleOptions opt;
    opt.radius = cfg.oracle_radius;
    opt.max_radius = std::max(cfg.oracle_radius, 8);
    opt.threads = cfg.threads;
    rep.target.assign(words.size(), 0.0);
    for (std::size_t j = 0; j < words.size(); ++j) {
      const OracleResult r = intersection_number_oracle(base, twist_word, words[j], opt);
      rep.target_converged = rep.target_converged && r.converged;
      rep.target[j] = static_cast<double>(r.count);
    }
  }
  if (std::all_of(rep.target.begin(), rep.target.end(), [](double v) { return v == 0; }))
    throw Error(ErrorCode::InvalidArgument, "no family curve crosses the twist curve");

  const auto count = static_cast<std::size_t>(cfg.twist_count);
  rep.lengths.assign(count, {});
  rep.log_traces.assign(count, {});
  rep.steps.assign(count, {});
  parallel_for(count, cfg.threads, [&](std::size_t k) {
    FenchelNielsen fn = cfg.base;
    fn.twists[static_cast<std::size_t>(cfg.twist_curve)] += static_cast<double>(k) * cfg.twist_step;
    const TeichPoint point(fn, words);
    RealVector& len = rep.lengths[k];
    RealVector& lt = rep.log_traces[k];
    for (const LogTrace& t : point.character) {
      lt.push_back(t.log_abs_trace);
      len.push_back(hyperbolic_length(t));
    }
    StepRow& row = rep.steps[k];
    row.n = static_cast<int>(k);
    row.twist = fn.twists[static_cast<std::size_t>(cfg.twist_curve)];
  });

  for (std::size_t k = 0; k < count; ++k) {
    StepRow& row = rep.steps[k];
    const RealVector& len = rep.lengths[k];
    const RealVector& lt = rep.log_traces[k];
    for (std::size_t j = 0; j < len.size(); ++j)
      if (!std::isfinite(len[j]) || !std::isfinite(lt[j])) rep.overflow_free = false;
    row.c_length = 1 / norm(len);
    row.c_trace = 1 / norm(lt);
    row.mutual_angle = angle_between(len, lt);
    row.length_target_angle = angle_between(len, rep.target);
    row.trace_target_angle = angle_between(lt, rep.target);
    for (std::size_t j = 0; j < lt.size(); ++j) {
      if (lt[j] <= 20) continue;
      ++row.asymptotic_words;
      row.asymptotic_gap = std::max(row.asymptotic_gap, std::abs(row.c_trace * (len[j] / 2 - lt[j])));
    }
    rep.max_asymptotic_gap = std::max(rep.max_asymptotic_gap, row.asymptotic_gap);
  }

  ProjectiveLimitOptions plo;
  plo.tolerance = cfg.tol.convergence;
  plo.divergence_threshold = cfg.divergence_threshold;
  auto estimate = [&](const std::vector<RealVector>& seq, const char* what) {
    try {
      return projective_limit(seq, plo);
    } catch (const Error& e) {
      std::ostringstream tail;
      tail << e.message() << " (" << what << " sequence; tail norms:";
      for (std::size_t k = count - count / 4; k < count; ++k) tail << ' ' << io::format_double(norm(seq[k]));
      tail << ')';
      throw Error(e.code(), tail.str());
    }
  };
  rep.length_estimate = estimate(rep.lengths, "length");
  rep.trace_estimate = estimate(rep.log_traces, "log-trace");
  rep.mutual_angle = angle_between(rep.length_estimate.direction, rep.trace_estimate.direction);
  rep.length_target_angle = angle_between(rep.length_estimate.direction, rep.target);
  rep.trace_target_angle = angle_between(rep.trace_estimate.direction, rep.target);

  for (std::size_t k = count - count / 4 + 1; k < count; ++k)
    if (rep.steps[k].mutual_angle > rep.steps[k - 1].mutual_angle) rep.monotone = false;

  rep.pass = rep.length_estimate.converged && rep.trace_estimate.converged && rep.target_converged && rep.overflow_free &&
             rep.mutual_angle < cfg.tol.mutual && rep.length_target_angle < cfg.tol.angular &&
             rep.trace_target_angle < cfg.tol.angular;
  return rep;
}

inline std::string summary(const ConvergenceReport& r) {
  std::ostringstream out;
  out << "twist-limit about " << r.curve_name << ": " << r.steps.size() << " steps, " << r.words.size() << " family curves\n"
      << "  length estimate    residual " << io::format_double(r.length_estimate.residual)
      << (r.length_estimate.converged ? " (converged)" : " (NOT converged)") << "\n"
      << "  log-trace estimate residual " << io::format_double(r.trace_estimate.residual)
      << (r.trace_estimate.converged ? " (converged)" : " (NOT converged)") << "\n"
      << "  mutual angle " << io::format_double(r.mutual_angle) << " (tolerance " << io::format_double(r.tol.mutual) << ")\n"
      << "  angle to intersection direction: length " << io::format_double(r.length_target_angle) << ", log-trace "
      << io::format_double(r.trace_target_angle) << " (tolerance " << io::format_double(r.tol.angular) << ")\n"
      << "  max scaled arccosh/log gap " << io::format_double(r.max_asymptotic_gap) << "\n";
  if (!r.target_converged) out << "  target intersection numbers did not converge\n";
  if (!r.overflow_free) out << "  non-finite value in a length or log-trace vector\n";
  if (!r.monotone) out << "  WARN: mutual angle not monotone on the last quartile\n";
  out << "  verdict " << (r.pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

inline Json estimate_json(const DirectionEstimate& e) {
  return Json{{"direction", e.direction}, {"residual", e.residual}, {"converged", e.converged}};
}

inline void write_outputs(const ConvergenceReport& r, const fs::path& dir) {
  const std::string stem = "twist_" + r.curve_name;
  {
    std::ostringstream s;
    io::CsvWriter csv(s);
    csv.row({"n", "twist", "c_length", "c_log_trace", "mutual_angle", "length_target_angle", "log_trace_target_angle",
             "asymptotic_gap", "asymptotic_words"});
    for (const StepRow& row : r.steps) {
      csv.field(row.n).field(row.twist).field(row.c_length).field(row.c_trace).field(row.mutual_angle);
      csv.field(row.length_target_angle).field(row.trace_target_angle).field(row.asymptotic_gap).field(row.asymptotic_words);
      csv.end_row();
    }
    io::write_text(dir / (stem + "_steps.csv"), s.str());
  }
  {
    std::ostringstream s;
    io::CsvWriter csv(s);
    csv.row({"n", "word", "length", "log_trace", "scaled_length", "scaled_log_trace", "target"});
    for (std::size_t k = 0; k < r.steps.size(); ++k)
      for (std::size_t j = 0; j < r.words.size(); ++j) {
        csv.field(r.steps[k].n).field(r.words[j]).field(r.lengths[k][j]).field(r.log_traces[k][j]);
        csv.field(r.steps[k].c_length * r.lengths[k][j]).field(r.steps[k].c_trace * r.log_traces[k][j]).field(r.target[j]);
        csv.end_row();
      }
    io::write_text(dir / (stem + "_vectors.csv"), s.str());
  }
  Json j;
  j["experiment"] = "twist-limit";
  j["twist_curve"] = r.curve_name;
  j["family"] = r.words;
  j["target"] = r.target;
  j["target_converged"] = r.target_converged;
  j["length_estimate"] = estimate_json(r.length_estimate);
  j["log_trace_estimate"] = estimate_json(r.trace_estimate);
  j["mutual_angle"] = r.mutual_angle;
  j["length_target_angle"] = r.length_target_angle;
  j["log_trace_target_angle"] = r.trace_target_angle;
  j["max_asymptotic_gap"] = r.max_asymptotic_gap;
  j["overflow_free"] = r.overflow_free;
  j["monotone_last_quartile"] = r.monotone;
  j["verdict"] = r.pass ? "PASS" : "FAIL";
  io::write_text(dir / (stem + "_report.json"), j.dump(2) + "\n");

  // Trajectory of f(x_n) projected to the two coordinates with the largest target entries.
  std::vector<std::size_t> order(r.target.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r.target[a] > r.target[b]; });
  const std::size_t ix = order[0], iy = order.size() > 1 ? order[1] : order[0];
  io::SvgDisk svg(600, "f-image of the twist sequence about " + r.curve_name + ": " + r.words[ix] + " vs " + r.words[iy]);
  auto trajectory = [&](const std::vector<RealVector>& seq) {
    std::vector<std::pair<double, double>> pts;
    for (const RealVector& x : seq) {
      const RealVector f = rescale(x);
      pts.emplace_back(f[ix], f[iy]);
    }
    return pts;
  };
  const auto lp = trajectory(r.lengths), tp = trajectory(r.log_traces);
  svg.polyline(lp, "#1f77b4");
  svg.polyline(tp, "#d62728");
  for (const auto& [x, y] : lp) svg.point(x, y, "#1f77b4", 2);
  for (const auto& [x, y] : tp) svg.point(x, y, "#d62728", 2);
  const RealVector t = normalized(r.target);
  svg.segment(0, 0, t[ix], t[iy], "black", true);
  svg.point(t[ix], t[iy], "black", 4);
  svg.label(-0.95, -0.9, "blue: lengths, red: log-traces, black: intersection direction");
  io::write_text(dir / (stem + "_trajectory.svg"), svg.str());
}

// ---------------------------------------------------------------------------------------
// Representation check

struct WordCheck {
  std::string word;
  double log_abs_trace = 0;
  double imag_part = 0;  // |Im tr|
  bool excluded = false;  // the identity: |tr| = 2 is allowed there
  bool real_ok = true;
  bool hyperbolic_ok = true;
};

struct RepCheckReport {
  double relator_defect = 0;
  bool relator_ok = false;
  int euler_sign = 0;
  std::vector<WordCheck> words;
  bool pass = false;
};

inline RepCheckReport run_rep_check(const ExperimentConfig& cfg) {
  cfg.validate();
  Representation rep = build_representation(cfg.base);
  if (cfg.corrupt_generator >= 0) {
    if (cfg.corrupt_generator >= static_cast<int>(rep.images.size()))
      throw Error(ErrorCode::InvalidArgument, "corrupt_generator out of range");
    ScaledMatrix& g = rep.images[static_cast<std::size_t>(cfg.corrupt_generator)];
    g = ScaledMatrix(g.value(0) + cfg.corrupt_delta, g.value(1), g.value(2), g.value(3));
    rep.relator_defect = relator_defect(rep);
  }
  RepCheckReport out;
  out.relator_defect = rep.relator_defect;
  out.relator_ok = rep.relator_defect < cfg.tol.relator;
  out.euler_sign = rep.euler_sign;
  out.pass = out.relator_ok;

  WordCheck identity;
  identity.word = "";
  identity.log_abs_trace = std::log(2.0);
  identity.excluded = true;
  out.words.push_back(identity);
  for (const CurveClass& c : load_family(cfg).curves) {
    const LogTrace t = trace_of(rep, c.word);
    WordCheck w;
    w.word = c.word.to_string();
    w.log_abs_trace = t.log_abs_trace;
    const double abs_tr = t.abs_trace();
    w.imag_part = abs_tr * std::abs(t.phase.imag());
    w.real_ok = w.imag_part <= cfg.tol.trace * std::max(1.0, abs_tr);
    w.hyperbolic_ok = !t.trace_zero && abs_tr >= 2 - cfg.tol.trace;
    out.pass = out.pass && w.real_ok && w.hyperbolic_ok;
    out.words.push_back(w);
  }
  return out;
}

inline std::string summary(const RepCheckReport& r) {
  std::size_t bad = 0;
  for (const WordCheck& w : r.words)
    if (!w.real_ok || !w.hyperbolic_ok) ++bad;
  std::ostringstream out;
  out << "rep-check: relator defect " << io::format_double(r.relator_defect) << (r.relator_ok ? " ok" : " FAIL") << ", "
      << r.words.size() - 1 << " family words, " << bad << " failing, euler sign " << r.euler_sign << "\n"
      << "  verdict " << (r.pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

inline void write_outputs(const RepCheckReport& r, const fs::path& dir) {
  std::ostringstream s;
  io::CsvWriter csv(s);
  csv.row({"word", "log_abs_trace", "imag_part", "real", "abs_trace_at_least_2", "status"});
  for (const WordCheck& w : r.words) {
    csv.field(w.excluded ? std::string("(identity)") : w.word).field(w.log_abs_trace).field(w.imag_part);
    csv.field(w.real_ok).field(w.hyperbolic_ok);
    csv.field(std::string(w.excluded ? "excluded" : (w.real_ok && w.hyperbolic_ok ? "pass" : "fail")));
    csv.end_row();
  }
  io::write_text(dir / "rep_check.csv", s.str());
  Json j;
  j["experiment"] = "rep-check";
  j["relator_defect"] = r.relator_defect;
  j["relator_ok"] = r.relator_ok;
  j["euler_sign"] = r.euler_sign;
  j["verdict"] = r.pass ? "PASS" : "FAIL";
  io::write_text(dir / "rep_check_report.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------------------
// Amoebas and the Bergman probe

struct VarietyResult {
  std::string name;
  fs::path path;
  std::optional<VarietySpec> spec;
  AmoebaSample sample;
  std::vector<RealVector> directions;
  std::optional<ConeFit> fit;
  std::size_t declared_dim = 0;
  bool probe_pass = false;
  bool rays_checked = false;
  std::optional<double> ray_match;  // worst matched angle
  std::string error;                // error code and message when the run failed
  bool pass = false;
};

inline VarietyResult run_variety(const fs::path& path, const ExperimentConfig& cfg) {
  VarietyResult out;
  out.path = path;
  out.name = path.stem().string();
  try {
    out.spec = load_variety(path.string());
    if (!out.spec->name.empty()) out.name = out.spec->name;
    out.declared_dim = cfg.declared_dim.value_or(out.spec->declared_dim);
    SamplingPlan plan;
    plan.samples = cfg.samples;
    plan.seed = cfg.seed;
    plan.threads = cfg.threads;
    out.sample = sample_amoeba(*out.spec, plan);
    out.directions = amoeba_directions(out.sample.points, cfg.min_norm);
    out.fit = cluster_directions(out.directions, cfg.tol.cluster);
    out.probe_pass = out.fit->passes(out.declared_dim);
    out.pass = out.probe_pass;
    if (!out.spec->expected_rays.empty()) {
      out.rays_checked = true;
      out.ray_match = match_rays(*out.fit, out.spec->expected_rays, cfg.tol.cluster);
      out.pass = out.pass && out.ray_match.has_value();
    }
  } catch (const Error& e) {
    out.error = std::string(teichtrop::to_string(e.code())) + ": " + e.message();
    out.pass = false;
  }
  return out;
}

struct SuiteReport {
  std::vector<VarietyResult> results;
  std::optional<VarietyResult> negative_control;  // line with d = 0; passes when it FAILS
  bool pass = false;
};

inline SuiteReport run_demo_suite(const ExperimentConfig& cfg) {
  cfg.validate();
  SuiteReport out;
  out.pass = !cfg.varieties.empty();
  for (const fs::path& p : cfg.varieties) {
    out.results.push_back(run_variety(p, cfg));
    out.pass = out.pass && out.results.back().pass;
  }
  if (cfg.negative_control && !cfg.varieties.empty()) {
    ExperimentConfig neg = cfg;
    neg.declared_dim = 0;
    out.negative_control = run_variety(cfg.varieties.front(), neg);
    out.pass = out.pass && out.negative_control->error.empty() && !out.negative_control->probe_pass;
  }
  return out;
}

inline Json variety_json(const VarietyResult& r) {
  Json j;
  j["name"] = r.name;
  j["file"] = r.path.filename().string();
  if (!r.error.empty()) {
    j["error"] = r.error;
    j["verdict"] = "FAIL";
    return j;
  }
  j["declared_dim"] = r.declared_dim;
  j["points"] = r.sample.points.size();
  j["root_finder_stalls"] = r.sample.stalls;
  j["dropped"] = r.sample.dropped;
  j["directions"] = r.directions.size();
  Json clusters = Json::array();
  for (const DirectionCluster& c : r.fit->clusters) {
    Json cj;
    cj["members"] = c.members.size();
    cj["mean_direction"] = c.mean;
    cj["subspace_dim"] = c.basis.size();
    cj["basis"] = c.basis;
    cj["max_residual"] = c.max_residual;
    if (c.rational.has_value()) {
      cj["rational"] = *c.rational;
      cj["rational_basis"] = c.rational_basis;
    } else {
      cj["rational"] = nullptr;
    }
    clusters.push_back(cj);
  }
  j["clusters"] = clusters;
  j["max_subspace_dim"] = r.fit->max_subspace_dim;
  j["tolerance"] = r.fit->tolerance;
  j["bergman_probe"] = r.probe_pass ? "PASS" : "FAIL";
  if (r.rays_checked) {
    j["expected_rays"] = r.spec->expected_rays;
    j["ray_match"] = r.ray_match ? Json(*r.ray_match) : Json(nullptr);
  }
  j["verdict"] = r.pass ? "PASS" : "FAIL";
  return j;
}

inline std::string summary(const VarietyResult& r) {
  std::ostringstream out;
  out << r.name << ": ";
  if (!r.error.empty()) {
    out << r.error << "\n  verdict FAIL\n";
    return out.str();
  }
  out << r.sample.points.size() << " points, " << r.directions.size() << " far directions, " << r.fit->clusters.size()
      << " clusters, max subspace dim " << r.fit->max_subspace_dim << " (declared " << r.declared_dim << "), probe "
      << (r.probe_pass ? "PASS" : "FAIL");
  if (r.rays_checked)
    out << ", rays " << (r.ray_match ? "match (worst " + io::format_double(*r.ray_match) + ")" : std::string("MISMATCH"));
  out << "\n  verdict " << (r.pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

inline std::string summary(const SuiteReport& s) {
  std::string out = "bergman demo suite\n";
  for (const VarietyResult& r : s.results) out += "  " + summary(r);
  if (s.negative_control)
    out += "  negative control (d = 0, must fail): " + summary(*s.negative_control);
  out += std::string("suite verdict ") + (s.pass ? "PASS" : "FAIL") + "\n";
  return out;
}

inline void write_outputs(const VarietyResult& r, const fs::path& dir, const std::string& stem) {
  std::ostringstream pts;
  io::CsvWriter csv(pts);
  const std::size_t n = r.spec ? r.spec->ambient_dim : 0;
  std::vector<std::string> header;
  for (std::size_t i = 0; i < n; ++i) header.push_back("log_abs_z" + std::to_string(i + 1));
  csv.row(header);
  for (const LogPoint& p : r.sample.points) {
    for (double v : p.coords) csv.field(v);
    csv.end_row();
  }
  io::write_text(dir / (stem + "_points.csv"), pts.str());

  std::ostringstream dirs;
  io::CsvWriter dcsv(dirs);
  header.clear();
  header.push_back("cluster");
  for (std::size_t i = 0; i < n; ++i) header.push_back("u" + std::to_string(i + 1));
  dcsv.row(header);
  if (r.fit) {
    std::vector<std::size_t> label(r.directions.size(), 0);
    for (std::size_t c = 0; c < r.fit->clusters.size(); ++c)
      for (std::size_t m : r.fit->clusters[c].members) label[m] = c;
    for (std::size_t i = 0; i < r.directions.size(); ++i) {
      dcsv.field(label[i]);
      for (double v : r.directions[i]) dcsv.field(v);
      dcsv.end_row();
    }
  }
  io::write_text(dir / (stem + "_directions.csv"), dirs.str());
  io::write_text(dir / (stem + "_report.json"), variety_json(r).dump(2) + "\n");

  if (n == 2) {
    io::SvgDisk svg(600, "f(Log|V|) for " + r.name);
    for (const LogPoint& p : r.sample.points) {
      const RealVector f = rescale(p.coords);
      svg.point(f[0], f[1], "#1f77b4", 1);
    }
    if (r.spec)
      for (const RealVector& ray : r.spec->expected_rays) svg.segment(0, 0, ray[0], ray[1], "#d62728", true);
    if (r.fit)
      for (const DirectionCluster& c : r.fit->clusters) svg.point(c.mean[0], c.mean[1], "black", 4);
    io::write_text(dir / (stem + "_amoeba.svg"), svg.str());
  }
}

inline void write_outputs(const SuiteReport& s, const fs::path& dir) {
  Json j;
  j["experiment"] = "bergman";
  Json list = Json::array();
  for (const VarietyResult& r : s.results) {
    list.push_back(variety_json(r));
    write_outputs(r, dir, "bergman_" + r.path.stem().string());
  }
  j["demos"] = list;
  if (s.negative_control) j["negative_control"] = variety_json(*s.negative_control);
  j["verdict"] = s.pass ? "PASS" : "FAIL";
  io::write_text(dir / "bergman_report.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------------------
// Intersection cross-validation

struct PairResult {
  std::string first, second;
  int dt = 0;
  std::vector<OracleResult> oracle;  // one per base point
  bool agree = false;
};

struct IntersectReport {
  std::vector<FenchelNielsen> points;
  std::vector<PairResult> pairs;
  bool pass = false;
};

inline IntersectReport run_intersect(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<CurveClass> table = load_curve_table(cfg.curve_table.string());
  IntersectReport out;
  out.points = cfg.points.empty() ? std::vector<FenchelNielsen>{cfg.base} : cfg.points;
  std::vector<Representation> reps;
  for (const FenchelNielsen& p : out.points) reps.push_back(build_representation(p));
  OracleOptions opt;
  opt.threads = cfg.threads;
  out.pass = true;
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = i + 1; j < table.size(); ++j) {
      PairResult pr;
      pr.first = table[i].name;
      pr.second = table[j].name;
      pr.dt = dt_formula_intersection(table[i], table[j]);
      pr.agree = true;
      for (const Representation& rep : reps) {
        pr.oracle.push_back(intersection_number_oracle(rep, table[i].word, table[j].word, opt));
        pr.agree = pr.agree && pr.oracle.back().converged && pr.oracle.back().count == pr.dt;
      }
      out.pass = out.pass && pr.agree;
      out.pairs.push_back(std::move(pr));
    }
  return out;
}

inline std::string summary(const IntersectReport& r) {
  std::size_t bad = 0;
  for (const PairResult& p : r.pairs)
    if (!p.agree) ++bad;
  std::ostringstream out;
  out << "intersect: " << r.pairs.size() << " pairs at " << r.points.size() << " base points, " << bad << " disagreeing\n";
  for (const PairResult& p : r.pairs)
    if (!p.agree) {
      out << "  " << p.first << " x " << p.second << ": formula " << p.dt << ", oracle";
      for (const OracleResult& o : p.oracle) out << ' ' << o.count << (o.converged ? "" : "?");
      out << "\n";
    }
  out << "  verdict " << (r.pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

inline void write_outputs(const IntersectReport& r, const fs::path& dir) {
  std::ostringstream s;
  io::CsvWriter csv(s);
  std::vector<std::string> header = {"first", "second", "formula"};
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    header.push_back("oracle_" + std::to_string(k));
    header.push_back("converged_" + std::to_string(k));
  }
  header.push_back("agree");
  csv.row(header);
  for (const PairResult& p : r.pairs) {
    csv.field(p.first).field(p.second).field(p.dt);
    for (const OracleResult& o : p.oracle) csv.field(o.count).field(o.converged);
    csv.field(p.agree).end_row();
  }
  io::write_text(dir / "intersect.csv", s.str());
  Json j;
  j["experiment"] = "intersect";
  Json pts = Json::array();
  for (const FenchelNielsen& p : r.points) pts.push_back(Json{{"lengths", p.lengths}, {"twists", p.twists}});
  j["points"] = pts;
  j["pairs"] = r.pairs.size();
  j["verdict"] = r.pass ? "PASS" : "FAIL";
  io::write_text(dir / "intersect_report.json", j.dump(2) + "\n");
}

}  // namespace teichtrop::lab
