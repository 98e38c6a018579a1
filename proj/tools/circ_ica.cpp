// circ-ica: command-line front end for the circica library.

#include "circica/circica.hpp"
#include "json_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using circica::Complex;
using circica::ComplexMatrix;
using circica::ComplexVector;
using circica::Error;
using circica::ErrorKind;
using circica::RealVector;
using circica::fail;
using nlohmann::json;
namespace jio = circica::json_io;

constexpr std::uint64_t kDefaultSeed = 0;
constexpr long kDefaultSamples = 100000;

const std::vector<std::string> kDemos = {"orthogonal-invariance", "nonunique", "nonidentifiable",
                                         "gaussian-separation"};
const std::vector<std::string> kToleranceKeys = {"gap_tol", "uncorrelated_tol", "rank_tol",
                                                 "residual_limit", "collinear_tol"};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return 2;
    case ErrorKind::not_full_rank:
    case ErrorKind::numeric:
    case ErrorKind::degenerate:
    case ErrorKind::entropy_undefined: return 4;
    default: return 3;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::parse, path + ": malformed JSON (" + e.what() + ")");
  }
}

circica::SampleMatrix read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
  try {
    return circica::csv::read(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void write_csv(const std::string& path, const circica::SampleMatrix& x) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write '" + path + "'");
  circica::csv::write(out, x);
  if (!out) fail(ErrorKind::io, "write to '" + path + "' failed");
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_seed(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    fail(ErrorKind::usage, where + ": '" + text + "' is not an unsigned integer");
  }
  return v;
}

struct GlobalOptions {
  std::string config_path;
  std::optional<std::string> seed;
  std::optional<long> samples;
  std::string output_path;
  bool json = false;
};

/// Effective settings after merging config file, flags, and environment.
struct Settings {
  std::uint64_t seed = kDefaultSeed;
  long samples = kDefaultSamples;
  std::map<std::string, double> tolerances;
  json config = json::object();

  std::optional<double> tolerance(const std::string& key) const {
    const auto it = tolerances.find(key);
    if (it == tolerances.end()) return std::nullopt;
    return it->second;
  }
};

Settings resolve_settings(const GlobalOptions& g) {
  Settings s;
  if (!g.config_path.empty()) {
    s.config = read_json(g.config_path);
    if (!s.config.is_object()) fail(ErrorKind::parse, g.config_path + ": config must be an object");
    if (s.config.contains("seed")) {
      const json& j = s.config["seed"];
      if (!j.is_number_unsigned()) fail(ErrorKind::parse, "config seed must be an unsigned integer");
      s.seed = j.get<std::uint64_t>();
    }
    if (s.config.contains("samples")) {
      const json& j = s.config["samples"];
      if (!j.is_number_integer()) fail(ErrorKind::parse, "config samples must be an integer");
      s.samples = j.get<long>();
    }
    if (s.config.contains("tolerances")) {
      const json& t = s.config["tolerances"];
      if (!t.is_object()) fail(ErrorKind::parse, "config tolerances must be an object");
      for (const auto& [key, value] : t.items()) {
        if (std::find(kToleranceKeys.begin(), kToleranceKeys.end(), key) == kToleranceKeys.end()) {
          fail(ErrorKind::parse, "config: unknown tolerance '" + key + "'");
        }
        const double v = jio::number(value, "config tolerances." + key);
        if (!(v > 0.0)) fail(ErrorKind::parse, "config: tolerance '" + key + "' must be positive");
        s.tolerances[key] = v;
      }
    }
  }
  if (g.seed) s.seed = parse_seed(*g.seed, "--seed");
  if (g.samples) s.samples = *g.samples;
  if (const char* env = std::getenv("CIRC_ICA_SEED"); env != nullptr && *env != '\0') {
    s.seed = parse_seed(env, "CIRC_ICA_SEED");
  }
  if (s.samples < 2) fail(ErrorKind::usage, "sample size must be at least 2");
  return s;
}

// --- decoding -------------------------------------------------------------

circica::SourceDeclaration decode_source(const json& j, const std::string& where) {
  if (!j.is_object()) jio::bad(where, "expected an object");
  circica::SourceDeclaration d;
  std::optional<circica::Distribution> dist;
  if (j.contains("distribution")) {
    if (!j["distribution"].is_string()) jio::bad(where, "distribution must be a string");
    dist = circica::parse_distribution(j["distribution"].get<std::string>());
    if (!dist) jio::bad(where, "unknown distribution '" + j["distribution"].get<std::string>() + "'");
  }
  std::string kind;
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) jio::bad(where, "kind must be a string");
    kind = j["kind"].get<std::string>();
  } else if (dist) {
    kind = *dist == circica::Distribution::complex_normal ? "complex_normal" : "non_normal";
  } else {
    jio::bad(where, "missing field 'kind'");
  }
  if (kind == "complex_normal") {
    d.kind = circica::SourceKind::complex_normal;
    if (dist && *dist != circica::Distribution::complex_normal) {
      jio::bad(where, "complex_normal source with non-normal distribution");
    }
    d.circularity = jio::number(jio::field(j, "circularity", where), where + ".circularity");
    if (!(d.circularity >= 0.0 && d.circularity <= 1.0)) {
      fail(ErrorKind::model, where + ": circularity outside [0, 1]");
    }
    d.sampler = {{circica::Distribution::complex_normal, d.circularity, 1.0}};
  } else if (kind == "non_normal") {
    d.kind = circica::SourceKind::non_normal;
    if (dist) {
      if (*dist == circica::Distribution::complex_normal) {
        jio::bad(where, "non_normal source with complex_normal distribution");
      }
      d.sampler = {{*dist, 0.0, 1.0}};
      d.circularity = std::abs(circica::pseudo_variance(d.sampler)) / circica::variance(d.sampler);
    }
  } else {
    jio::bad(where, "kind must be 'complex_normal' or 'non_normal'");
  }
  if (j.contains("cf_analytic")) {
    if (!j["cf_analytic"].is_boolean()) jio::bad(where, "cf_analytic must be a boolean");
    d.cf_analytic_without_poly_factor = j["cf_analytic"].get<bool>();
  }
  return d;
}

std::vector<circica::SourceDeclaration> decode_sources(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) jio::bad(where, "expected a nonempty array of sources");
  std::vector<circica::SourceDeclaration> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(decode_source(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

circica::ComplexNormalModel decode_normal_model(const json& j, const std::string& where,
                                                circica::SutOptions opt) {
  if (!j.is_object()) jio::bad(where, "expected an object");
  if (j.contains("cov") || j.contains("pcov")) {
    circica::SecondOrderStats s;
    s.cov = jio::decode_matrix(jio::field(j, "cov", where), where + ".cov");
    s.pcov = jio::decode_matrix(jio::field(j, "pcov", where), where + ".pcov");
    s.mean = j.contains("mean") ? jio::decode_vector(j["mean"], where + ".mean")
                                : ComplexVector::Zero(s.cov.rows());
    return circica::model_from_stats(s, opt).model;
  }
  circica::ComplexNormalModel m;
  m.mixing = jio::decode_matrix(jio::field(j, "mixing_factor", where), where + ".mixing_factor");
  m.spectrum = jio::decode_real_vector(jio::field(j, "spectrum", where), where + ".spectrum");
  m.mean = j.contains("mean") ? jio::decode_vector(j["mean"], where + ".mean")
                              : ComplexVector::Zero(m.mixing.rows());
  circica::validate(m);
  return m;
}

circica::SecondOrderStats decode_stats(const json& j, const std::string& where) {
  circica::SecondOrderStats s;
  s.cov = jio::decode_matrix(jio::field(j, "cov", where), where + ".cov");
  s.pcov = jio::decode_matrix(jio::field(j, "pcov", where), where + ".pcov");
  s.mean = j.contains("mean") ? jio::decode_vector(j["mean"], where + ".mean")
                              : ComplexVector::Zero(s.cov.rows());
  s.sample_count = 0;
  return s;
}

/// A bare matrix, {"mixing": M}, or a result record carrying outputs.mixing.
ComplexMatrix decode_mixing_file(const std::string& path) {
  const json j = read_json(path);
  if (j.is_array()) return jio::decode_matrix(j, path);
  if (j.is_object() && j.contains("mixing")) return jio::decode_matrix(j["mixing"], path + ".mixing");
  if (j.is_object() && j.contains("outputs") && j["outputs"].contains("mixing")) {
    return jio::decode_matrix(j["outputs"]["mixing"], path + ".outputs.mixing");
  }
  jio::bad(path, "expected a mixing matrix");
}

circica::SutOptions sut_options(const Settings& s) {
  circica::SutOptions opt;
  if (auto v = s.tolerance("rank_tol")) opt.rank_tol = *v;
  if (auto v = s.tolerance("residual_limit")) opt.residual_limit = *v;
  return opt;
}

// --- encoding -------------------------------------------------------------

json encode_verdict(const circica::ModelVerdict& v) {
  json reasons = json::array();
  for (const auto& r : v.reasons) reasons.push_back({{"code", r.code}, {"text", r.text}});
  return {{"separable", v.separable},
          {"identifiable", v.identifiable},
          {"unique", v.unique},
          {"identifiable_status", v.identifiable ? "established" : "not established"},
          {"unique_status", v.unique ? "established" : "not established"},
          {"rank", v.rank},
          {"reasons", reasons}};
}

json encode_separation(const circica::SeparationReport& r) {
  json out = {{"demixing", jio::encode(r.demixing)},
              {"spectrum", jio::encode_real(r.spectrum.values)},
              {"spectrum_distinct", r.spectrum_distinct},
              {"gap_tol", r.gap_tol},
              {"subspace_reduced", r.subspace_reduced},
              {"cov_residual", r.cov_residual},
              {"pcov_residual", r.pcov_residual},
              {"warnings", r.warnings}};
  if (r.quality) {
    json perm = json::array();
    for (auto p : r.quality->permutation) perm.push_back(p);
    json scalars = json::array();
    for (auto z : r.quality->row_scalars) scalars.push_back(jio::encode(z));
    out["gain"] = jio::encode(*r.gain);
    out["quality_index"] = r.quality->index;
    out["permutation"] = perm;
    out["row_scalars"] = scalars;
    out["degenerate_permutation"] = r.quality->degenerate_permutation;
  }
  return out;
}

json encode_representation(const circica::Representation& rep) {
  json sources = json::array();
  for (const auto& s : rep.sources) {
    json atoms = json::array();
    for (const auto& a : s.sampler) {
      atoms.push_back({{"distribution", circica::to_string(a.dist)},
                       {"circularity", a.circularity},
                       {"scale", jio::encode(a.scale)}});
    }
    sources.push_back({{"kind", circica::to_string(s.kind)},
                       {"circularity", s.circularity},
                       {"atoms", atoms}});
  }
  return {{"mixing", jio::encode(rep.mixing)}, {"sources", sources}};
}

json encode_pair(const circica::RepresentationPairReport& r, double tol) {
  return {{"first", encode_representation(r.first)},
          {"second", encode_representation(r.second)},
          {"first_stats", jio::encode(r.first_stats)},
          {"second_stats", jio::encode(r.second_stats)},
          {"stats_equal_exact", r.stats_equal_exact},
          {"ecf_deviation", r.ecf_deviation},
          {"ecf_tolerance", tol},
          {"first_reduced", r.first_reduced},
          {"second_reduced", r.second_reduced},
          {"first_verdict", encode_verdict(r.first_verdict)},
          {"second_verdict", encode_verdict(r.second_verdict)}};
}

// --- human-readable output ------------------------------------------------

bool is_complex_pair(const json& j) {
  return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number();
}

std::string fmt_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt_scalar(const json& j) {
  if (is_complex_pair(j)) {
    const double im = j[1].get<double>();
    return fmt_number(j[0].get<double>()) + (im < 0 ? "-" : "+") + fmt_number(std::abs(im)) + "j";
  }
  if (j.is_number()) return fmt_number(j.get<double>());
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_null()) return "null";
  return j.dump();
}

bool is_flat_row(const json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j) {
    if (!(e.is_number() || e.is_string() || e.is_boolean() || is_complex_pair(e))) return false;
  }
  return true;
}

// Real-valued arrays; a two-element one would otherwise read as a complex pair.
const std::vector<std::string> kRealKeys = {"spectrum",        "expected_spectrum",
                                            "rotation",        "real_rotation",
                                            "permutation",     "last_column_residuals",
                                            "circularity_coefficients"};

void print_real(std::ostream& out, const json& row) {
  out << "[";
  for (std::size_t i = 0; i < row.size(); ++i) out << (i ? ", " : "") << fmt_scalar(row[i]);
  out << "]";
}

void print_human(std::ostream& out, const json& j, const std::string& indent) {
  for (const auto& [key, value] : j.items()) {
    const bool real = std::find(kRealKeys.begin(), kRealKeys.end(), key) != kRealKeys.end();
    if (real && value.is_array() && !value.empty() && value[0].is_array()) {
      out << indent << key << ":\n";
      for (const auto& row : value) {
        out << indent << "  ";
        print_real(out, row);
        out << "\n";
      }
    } else if (real && value.is_array()) {
      out << indent << key << ": ";
      print_real(out, value);
      out << "\n";
    } else if (value.is_object()) {
      out << indent << key << ":\n";
      print_human(out, value, indent + "  ");
    } else if (is_flat_row(value) && !is_complex_pair(value)) {
      out << indent << key << ": [";
      for (std::size_t i = 0; i < value.size(); ++i) out << (i ? ", " : "") << fmt_scalar(value[i]);
      out << "]\n";
    } else if (value.is_array() && !is_complex_pair(value)) {
      out << indent << key << ":\n";
      for (const auto& row : value) {
        if (is_flat_row(row) && !is_complex_pair(row)) {
          out << indent << "  [";
          for (std::size_t i = 0; i < row.size(); ++i) out << (i ? ", " : "") << fmt_scalar(row[i]);
          out << "]\n";
        } else if (row.is_object()) {
          out << indent << "  -\n";
          print_human(out, row, indent + "    ");
        } else {
          out << indent << "  " << fmt_scalar(row) << "\n";
        }
      }
    } else {
      out << indent << key << ": " << fmt_scalar(value) << "\n";
    }
  }
}

// --- commands -------------------------------------------------------------

struct CommandArgs {
  std::string input;
  std::string stats_path;
  std::string mixing_path;
  std::string demixed_path;
  std::string csv_path;
  std::string demo_name;
  long sources = 0;
  long dim = 3;
  long m = 3;
  double lambda = 0.4;
  long points = 20;
  double radius = 2.0;
  std::optional<double> gap_tol;
};

json cmd_estimate(const CommandArgs& a, const Settings&) {
  const auto x = read_csv(a.input);
  const auto s = circica::estimate_stats(x);
  json out = jio::encode(s);
  out["dimension"] = s.dimension();
  json coeffs = json::array();
  json warnings = json::array();
  for (Eigen::Index k = 0; k < s.dimension(); ++k) {
    try {
      coeffs.push_back(circica::circularity_coefficient(
          circica::scalar_stats(s.cov(k, k).real(), s.pcov(k, k), s.mean(k))));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::degenerate) throw;
      coeffs.push_back(nullptr);
      warnings.push_back("component " + std::to_string(k) + ": " + e.what());
    }
  }
  out["circularity_coefficients"] = coeffs;
  out["warnings"] = warnings;
  return out;
}

json cmd_sut(const CommandArgs& a, const Settings& s) {
  circica::SecondOrderStats stats;
  if (!a.stats_path.empty()) {
    stats = decode_stats(read_json(a.stats_path), a.stats_path);
  } else if (!a.input.empty()) {
    stats = circica::estimate_stats(read_csv(a.input));
  } else {
    fail(ErrorKind::usage, "sut: give an input CSV file or --stats FILE");
  }
  const auto r = circica::strong_uncorrelating_transform(stats, sut_options(s));
  const double gap = a.gap_tol.value_or(
      s.tolerance("gap_tol").value_or(circica::default_gap_tolerance(stats.sample_count)));
  return {{"transform", jio::encode(r.transform)},
          {"spectrum", jio::encode_real(r.spectrum.values)},
          {"spectrum_distinct", circica::spectrum_distinct(r.spectrum, gap)},
          {"gap_tol", gap},
          {"cov_residual", r.cov_residual},
          {"pcov_residual", r.pcov_residual},
          {"sample_count", stats.sample_count}};
}

json cmd_separate(const CommandArgs& a, const Settings& s) {
  const auto x = read_csv(a.input);
  const Eigen::Index m = a.sources > 0 ? a.sources : x.rows();
  circica::SeparationOptions opt;
  opt.sut = sut_options(s);
  if (a.gap_tol) {
    opt.gap_tol = a.gap_tol;
  } else if (auto g = s.tolerance("gap_tol")) {
    opt.gap_tol = g;
  }
  std::optional<ComplexMatrix> mixing;
  if (!a.mixing_path.empty()) mixing = decode_mixing_file(a.mixing_path);
  const auto rep = circica::separate_sut(x, m, opt, mixing);
  json out = encode_separation(rep);
  out["sample_count"] = x.cols();
  if (!a.demixed_path.empty()) {
    write_csv(a.demixed_path, circica::demix(rep, x));
    out["demixed_file"] = a.demixed_path;
  }
  return out;
}

json cmd_verdict(const CommandArgs& a, const Settings& s) {
  const json j = read_json(a.input);
  circica::Representation rep;
  rep.mixing = jio::decode_matrix(jio::field(j, "mixing", a.input), a.input + ".mixing");
  rep.sources = decode_sources(jio::field(j, "sources", a.input), a.input + ".sources");
  circica::VerdictOptions opt;
  if (auto v = s.tolerance("gap_tol")) opt.gap_tol = *v;
  if (auto v = s.tolerance("collinear_tol")) opt.collinear_tol = *v;
  if (j.contains("gap_tol")) opt.gap_tol = jio::number(j["gap_tol"], a.input + ".gap_tol");
  if (a.gap_tol) opt.gap_tol = *a.gap_tol;
  const auto red = circica::check_reduced(rep.mixing, opt.collinear_tol);
  if (!red.reduced) {
    fail(ErrorKind::contract, "mixing matrix is not reduced: columns " +
                                  std::to_string(red.pair->first) + " and " +
                                  std::to_string(red.pair->second) + " are collinear");
  }
  json out = encode_verdict(circica::verdict(rep, opt));
  out["gap_tol"] = opt.gap_tol;
  out["sources"] = rep.sources.size();
  out["mixtures"] = rep.mixing.rows();
  return out;
}

json cmd_demo(const CommandArgs& a, const Settings& s) {
  const double ecf_tol = 0.03;
  const Eigen::Index n = s.samples;
  if (a.demo_name == "orthogonal-invariance") {
    const auto r = circica::demo_orthogonal_invariance(a.dim, a.lambda, s.seed, n);
    return {{"demo", a.demo_name},
            {"dimension", a.dim},
            {"lambda", a.lambda},
            {"rotation", jio::encode_real(r.rotation)},
            {"standard_stats", jio::encode(r.standard_stats)},
            {"rotated_stats", jio::encode(r.rotated_stats)},
            {"stats_equal_exact", r.stats_equal_exact},
            {"float_cov_residual", r.float_cov_residual},
            {"float_pcov_residual", r.float_pcov_residual},
            {"ecf_deviation", r.ecf_deviation},
            {"ecf_tolerance", ecf_tol},
            {"assertions",
             {{"stats_equal", r.stats_equal_exact}, {"ecf_agree", r.ecf_deviation < ecf_tol}}}};
  }
  if (a.demo_name == "nonunique") {
    const auto r = circica::demo_nonunique(s.seed, n);
    json out = encode_pair(r, ecf_tol);
    out["demo"] = a.demo_name;
    out["assertions"] = {{"stats_equal", r.stats_equal_exact},
                         {"ecf_agree", r.ecf_deviation < ecf_tol},
                         {"both_reduced", r.first_reduced && r.second_reduced}};
    return out;
  }
  if (a.demo_name == "nonidentifiable") {
    const auto r = circica::demo_nonidentifiable(s.seed, n);
    json out = encode_pair(r, ecf_tol);
    out["demo"] = a.demo_name;
    out["last_column_residuals"] = r.last_column_residuals;
    out["assertions"] = {{"stats_equal", r.stats_equal_exact},
                         {"ecf_agree", r.ecf_deviation < ecf_tol},
                         {"last_column_collinear_with_none", r.last_column_collinear_with_none}};
    return out;
  }
  if (a.demo_name == "gaussian-separation") {
    const auto r = circica::demo_real_embedding_gap(a.m, s.seed, n);
    const double q = r.separation.quality->index;
    return {{"demo", a.demo_name},
            {"m", a.m},
            {"expected_spectrum", jio::encode_real(r.expected_spectrum)},
            {"mixing", jio::encode(r.mixing)},
            {"separation", encode_separation(r.separation)},
            {"quality_index", q},
            {"real_rotation", jio::encode_real(r.real_rotation)},
            {"real_cov_residual", r.real_cov_residual},
            {"real_rotation_is_signed_permutation", r.rotation_is_signed_permutation},
            {"assertions",
             {{"complex_separation", q < 0.1},
              {"real_rotation_preserves_cov", r.real_cov_residual == 0.0},
              {"real_rotation_nontrivial", !r.rotation_is_signed_permutation}}}};
  }
  std::string names;
  for (const auto& d : kDemos) names += (names.empty() ? "" : ", ") + d;
  fail(ErrorKind::usage, "unknown demo '" + a.demo_name + "'; valid demos: " + names);
}

json cmd_entropy(const CommandArgs& a, const Settings& s) {
  const auto model = decode_normal_model(read_json(a.input), a.input, sut_options(s));
  const auto h = circica::entropy(model);
  return {{"entropy", h.total},
          {"log_det_term", h.log_det_term},
          {"circularity_term", h.circularity_term},
          {"spectrum", jio::encode_real(model.spectrum)},
          {"units", "nats"}};
}

json cmd_cf_check(const CommandArgs& a, const Settings& s) {
  const auto model = decode_normal_model(read_json(a.input), a.input, sut_options(s));
  if (a.points < 1) fail(ErrorKind::usage, "--points must be positive");
  if (!(a.radius > 0.0)) fail(ErrorKind::usage, "--radius must be positive");
  const auto points = circica::default_grid_points(model.dimension(),
                                                   static_cast<std::size_t>(a.points), a.radius);
  const auto x = circica::sample(model, s.samples, s.seed);
  const auto closed = circica::cf_grid_closed_form(model, points);
  const auto emp = circica::cf_grid_empirical(x, points);
  json grid = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    grid.push_back({{"z", jio::encode(points[i])},
                    {"closed_form", jio::encode(closed.values[i])},
                    {"empirical", jio::encode(emp.values[i])}});
  }
  const auto fact = circica::independence_factorization_check(x, points);
  return {{"max_deviation", circica::max_deviation(closed, emp)},
          {"factorization_max_deviation", fact.max_deviation},
          {"sample_count", x.cols()},
          {"grid", grid}};
}

json cmd_simulate(const CommandArgs& a, const Settings& s) {
  if (a.csv_path.empty()) fail(ErrorKind::usage, "simulate: --csv FILE is required");
  json spec;
  if (!a.input.empty()) {
    spec = read_json(a.input);
  } else if (s.config.contains("sources")) {
    spec = s.config;
  } else {
    fail(ErrorKind::usage, "simulate: give a model file or a config with sources");
  }
  const std::string where = a.input.empty() ? "config" : a.input;
  json out;
  circica::SampleMatrix x;
  if (spec.contains("sources")) {
    circica::Representation rep;
    rep.sources = decode_sources(spec["sources"], where + ".sources");
    const auto m = static_cast<Eigen::Index>(rep.sources.size());
    const json& mix = jio::field(spec, "mixing", where);
    if (mix.is_string()) {
      if (mix.get<std::string>() != "random-full-rank") {
        jio::bad(where + ".mixing", "expected a matrix or \"random-full-rank\"");
      }
      const Eigen::Index p = spec.contains("mixtures")
                                 ? static_cast<Eigen::Index>(jio::number(spec["mixtures"], where))
                                 : m;
      if (p < 1) jio::bad(where + ".mixtures", "must be positive");
      rep.mixing = circica::random_mixing(p, m, circica::derive_seed(s.seed, 1000));
    } else {
      rep.mixing = jio::decode_matrix(mix, where + ".mixing");
    }
    for (std::size_t k = 0; k < rep.sources.size(); ++k) {
      if (rep.sources[k].sampler.empty()) {
        jio::bad(where + ".sources[" + std::to_string(k) + "]",
                 "non_normal source needs a distribution to be simulated");
      }
    }
    x = circica::sample_mixture(rep, s.samples, s.seed);
    out["mixing"] = jio::encode(rep.mixing);
    out["model_stats"] = jio::encode(circica::mixture_stats(rep));
  } else {
    const auto model = decode_normal_model(spec, where, sut_options(s));
    x = circica::sample(model, s.samples, s.seed);
    out["mixing_factor"] = jio::encode(model.mixing);
    out["spectrum"] = jio::encode_real(model.spectrum);
    out["model_stats"] = jio::encode(circica::model_stats(model));
  }
  write_csv(a.csv_path, x);
  out["csv_file"] = a.csv_path;
  out["dimension"] = x.rows();
  out["sample_count"] = x.cols();
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"circ-ica: second-order analysis and separation of complex-valued mixtures"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::string seed_text;
  long samples = 0;
  app.add_option("--config", g.config_path, "JSON config file");
  auto* seed_opt = app.add_option("--seed", seed_text, "64-bit seed (CIRC_ICA_SEED overrides)");
  auto* samples_opt = app.add_option("--samples", samples, "sample size for simulations");
  app.add_option("--output", g.output_path, "write the JSON record to FILE");
  app.add_flag("--json", g.json, "print the JSON record instead of a summary");

  CommandArgs a;
  auto* estimate = app.add_subcommand("estimate", "covariance, pseudo-covariance, coefficients");
  estimate->add_option("input", a.input, "CSV file")->required();

  auto* sut = app.add_subcommand("sut", "strong-uncorrelating transform and spectrum");
  sut->add_option("input", a.input, "CSV file");
  sut->add_option("--stats", a.stats_path, "JSON {cov, pcov[, mean]} for exact moments");
  sut->add_option("--gap-tol", a.gap_tol, "gap tolerance for spectrum distinctness");

  auto* separate = app.add_subcommand("separate", "separate a mixture by the SUT");
  separate->add_option("input", a.input, "CSV file")->required();
  separate->add_option("--sources", a.sources, "number of sources (default: dimension)");
  separate->add_option("--mixing", a.mixing_path, "JSON true mixing matrix for evaluation");
  separate->add_option("--demixed", a.demixed_path, "write recovered sources to CSV");
  separate->add_option("--gap-tol", a.gap_tol, "gap tolerance for spectrum distinctness");

  auto* verdict = app.add_subcommand("verdict", "separability, identifiability, uniqueness");
  verdict->add_option("input", a.input, "JSON representation")->required();
  verdict->add_option("--gap-tol", a.gap_tol, "equal-coefficient tolerance");

  auto* demo = app.add_subcommand("demo", "run a worked example");
  demo->add_option("name", a.demo_name, "orthogonal-invariance | nonunique | nonidentifiable | "
                                        "gaussian-separation")
      ->required();
  demo->add_option("--dim", a.dim, "dimension (orthogonal-invariance)");
  demo->add_option("--lambda", a.lambda, "circularity coefficient (orthogonal-invariance)");
  demo->add_option("--m", a.m, "number of sources (gaussian-separation)");

  auto* entropy = app.add_subcommand("entropy", "entropy of a complex normal model");
  entropy->add_option("input", a.input, "JSON model")->required();

  auto* cf = app.add_subcommand("cf-check", "closed-form vs empirical characteristic function");
  cf->add_option("input", a.input, "JSON model")->required();
  cf->add_option("--points", a.points, "number of grid points");
  cf->add_option("--radius", a.radius, "polydisc radius");

  auto* simulate = app.add_subcommand("simulate", "draw samples from a model or mixture");
  simulate->add_option("input", a.input, "JSON model or representation (default: config)");
  simulate->add_option("--csv", a.csv_path, "output CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (seed_opt->count() > 0) g.seed = seed_text;
  if (samples_opt->count() > 0) g.samples = samples;

  try {
    const auto start = std::chrono::steady_clock::now();
    const Settings s = resolve_settings(g);
    json outputs;
    if (command == "estimate") outputs = cmd_estimate(a, s);
    else if (command == "sut") outputs = cmd_sut(a, s);
    else if (command == "separate") outputs = cmd_separate(a, s);
    else if (command == "verdict") outputs = cmd_verdict(a, s);
    else if (command == "demo") outputs = cmd_demo(a, s);
    else if (command == "entropy") outputs = cmd_entropy(a, s);
    else if (command == "cf-check") outputs = cmd_cf_check(a, s);
    else outputs = cmd_simulate(a, s);
    const double elapsed =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();

    json tolerances = json::object();
    for (const auto& [k, v] : s.tolerances) tolerances[k] = v;
    json args = {{"input", a.input},         {"stats", a.stats_path}, {"mixing", a.mixing_path},
                 {"sources", a.sources},     {"demo", a.demo_name},   {"dim", a.dim},
                 {"lambda", a.lambda},       {"m", a.m},              {"points", a.points},
                 {"radius", a.radius},       {"csv", a.csv_path},     {"demixed", a.demixed_path},
                 {"gap_tol", a.gap_tol ? json(*a.gap_tol) : json(nullptr)}};
    const json canonical = {{"command", command},
                            {"seed", s.seed},
                            {"samples", s.samples},
                            {"tolerances", tolerances},
                            {"arguments", args}};
    const json record = {{"command", command},
                         {"seed", s.seed},
                         {"config_hash", hex64(fnv1a(canonical.dump()))},
                         {"outputs", outputs},
                         {"timing", {{"elapsed_ms", elapsed}}}};

    if (!g.output_path.empty()) {
      std::ofstream out(g.output_path);
      if (!out) fail(ErrorKind::io, "cannot write '" + g.output_path + "'");
      out << record.dump(2) << "\n";
    }
    if (g.json) {
      std::cout << record.dump(2) << "\n";
    } else {
      std::cout << "command: " << command << "\nseed: " << s.seed
                << "\nconfig_hash: " << record["config_hash"].get<std::string>() << "\n";
      print_human(std::cout, outputs, "");
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "circ-ica: " << circica::to_string(e.kind()) << " error: " << e.what() << "\n";
    if (g.json) {
      const json err = {{"command", command},
                        {"error", {{"kind", std::string(circica::to_string(e.kind()))},
                                   {"message", e.what()},
                                   {"exit_code", exit_code(e.kind())}}}};
      std::cout << err.dump(2) << "\n";
    }
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "circ-ica: error: " << e.what() << "\n";
    return 3;
  }
}
