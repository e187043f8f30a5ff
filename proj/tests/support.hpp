#pragma once

// Shared fixtures for the unit and acceptance suites: corpus loading, the
// table of verified minimizers, random cone generation, CLI capture.

#include <Eigen/Dense>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vopt/cli.hpp"
#include "vopt/cone.hpp"
#include "vopt/errors.hpp"
#include "vopt/parser.hpp"
#include "vopt/problem.hpp"
#include "vopt/rng.hpp"

#ifndef VOPT_CORPUS_DIR
#error "VOPT_CORPUS_DIR must be defined by the build"
#endif

namespace vsup {

inline std::string corpus_path(const std::string& name) {
  return std::string(VOPT_CORPUS_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vopt::Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline vopt::VectorProblem load_corpus(const std::string& name) {
  return vopt::parse_problem(read_file(corpus_path(name)));
}

inline Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

inline Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

inline Eigen::VectorXd vec3(double a, double b, double c) {
  Eigen::VectorXd v(3);
  v << a, b, c;
  return v;
}

// One corpus problem with its externally verified weak local minimizers, a
// radius on which each minimizer was confirmed dominator-free, and planted
// non-minimizers (points the certificate pipeline must refute).
struct CorpusEntry {
  const char* file;
  bool smooth;
  double radius;
  std::vector<Eigen::VectorXd> minimizers;
  std::vector<Eigen::VectorXd> non_minimizers;
};

inline const std::vector<CorpusEntry>& corpus_table() {
  static const std::vector<CorpusEntry> table = {
      {"e1.vopt", true, 0.5, {vec1(0.0)}, {vec1(1.0)}},
      {"e2.vopt", true, 0.25, {vec2(0.5, 0.5)}, {}},
      {"e3.vopt", true, 0.5, {vec1(0.0)}, {}},
      {"e6.vopt", true, 0.5, {vec1(0.0)}, {}},
      {"saddle.vopt", true, 0.25, {vec1(-1.0), vec1(1.0)}, {vec1(0.0)}},
      {"quad2d.vopt", true, 0.5, {vec2(1.0, 0.0)}, {vec2(0.0, 0.0)}},
      {"biobj.vopt", true, 0.25, {vec1(0.0), vec1(0.5), vec1(1.0)}, {}},
      {"circle.vopt", true, 0.25, {vec2(-1.0, -1.0)}, {}},
      {"expsum.vopt", true, 0.5, {vec1(0.0)}, {}},
      {"trig.vopt", true, 0.25, {vec1(-1.0)}, {}},
      {"gencone.vopt", true, 0.25, {vec2(0.5, 0.5)}, {}},
      {"cubic.vopt", true, 0.25, {vec1(0.0)}, {}},
      {"absval.vopt", false, 0.5, {vec1(0.0)}, {}},
      {"norm2d.vopt", false, 0.5, {vec2(0.0, 0.0)}, {}},
  };
  return table;
}

// Random pointed full-dimensional cone: generators drawn inside a blunt cap
// around a fixed axis, so a strict separating functional exists by
// construction. Rank-deficient draws are resampled.
inline vopt::PolyhedralCone random_cone(vopt::Rng& rng, int dim) {
  const Eigen::VectorXd axis = Eigen::VectorXd::Ones(dim).normalized();
  for (;;) {
    const int count = dim + 1 + static_cast<int>(rng.uniform() * 3.0);
    std::vector<Eigen::VectorXd> gens;
    gens.reserve(count);
    for (int i = 0; i < count; ++i)
      gens.push_back((axis + 0.6 * rng.unit_vector(dim)).normalized());
    try {
      return vopt::PolyhedralCone::from_generators(std::move(gens));
    } catch (const vopt::DegenerateConeError&) {
      continue;
    }
  }
}

// Line-preserving token split: maximal runs of identifier/number characters,
// every other non-space character on its own. Newlines separate statements in
// the problem format, so mutation must keep them intact.
inline std::vector<std::vector<std::string>> tokenize_lines(const std::string& text) {
  std::vector<std::vector<std::string>> lines(1);
  std::string word;
  auto flush = [&] {
    if (!word.empty()) lines.back().push_back(word);
    word.clear();
  };
  for (char c : text) {
    if (c == '\n') {
      flush();
      lines.emplace_back();
    } else if (c == ' ' || c == '\t' || c == '\r') {
      flush();
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
      word.push_back(c);
    } else {
      flush();
      lines.back().push_back(std::string(1, c));
    }
  }
  flush();
  return lines;
}

// Rebuilds the text with one token removed (index counted across all lines).
inline std::string delete_token(const std::vector<std::vector<std::string>>& lines,
                                long which) {
  std::string out;
  long seen = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    bool first = true;
    for (const std::string& tok : lines[li]) {
      if (seen++ == which) continue;
      if (!first) out += ' ';
      out += tok;
      first = false;
    }
    if (li + 1 < lines.size()) out += '\n';
  }
  return out;
}

inline long token_count(const std::vector<std::vector<std::string>>& lines) {
  long n = 0;
  for (const auto& line : lines) n += static_cast<long>(line.size());
  return n;
}

struct CliCapture {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliCapture run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliCapture cap;
  cap.code = vopt::run(args, out, err);
  cap.out = out.str();
  cap.err = err.str();
  return cap;
}

}  // namespace vsup
