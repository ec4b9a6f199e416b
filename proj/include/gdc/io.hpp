#pragma once

// File formats: JSON for games, controllers, configs and reports; CSV for
// eigencycle sets, time series and tables.

#include <chrono>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "gdc/controller.hpp"
#include "gdc/eigen.hpp"
#include "gdc/error.hpp"
#include "gdc/game.hpp"
#include "gdc/measurement.hpp"
#include "gdc/rng.hpp"
#include "gdc/simulation.hpp"
#include "gdc/version.hpp"

namespace gdc::io {

using nlohmann::json;

// ---------------------------------------------------------------- basics

inline std::string format_number(double v, int precision = 10) {
  if (v == 0.0) return "0";  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("failed writing " + path.string());
}

/// Parses JSON; syntax errors report the line and column.
inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                          ": malformed JSON");
  }
}

inline json load_json(const std::filesystem::path& path) {
  return parse_json(read_text(path), path.string());
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// 64-bit FNV-1a, hex encoded.
inline std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string file_digest(const std::filesystem::path& path) {
  return digest(read_text(path));
}

// ---------------------------------------------------------------- numbers

inline double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(where + ": non-finite number");
  return v;
}

inline Eigen::VectorXd vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = number_at(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

inline json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
  return out;
}

inline json to_json(const std::complex<double>& z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline std::complex<double> complex_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ValidationError(where + ": expected [re, im]");
  return {number_at(j[0], where), number_at(j[1], where)};
}

inline Eigen::VectorXcd complex_vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array of [re, im]");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

// ---------------------------------------------------------------- games

inline json to_json(const PayoffMatrix& a) {
  return json{{"n", a.n()}, {"matrix", to_json(a.matrix())}};
}

inline PayoffMatrix payoff_matrix_from_json(const json& j, const std::string& source) {
  if (!j.is_object()) throw ValidationError(source + ": game must be a JSON object");
  if (!j.contains("matrix")) throw ValidationError(source + ": missing \"matrix\"");
  const json& rows = j.at("matrix");
  if (!rows.is_array() || rows.empty()) {
    throw ValidationError(source + ": \"matrix\" must be a nonempty array of rows");
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string where = source + ": matrix row " + std::to_string(i + 1);
    const Eigen::VectorXd row = vector_from_json(rows[static_cast<std::size_t>(i)], where);
    if (row.size() != n) {
      throw ValidationError(where + " has " + std::to_string(row.size()) +
                            " entries, expected " + std::to_string(n));
    }
    m.row(i) = row.transpose();
  }
  if (j.contains("n")) {
    if (!j.at("n").is_number_integer() || j.at("n").get<long long>() != n) {
      throw ValidationError(source + ": \"n\" does not match the matrix size");
    }
  }
  return PayoffMatrix(m);
}

inline PayoffMatrix load_payoff_matrix(const std::filesystem::path& path) {
  return payoff_matrix_from_json(load_json(path), path.string());
}

// ---------------------------------------------------------------- eigen

inline json to_json(const EigenSystem& es) {
  json vectors = json::array();
  for (int k = 0; k < es.n(); ++k) vectors.push_back(to_json(Eigen::VectorXcd(es.vectors.col(k))));
  return json{{"eigenvalues", to_json(es.values)}, {"eigenvectors", vectors}};
}

inline json to_json(const EigencycleSet& set) {
  json labels = json::array();
  for (const auto& p : set.pairs) labels.push_back(pair_label(p));
  return json{{"pairs", labels}, {"values", to_json(set.values)}, {"normalized", set.normalized}};
}

inline json to_json(const AngularMomentumSet& set) {
  json labels = json::array();
  for (const auto& p : set.pairs) labels.push_back(pair_label(p));
  return json{{"pairs", labels}, {"values", to_json(set.values)}};
}

inline std::string pair_values_csv(const std::vector<std::pair<int, int>>& pairs,
                                   const Eigen::VectorXd& values) {
  std::string out = "pair,sigma\n";
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    out += pair_label(pairs[p]) + "," + format_number(values(static_cast<Eigen::Index>(p))) + "\n";
  }
  return out;
}

inline std::string eigencycles_csv(const EigencycleSet& set) {
  return pair_values_csv(set.pairs, set.values);
}

// ---------------------------------------------------------------- CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  Eigen::VectorXd numeric_column(const std::string& name, const std::string& source) const {
    const int c = column(name);
    if (c < 0) throw ValidationError(source + ": missing column \"" + name + "\"");
    Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::string& cell = rows[r][static_cast<std::size_t>(c)];
      try {
        std::size_t used = 0;
        v(static_cast<Eigen::Index>(r)) = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ValidationError(source + ":" + std::to_string(r + 2) + ": not a number: \"" +
                              cell + "\"");
      }
    }
    return v;
  }
};

inline CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) {
      while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\r')) cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      cells.push_back(cell);
    }
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ValidationError(source + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(t.header.size()) + " fields, got " +
                            std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw ValidationError(source + ": empty CSV");
  return t;
}

inline CsvTable load_csv(const std::filesystem::path& path) {
  return parse_csv(read_text(path), path.string());
}

/// `pair,<value>` CSV (eigencycles or angular momenta) -> values in file order.
inline Eigen::VectorXd load_pair_values(const std::filesystem::path& path,
                                        const std::string& column = "") {
  const CsvTable t = load_csv(path);
  if (t.header.size() < 2 || t.header[0] != "pair") {
    throw ValidationError(path.string() + ": expected a \"pair,<value>\" header");
  }
  return t.numeric_column(column.empty() ? t.header[1] : column, path.string());
}

// ---------------------------------------------------------------- controllers

inline json to_json(const ControllerSpec& spec) {
  return json{{"channel", spec.channel.index() + 1},
              {"b", spec.shift},
              {"K", to_json(spec.gain)},
              {"desired_spectrum", to_json(spec.desired_spectrum)},
              {"equilibrium_drift", spec.equilibrium_drift},
              {"controlled_jacobian", to_json(spec.controlled)}};
}

inline FeedbackRule feedback_rule_from_json(const json& j, int n, const std::string& source) {
  if (!j.is_object()) throw ValidationError(source + ": controller must be a JSON object");
  if (!j.contains("channel") || !j.at("channel").is_number_integer()) {
    throw ValidationError(source + ": controller needs an integer \"channel\" (1-based)");
  }
  if (!j.contains("K")) throw ValidationError(source + ": controller needs \"K\"");
  const int channel = j.at("channel").get<int>() - 1;
  Eigen::VectorXd gain = vector_from_json(j.at("K"), source + ": K");
  if (gain.size() != n) {
    throw ValidationError(source + ": K has " + std::to_string(gain.size()) +
                          " entries, game has " + std::to_string(n) + " strategies");
  }
  return {ChannelVector(channel, n), std::move(gain)};
}

inline FeedbackRule load_feedback_rule(const std::filesystem::path& path, int n) {
  return feedback_rule_from_json(load_json(path), n, path.string());
}

// ---------------------------------------------------------------- simulations

inline json to_json(const SimConfig& cfg) {
  json j{{"agents", cfg.agents},
         {"rounds", cfg.rounds},
         {"revision_prob", cfg.revision_prob},
         {"seed", cfg.seed},
         {"game", to_json(cfg.game)},
         {"init", initial_counts(cfg)}};
  if (cfg.controller) {
    j["controller"] = json{{"channel", cfg.controller->channel.index() + 1},
                           {"K", to_json(cfg.controller->gain)}};
  } else {
    j["controller"] = nullptr;
  }
  return j;
}

inline SimConfig sim_config_from_json(const json& j, const std::string& source) {
  if (!j.is_object() || !j.contains("game")) {
    throw ValidationError(source + ": sim config needs a \"game\" object");
  }
  SimConfig cfg(payoff_matrix_from_json(j.at("game"), source + ": game"));
  try {
    if (j.contains("agents")) cfg.agents = j.at("agents").get<long long>();
    if (j.contains("rounds")) cfg.rounds = j.at("rounds").get<long long>();
    if (j.contains("revision_prob")) cfg.revision_prob = j.at("revision_prob").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("init") && !j.at("init").is_null()) {
      cfg.init = j.at("init").get<std::vector<long long>>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(source + ": " + e.what());
  }
  if (j.contains("controller") && !j.at("controller").is_null()) {
    cfg.controller = feedback_rule_from_json(j.at("controller"), cfg.game.n(), source + ": controller");
  }
  validate(cfg);
  return cfg;
}

inline json simulation_metadata(const SimConfig& cfg) {
  return json{{"seed", cfg.seed},
              {"rng", StreamRng::kAlgorithm},
              {"code_version", kVersion},
              {"config", to_json(cfg)}};
}

inline std::string time_series_csv(const TimeSeries& ts) {
  std::string out = "round";
  for (int i = 0; i < ts.n; ++i) out += ",c" + std::to_string(i + 1);
  out += ",mean_payoff,control_flow\n";
  for (const auto& rec : ts.rounds) {
    out += std::to_string(rec.round);
    for (long long c : rec.counts) out += "," + std::to_string(c);
    out += "," + format_number(rec.mean_payoff, 12) + "," + format_number(rec.reward, 12) + "\n";
  }
  return out;
}

/// Reads a series CSV; the population size is the first row's count total.
inline TimeSeries parse_time_series(const std::string& text, const std::string& source) {
  const CsvTable t = parse_csv(text, source);
  int n = 0;
  while (t.column("c" + std::to_string(n + 1)) >= 0) ++n;
  if (n < 2) throw ValidationError(source + ": series needs columns c1, c2, ...");
  TimeSeries ts;
  ts.n = n;
  const int round_col = t.column("round");
  const int payoff_col = t.column("mean_payoff");
  const int flow_col = t.column("control_flow");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = source + ":" + std::to_string(r + 2);
    RoundRecord rec;
    try {
      rec.round = round_col >= 0 ? std::stoll(row[static_cast<std::size_t>(round_col)])
                                 : static_cast<long long>(r);
      long long total = 0;
      for (int i = 0; i < n; ++i) {
        const long long c = std::stoll(row[static_cast<std::size_t>(t.column("c" + std::to_string(i + 1)))]);
        if (c < 0) throw ValidationError(where + ": negative count");
        rec.counts.push_back(c);
        total += c;
      }
      if (r == 0) ts.agents = total;
      if (total != ts.agents || total <= 0) {
        throw ValidationError(where + ": counts sum to " + std::to_string(total) +
                              ", expected " + std::to_string(ts.agents));
      }
      if (payoff_col >= 0) rec.mean_payoff = std::stod(row[static_cast<std::size_t>(payoff_col)]);
      if (flow_col >= 0) {
        rec.reward = std::stod(row[static_cast<std::size_t>(flow_col)]);
        rec.tax = -rec.reward;
      }
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception&) {
      throw ValidationError(where + ": malformed row");
    }
    ts.rounds.push_back(std::move(rec));
  }
  if (ts.rounds.empty()) throw ValidationError(source + ": series has no rows");
  return ts;
}

inline TimeSeries load_time_series(const std::filesystem::path& path) {
  return parse_time_series(read_text(path), path.string());
}

// ---------------------------------------------------------------- manifests

/// Record of one CLI invocation and the files it wrote.
struct RunManifest {
  std::string command;
  std::string config_digest;
  std::vector<std::uint64_t> seeds;
  std::string started;
  std::string finished;
  std::filesystem::path root;  // manifest directory; paths are stored relative to it
  std::vector<std::filesystem::path> outputs;
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline json to_json(const RunManifest& m) {
  json files = json::array();
  for (const auto& p : m.outputs) {
    files.push_back(json{{"path", p.lexically_relative(m.root).generic_string()}, {"digest", file_digest(p)}});
  }
  return json{{"command", m.command},     {"config_digest", m.config_digest},
              {"seeds", m.seeds},         {"code_version", kVersion},
              {"started", m.started},     {"finished", m.finished},
              {"outputs", files}};
}

/// Files whose digest differs from (or is missing in) a previous manifest.
inline std::vector<std::string> manifest_mismatches(const json& previous, const RunManifest& now) {
  std::vector<std::string> bad;
  if (!previous.contains("outputs")) {
    bad.emplace_back("<manifest has no outputs>");
    return bad;
  }
  std::map<std::string, std::string> old;
  for (const auto& f : previous.at("outputs")) {
    old[f.at("path").get<std::string>()] = f.at("digest").get<std::string>();
  }
  for (const auto& p : now.outputs) {
    const std::string rel = p.lexically_relative(now.root).generic_string();
    const auto it = old.find(rel);
    if (it == old.end() || it->second != file_digest(p)) bad.push_back(rel);
  }
  if (old.size() != now.outputs.size()) bad.emplace_back("<file list changed>");
  return bad;
}

}  // namespace gdc::io
