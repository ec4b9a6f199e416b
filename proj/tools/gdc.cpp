// gdc: analyze, design, sweep, simulate, evaluate and plot.
//
// Every command computes all of its outputs in memory before writing any
// file, so a failure never leaves partial output behind.
//
// Exit codes: 0 ok, 1 --check mismatch, 2 invalid input, 3 numerical
// failure, 4 infeasible design.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "gdc/gdc.hpp"

namespace fs = std::filesystem;
using gdc::io::json;

namespace {

fs::path fixture_dir() {
  if (const char* env = std::getenv("GDC_FIXTURES"); env && *env) return env;
  return GDC_FIXTURE_DIR;
}

/// Existing path as given, else the same relative path under the fixture dir.
fs::path resolve_input(const std::string& name) {
  const fs::path p(name);
  if (fs::exists(p)) return p;
  if (p.is_relative()) {
    const fs::path alt = fixture_dir() / p;
    if (fs::exists(alt)) return alt;
  }
  throw gdc::ValidationError("cannot open " + name);
}

/// Files to write, committed only once everything has been computed.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) {
    files_.emplace_back(dir_ / name, std::move(content));
  }

  std::vector<fs::path> commit() const {
    std::vector<fs::path> written;
    for (const auto& [path, content] : files_) {
      gdc::io::write_text(path, content);
      written.push_back(path);
    }
    return written;
  }

  const std::vector<std::pair<fs::path, std::string>>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::pair<fs::path, std::string>> files_;
};

std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

std::string fmt(std::complex<double> z) {
  if (z.imag() == 0.0) return fmt(z.real());
  return fmt(z.real()) + (z.imag() < 0 ? " - " : " + ") + fmt(std::abs(z.imag())) + "i";
}

std::string row_text(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "  " : "") + fmt(v(i), "%8.4f");
  return s;
}

// ------------------------------------------------------------------ analyze

struct AnalyzeArgs {
  std::string game;
  std::string controller;
  std::string out_dir;
};

struct Analysis {
  gdc::EquilibriumProfile eq;
  Eigen::MatrixXd jacobian;
  gdc::EigenSystem es;
  std::optional<gdc::OscillatoryMode> mode;
  std::optional<gdc::EigencycleSet> cycles;
  json report;
};

Analysis analyze(const gdc::PayoffMatrix& game, const std::optional<gdc::FeedbackRule>& rule) {
  Analysis a{gdc::solve_interior_equilibrium(game), {}, {}, {}, {}, {}};
  const Eigen::MatrixXd open = gdc::jacobian_at(game, a.eq.point);
  a.jacobian = open;
  if (rule) a.jacobian = gdc::controlled_jacobian(open, rule->channel, rule->gain, a.eq.point);
  a.es = gdc::eigen_decompose(a.jacobian);

  json& r = a.report;
  r["game"] = gdc::io::to_json(game);
  r["equilibrium"] = gdc::io::to_json(a.eq.point.vector());
  r["value"] = a.eq.value;
  r["jacobian"] = gdc::io::to_json(a.jacobian);
  r["eigensystem"] = gdc::io::to_json(a.es);
  if (rule) {
    r["controller"] = json{{"channel", rule->channel.index() + 1},
                           {"K", gdc::io::to_json(rule->gain)},
                           {"equilibrium_drift", rule->gain.dot(a.eq.point.vector())}};
  }
  try {
    a.mode = gdc::select_oscillatory_pair(a.es);
    a.cycles = gdc::eigencycles(a.mode->eta, true);
    r["oscillatory"] = json{{"eigenvalue", gdc::io::to_json(a.mode->eigenvalue)},
                            {"eta", gdc::io::to_json(a.mode->eta)},
                            {"pair_count", a.mode->pair_count}};
    r["eigencycles"] = gdc::io::to_json(*a.cycles);
  } catch (const gdc::ValidationError&) {
    r["oscillatory"] = nullptr;
    r["eigencycles"] = nullptr;
  }
  json ctrl = json::array();
  const int n = game.n();
  for (int m = 0; m < n; ++m) {
    const gdc::ChannelVector ch(m, n);
    const auto bare = gdc::controllability_matrix(a.jacobian, ch.vector());
    const auto eff =
        gdc::controllability_matrix(a.jacobian, ch.vector() - a.eq.point.vector());
    ctrl.push_back(json{{"channel", m + 1}, {"rank_bare", bare.rank}, {"rank_effective", eff.rank}});
  }
  r["controllability"] = ctrl;
  return a;
}

void print_analysis(const Analysis& a) {
  std::cout << "equilibrium  " << row_text(a.eq.point.vector()) << "\n";
  std::cout << "value        " << fmt(a.eq.value) << "\n";
  std::cout << "jacobian\n";
  for (Eigen::Index i = 0; i < a.jacobian.rows(); ++i) {
    std::cout << "  " << row_text(a.jacobian.row(i).transpose()) << "\n";
  }
  std::cout << "eigenvalues\n";
  for (int k = 0; k < a.es.n(); ++k) std::cout << "  " << fmt(a.es.values(k)) << "\n";
  if (!a.mode) {
    std::cout << "no oscillatory mode\n";
    return;
  }
  std::cout << "oscillatory  " << fmt(a.mode->eigenvalue) << "\n";
  std::cout << "  component  modulus  phase/pi\n";
  for (Eigen::Index i = 0; i < a.mode->eta.size(); ++i) {
    std::printf("  %9lld  %7.4f  %8.4f\n", static_cast<long long>(i + 1),
                std::abs(a.mode->eta(i)), std::arg(a.mode->eta(i)) / std::numbers::pi);
  }
  std::cout << "eigencycles\n";
  for (std::size_t p = 0; p < a.cycles->pairs.size(); ++p) {
    std::cout << "  " << gdc::pair_label(a.cycles->pairs[p]) << "  "
              << fmt(a.cycles->values(static_cast<Eigen::Index>(p)), "%7.4f") << "\n";
  }
}

int cmd_analyze(const AnalyzeArgs& args) {
  const gdc::PayoffMatrix game = gdc::io::load_payoff_matrix(resolve_input(args.game));
  std::optional<gdc::FeedbackRule> rule;
  if (!args.controller.empty()) {
    rule = gdc::io::load_feedback_rule(resolve_input(args.controller), game.n());
  }
  const Analysis a = analyze(game, rule);
  if (!args.out_dir.empty()) {
    Outputs out(args.out_dir);
    out.add("analysis.json", gdc::io::dump(a.report));
    if (a.cycles) out.add("eigencycles.csv", gdc::io::eigencycles_csv(*a.cycles));
    out.commit();
  }
  print_analysis(a);
  return 0;
}

// ------------------------------------------------------------------ design

struct DesignArgs {
  std::string game;
  int channel = 0;
  std::optional<double> shift;
  std::vector<double> gain;
  std::string out_dir;
};

int cmd_design(const DesignArgs& args) {
  const gdc::PayoffMatrix game = gdc::io::load_payoff_matrix(resolve_input(args.game));
  const int n = game.n();
  const gdc::ChannelVector channel(args.channel - 1, n);
  const auto eq = gdc::solve_interior_equilibrium(game);
  const Eigen::MatrixXd jac = gdc::jacobian_at(game, eq.point);
  const gdc::EigenSystem es = gdc::eigen_decompose(jac);

  gdc::ControllerSpec spec = [&] {
    if (!args.gain.empty()) {
      if (static_cast<int>(args.gain.size()) != n) {
        throw gdc::ValidationError("--K needs " + std::to_string(n) + " entries");
      }
      const Eigen::VectorXd k = Eigen::Map<const Eigen::VectorXd>(args.gain.data(), n);
      if (!k.allFinite()) throw gdc::ValidationError("--K entries must be finite");
      return gdc::apply_gain(jac, es, channel, k, eq.point);
    }
    if (!args.shift) throw gdc::ValidationError("design needs --shift or --K");
    return gdc::solve_gain(jac, es, channel, *args.shift, eq.point);
  }();
  if (std::abs(spec.equilibrium_drift) > 1e-6) {
    std::cerr << "gdc: warning: K.x* = " << fmt(spec.equilibrium_drift, "%.6g")
              << "; this gain moves the equilibrium\n";
  }

  const gdc::EigenSystem closed = gdc::eigen_decompose(spec.controlled);
  json doc = gdc::io::to_json(spec);
  doc["eigensystem"] = gdc::io::to_json(closed);
  std::optional<gdc::EigencycleSet> cycles;
  try {
    const auto mode = gdc::select_oscillatory_pair(closed);
    cycles = gdc::eigencycles(mode.eta, true);
    doc["oscillatory"] = json{{"eigenvalue", gdc::io::to_json(mode.eigenvalue)},
                              {"eta", gdc::io::to_json(mode.eta)},
                              {"pair_count", mode.pair_count}};
    doc["eigencycles"] = gdc::io::to_json(*cycles);
  } catch (const gdc::ValidationError&) {
    doc["oscillatory"] = nullptr;
    doc["eigencycles"] = nullptr;
  }

  if (!args.out_dir.empty()) {
    Outputs out(args.out_dir);
    out.add("controller.json", gdc::io::dump(doc));
    if (cycles) out.add("eigencycles.csv", gdc::io::eigencycles_csv(*cycles));
    out.commit();
  }
  std::cout << "channel  " << channel.index() + 1 << "\n";
  std::cout << "b        " << fmt(spec.shift) << "\n";
  std::cout << "K        " << row_text(spec.gain) << "\n";
  std::cout << "K.x*     " << fmt(spec.equilibrium_drift, "%.3g") << "\n";
  std::cout << "spectrum\n";
  for (int k = 0; k < closed.n(); ++k) std::cout << "  " << fmt(closed.values(k)) << "\n";
  if (cycles) {
    std::cout << "eigencycles\n";
    for (std::size_t p = 0; p < cycles->pairs.size(); ++p) {
      std::cout << "  " << gdc::pair_label(cycles->pairs[p]) << "  "
                << fmt(cycles->values(static_cast<Eigen::Index>(p)), "%7.4f") << "\n";
    }
  }
  return 0;
}

// ------------------------------------------------------------------ sweep

struct SweepArgs {
  std::string game;
  std::vector<double> shifts;
  std::vector<int> channels;
  std::string out_dir;
};

std::string candidate_label(const gdc::SweepCandidate& c) {
  return "b=" + gdc::io::format_number(c.shift) + ";e" + std::to_string(c.channel + 1);
}

int cmd_sweep(const SweepArgs& args) {
  const gdc::PayoffMatrix game = gdc::io::load_payoff_matrix(resolve_input(args.game));
  const int n = game.n();
  const auto eq = gdc::solve_interior_equilibrium(game);
  const Eigen::MatrixXd jac = gdc::jacobian_at(game, eq.point);
  const gdc::EigenSystem es = gdc::eigen_decompose(jac);

  gdc::SweepGrid grid = gdc::SweepGrid::Default(n);
  if (!args.shifts.empty()) grid.shifts = args.shifts;
  if (!args.channels.empty()) {
    grid.channels.clear();
    for (int m : args.channels) grid.channels.push_back(m - 1);
  }
  const gdc::SweepResult sr = gdc::run_sweep(jac, es, eq.point, grid);

  const auto pairs = gdc::subspace_pairs(n);
  std::string cand = "b,channel,feasible";
  for (int i = 0; i < n; ++i) cand += ",k" + std::to_string(i + 1);
  for (const auto& p : pairs) cand += "," + gdc::pair_label(p);
  cand += "\n";
  for (const auto& c : sr.candidates) {
    cand += gdc::io::format_number(c.shift) + "," + std::to_string(c.channel + 1) + "," +
            (c.feasible ? "1" : "0");
    for (int i = 0; i < n; ++i) cand += "," + (c.feasible ? gdc::io::format_number(c.gain(i)) : "");
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      cand += "," + (c.feasible ? gdc::io::format_number(c.cycles.values(static_cast<Eigen::Index>(p)))
                                : std::string());
    }
    cand += "\n";
  }

  std::string corr = "candidate";
  for (const auto& c : sr.candidates) corr += "," + candidate_label(c);
  corr += "\n";
  for (std::size_t i = 0; i < sr.candidates.size(); ++i) {
    corr += candidate_label(sr.candidates[i]);
    for (std::size_t j = 0; j < sr.candidates.size(); ++j) {
      const double r = sr.corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      corr += "," + (std::isnan(r) ? std::string("nan") : gdc::io::format_number(r));
    }
    corr += "\n";
  }

  json summary{{"candidates", static_cast<int>(sr.candidates.size())}};
  int feasible = 0;
  for (const auto& c : sr.candidates) feasible += c.feasible ? 1 : 0;
  summary["feasible"] = feasible;
  if (sr.selected) {
    const auto& a = sr.candidates[sr.selected->first];
    const auto& b = sr.candidates[sr.selected->second];
    summary["selected"] = json{
        {"first", json{{"b", a.shift}, {"channel", a.channel + 1}, {"K", gdc::io::to_json(a.gain)}}},
        {"second", json{{"b", b.shift}, {"channel", b.channel + 1}, {"K", gdc::io::to_json(b.gain)}}},
        {"corr", sr.selected->corr}};
  } else {
    summary["selected"] = nullptr;
  }

  if (!args.out_dir.empty()) {
    Outputs out(args.out_dir);
    out.add("candidates.csv", cand);
    out.add("corr.csv", corr);
    out.add("sweep.json", gdc::io::dump(summary));
    out.commit();
  }
  std::cout << "candidates " << sr.candidates.size() << ", feasible " << feasible << "\n";
  for (const auto& c : sr.candidates) {
    if (!c.feasible) std::cout << "  infeasible " << candidate_label(c) << ": " << c.failure << "\n";
  }
  if (sr.selected) {
    std::cout << "selected   " << candidate_label(sr.candidates[sr.selected->first]) << " vs "
              << candidate_label(sr.candidates[sr.selected->second])
              << "  corr " << fmt(sr.selected->corr) << "\n";
  }
  return 0;
}

// ------------------------------------------------------------------ simulate

struct SimulateArgs {
  std::string game;
  std::string controller;
  long long agents = 3000;
  long long rounds = 20000;
  double revision_prob = 0.01;
  std::uint64_t seed = 1;
  int sessions = 1;
  std::uint64_t seed_stride = 1;
  std::vector<long long> init;
  std::string out_dir;
  bool check = false;
};

std::string session_name(int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "session_%03d.csv", k + 1);
  return buf;
}

int cmd_simulate(const SimulateArgs& args) {
  const fs::path game_path = resolve_input(args.game);
  gdc::SimConfig cfg(gdc::io::load_payoff_matrix(game_path));
  cfg.agents = args.agents;
  cfg.rounds = args.rounds;
  cfg.revision_prob = args.revision_prob;
  cfg.seed = args.seed;
  cfg.init = args.init;
  if (!args.controller.empty()) {
    cfg.controller = gdc::io::load_feedback_rule(resolve_input(args.controller), cfg.game.n());
  }
  gdc::validate(cfg);
  if (args.sessions < 1) throw gdc::ValidationError("--sessions must be at least 1");

  const std::string started = gdc::io::utc_timestamp();
  const std::vector<gdc::TimeSeries> runs = gdc::run_batch(cfg, args.sessions, args.seed_stride);

  Outputs out(args.out_dir);
  std::vector<std::uint64_t> seeds;
  json sessions = json::array();
  for (int k = 0; k < args.sessions; ++k) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(k) * args.seed_stride;
    seeds.push_back(seed);
    out.add(session_name(k), gdc::io::time_series_csv(runs[static_cast<std::size_t>(k)]));
    sessions.push_back(json{{"file", session_name(k)}, {"seed", seed}});
  }
  json meta = gdc::io::simulation_metadata(cfg);
  meta["sessions"] = sessions;
  meta["seed_stride"] = args.seed_stride;
  const std::string meta_text = gdc::io::dump(meta);
  out.add("metadata.json", meta_text);

  if (args.check) {
    const fs::path manifest_path = fs::path(args.out_dir) / "manifest.json";
    const json previous = gdc::io::load_json(manifest_path);
    std::map<std::string, std::string> old;
    for (const auto& f : previous.value("outputs", json::array())) {
      old[f.at("path").get<std::string>()] = f.at("digest").get<std::string>();
    }
    int bad = old.size() == out.files().size() ? 0 : 1;
    for (const auto& [path, content] : out.files()) {
      const std::string rel = path.lexically_relative(out.dir()).generic_string();
      const auto it = old.find(rel);
      const std::string fresh = gdc::io::digest(content);
      const bool on_disk = fs::exists(path) && gdc::io::file_digest(path) == fresh;
      if (it == old.end() || it->second != fresh || !on_disk) {
        std::cout << "MISMATCH " << rel << "\n";
        ++bad;
      }
    }
    if (bad) return 1;
    std::cout << "check ok: " << out.files().size() << " files match " << manifest_path.string() << "\n";
    return 0;
  }

  gdc::io::RunManifest manifest;
  manifest.command = "simulate";
  manifest.config_digest = gdc::io::digest(meta_text);
  manifest.seeds = seeds;
  manifest.started = started;
  manifest.root = args.out_dir;
  manifest.outputs = out.commit();
  manifest.finished = gdc::io::utc_timestamp();
  gdc::io::write_text(fs::path(args.out_dir) / "manifest.json",
                      gdc::io::dump(gdc::io::to_json(manifest)));

  for (int k = 0; k < args.sessions; ++k) {
    const auto& ts = runs[static_cast<std::size_t>(k)];
    std::cout << session_name(k) << "  seed " << seeds[static_cast<std::size_t>(k)]
              << "  mean " << row_text(gdc::mean_distribution(ts)) << "\n";
  }
  if (args.sessions > 1) {
    std::cout << "pooled mean " << row_text(gdc::pooled_mean_distribution(runs)) << "\n";
  }
  return 0;
}

// ------------------------------------------------------------------ evaluate

/// One named input column: pair values, and a distribution when the source
/// is a series.
struct Column {
  std::string name;
  std::optional<Eigen::VectorXd> pairs;
  std::optional<Eigen::VectorXd> distribution;
};

std::pair<std::string, std::string> split_spec(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw gdc::ValidationError("expected NAME=PATH[:COLUMN], got \"" + spec + "\"");
  }
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

std::vector<fs::path> session_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("session_", 0) == 0 && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw gdc::ValidationError(dir.string() + ": no session_*.csv files");
  return files;
}

Column load_column(const std::string& spec) {
  auto [name, rest] = split_spec(spec);
  std::string column;
  const auto colon = rest.rfind(':');
  if (colon != std::string::npos && rest.find('/', colon) == std::string::npos) {
    column = rest.substr(colon + 1);
    rest = rest.substr(0, colon);
  }
  const fs::path path = resolve_input(rest);
  Column col{name, {}, {}};

  if (fs::is_directory(path)) {
    std::vector<gdc::TimeSeries> runs;
    for (const auto& f : session_files(path)) runs.push_back(gdc::io::load_time_series(f));
    col.pairs = gdc::pooled_angular_momentum(runs).values;
    col.distribution = gdc::pooled_mean_distribution(runs);
    return col;
  }
  const gdc::io::CsvTable table = gdc::io::load_csv(path);
  if (table.header.empty()) throw gdc::ValidationError(path.string() + ": empty CSV");
  const std::string& key = table.header[0];
  if (key == "round") {
    const gdc::TimeSeries ts = gdc::io::load_time_series(path);
    col.pairs = gdc::angular_momentum(ts).values;
    col.distribution = gdc::mean_distribution(ts);
  } else if (key == "pair") {
    col.pairs = table.numeric_column(column.empty() ? table.header.at(1) : column, path.string());
  } else if (key == "strategy") {
    col.distribution =
        table.numeric_column(column.empty() ? table.header.at(1) : column, path.string());
  } else {
    throw gdc::ValidationError(path.string() + ": first column must be round, pair or strategy");
  }
  return col;
}

struct EvaluateArgs {
  std::vector<std::string> columns;
  std::string out;
};

std::string padded(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : std::string(width - s.size(), ' ') + s;
}

int cmd_evaluate(const EvaluateArgs& args) {
  std::vector<Column> cols;
  for (const auto& spec : args.columns) cols.push_back(load_column(spec));

  std::vector<const Column*> pair_cols;
  std::vector<const Column*> dist_cols;
  for (const auto& c : cols) {
    if (c.pairs) pair_cols.push_back(&c);
    if (c.distribution) dist_cols.push_back(&c);
  }
  const auto check_sizes = [](const std::vector<const Column*>& list, bool pairs) {
    for (const Column* c : list) {
      const auto size = pairs ? c->pairs->size() : c->distribution->size();
      const auto want = pairs ? list.front()->pairs->size() : list.front()->distribution->size();
      if (size != want) throw gdc::ValidationError("column " + c->name + " has a different length");
    }
  };
  check_sizes(pair_cols, true);
  check_sizes(dist_cols, false);

  json report = json::object();
  std::string text;
  std::size_t width = 10;
  for (const auto& c : cols) width = std::max(width, c.name.size() + 2);

  if (!dist_cols.empty()) {
    const auto n = dist_cols.front()->distribution->size();
    json dist = json::object();
    text += "distribution\n" + padded("", width);
    for (const Column* c : dist_cols) {
      text += padded(c->name, width);
      dist[c->name] = gdc::io::to_json(*c->distribution);
    }
    text += "\n";
    for (Eigen::Index i = 0; i < n; ++i) {
      text += padded("x" + std::to_string(i + 1), width);
      for (const Column* c : dist_cols) text += padded(fmt((*c->distribution)(i), "%.3f"), width);
      text += "\n";
    }
    report["distribution"] = dist;
  }

  if (!pair_cols.empty()) {
    const auto count = pair_cols.front()->pairs->size();
    int n = 2;
    while (n * (n - 1) / 2 < count) ++n;
    if (n * (n - 1) / 2 != count) throw gdc::ValidationError("pair columns need n(n-1)/2 rows");
    const auto labels = gdc::subspace_pairs(n);

    json values = json::object();
    text += (text.empty() ? "" : "\n") + std::string("pair values\n") + padded("", width);
    for (const Column* c : pair_cols) {
      text += padded(c->name, width);
      values[c->name] = gdc::io::to_json(*c->pairs);
    }
    text += "\n";
    for (Eigen::Index p = 0; p < count; ++p) {
      text += padded(gdc::pair_label(labels[static_cast<std::size_t>(p)]), width);
      for (const Column* c : pair_cols) text += padded(fmt((*c->pairs)(p), "%.3f"), width);
      text += "\n";
    }
    json pair_names = json::array();
    for (const auto& l : labels) pair_names.push_back(gdc::pair_label(l));
    report["pairs"] = pair_names;
    report["values"] = values;

    if (pair_cols.size() >= 2) {
      const auto k = static_cast<Eigen::Index>(pair_cols.size());
      Eigen::MatrixXd r = Eigen::MatrixXd::Identity(k, k);
      Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, k);
      for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
          const auto rep = gdc::regression_significance(*pair_cols[static_cast<std::size_t>(j)]->pairs,
                                                        *pair_cols[static_cast<std::size_t>(i)]->pairs);
          r(i, j) = r(j, i) = rep.r;
          p(i, j) = p(j, i) = rep.p_two_sided;
        }
      }
      json names = json::array();
      for (const Column* c : pair_cols) names.push_back(c->name);
      report["columns"] = names;
      report["n_obs"] = count;
      report["corr"] = gdc::io::to_json(r);
      report["p_value"] = gdc::io::to_json(p);
      for (const auto& [title, m, spec] :
           {std::tuple{"correlation", &r, "%.3f"}, std::tuple{"p-value", &p, "%.4f"}}) {
        text += std::string("\n") + title + " (obs=" + std::to_string(count) + ")\n" + padded("", width);
        for (const Column* c : pair_cols) text += padded(c->name, width);
        text += "\n";
        for (Eigen::Index i = 0; i < k; ++i) {
          text += padded(pair_cols[static_cast<std::size_t>(i)]->name, width);
          for (Eigen::Index j = 0; j <= i; ++j) text += padded(fmt((*m)(i, j), spec), width);
          text += "\n";
        }
      }
    }
  }
  if (report.empty()) throw gdc::ValidationError("evaluate needs at least one column");

  if (!args.out.empty()) gdc::io::write_text(args.out, gdc::io::dump(report));
  std::cout << text;
  return 0;
}

// ------------------------------------------------------------------ plot

struct PlotEigenArgs {
  std::vector<std::string> inputs;
  std::string out;
};

gdc::svg::EigenPanel panel_from(const std::string& spec) {
  std::string title;
  std::string file = spec;
  if (const auto eq = spec.find('='); eq != std::string::npos) {
    title = spec.substr(0, eq);
    file = spec.substr(eq + 1);
  }
  const fs::path path = resolve_input(file);
  const json doc = gdc::io::load_json(path);
  const std::string src = path.string();
  if (title.empty()) title = path.stem().string();
  if (!doc.contains("eigensystem") || !doc.contains("oscillatory") || doc.at("oscillatory").is_null()) {
    throw gdc::ValidationError(src + ": needs \"eigensystem\" and \"oscillatory\" fields");
  }
  return {title,
          gdc::io::complex_vector_from_json(doc.at("eigensystem").at("eigenvalues"), src + ": eigenvalues"),
          gdc::io::complex_vector_from_json(doc.at("oscillatory").at("eta"), src + ": eta")};
}

int cmd_plot_eigen(const PlotEigenArgs& args) {
  std::vector<gdc::svg::EigenPanel> panels;
  for (const auto& s : args.inputs) panels.push_back(panel_from(s));
  const std::string svg = gdc::svg::eigen_figure(panels);
  gdc::io::write_text(args.out, svg);
  std::cout << "wrote " << args.out << "\n";
  return 0;
}

struct PlotCyclesArgs {
  std::vector<std::string> columns;
  std::string title = "eigencycles";
  std::string out;
};

int cmd_plot_cycles(const PlotCyclesArgs& args) {
  std::vector<gdc::svg::BarSeries> series;
  for (const auto& spec : args.columns) {
    Column c = load_column(spec);
    if (!c.pairs) throw gdc::ValidationError(c.name + ": no pair values");
    Eigen::VectorXd v = *c.pairs;
    // Measured L is orders of magnitude smaller than sigma; compare shapes.
    const double norm = v.norm();
    if (norm > 0.0) v /= norm;
    series.push_back({c.name, v});
  }
  if (series.empty()) throw gdc::ValidationError("plot cycles needs at least one column");
  const auto size = series.front().values.size();
  int n = 2;
  while (n * (n - 1) / 2 < size) ++n;
  std::vector<std::string> labels;
  for (const auto& p : gdc::subspace_pairs(n)) labels.push_back(gdc::pair_label(p));
  if (static_cast<Eigen::Index>(labels.size()) != size) {
    throw gdc::ValidationError("pair columns need n(n-1)/2 rows");
  }
  const std::string svg = gdc::svg::bar_chart(args.title, labels, series);
  gdc::io::write_text(args.out, svg);
  std::cout << "wrote " << args.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Game dynamics control: analysis, controller design and agent-based simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gdc::kVersion));

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "Equilibrium, Jacobian, spectrum and eigencycles of a game");
  analyze_cmd->add_option("game", analyze_args.game, "Game JSON")->required();
  analyze_cmd->add_option("--controller", analyze_args.controller, "Controller JSON (channel, K)");
  analyze_cmd->add_option("--out-dir", analyze_args.out_dir, "Write analysis.json and eigencycles.csv here");

  DesignArgs design_args;
  auto* design_cmd = app.add_subcommand("design", "Solve or apply a feedback gain on one channel");
  design_cmd->add_option("game", design_args.game, "Game JSON")->required();
  design_cmd->add_option("--channel", design_args.channel, "Rewarded strategy (1-based)")->required();
  auto* shift_opt = design_cmd->add_option("--shift,-b", design_args.shift, "Real-part shift of the oscillatory pair");
  auto* gain_opt = design_cmd->add_option("--K", design_args.gain, "Explicit gain, comma separated")
                       ->delimiter(',')
                       ->allow_extra_args(false);
  shift_opt->excludes(gain_opt);
  design_cmd->add_option("--out-dir", design_args.out_dir, "Write controller.json and eigencycles.csv here");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Design every (shift, channel) candidate and correlate their eigencycles");
  sweep_cmd->add_option("game", sweep_args.game, "Game JSON")->required();
  sweep_cmd->add_option("--shifts", sweep_args.shifts, "Shift grid, comma separated")->delimiter(',');
  sweep_cmd->add_option("--channels", sweep_args.channels, "Channels (1-based), comma separated")->delimiter(',');
  sweep_cmd->add_option("--out-dir", sweep_args.out_dir, "Write candidates.csv, corr.csv and sweep.json here");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Run agent-based sessions");
  sim_cmd->add_option("game", sim_args.game, "Game JSON")->required();
  sim_cmd->add_option("--controller", sim_args.controller, "Controller JSON (channel, K)");
  sim_cmd->add_option("--agents", sim_args.agents, "Population size")->capture_default_str();
  sim_cmd->add_option("--rounds", sim_args.rounds, "Rounds per session")->capture_default_str();
  sim_cmd->add_option("--rev-prob", sim_args.revision_prob, "Per-round revision probability")->capture_default_str();
  sim_cmd->add_option("--seed", sim_args.seed, "Seed of the first session")->capture_default_str();
  sim_cmd->add_option("--sessions", sim_args.sessions, "Number of sessions")->capture_default_str();
  sim_cmd->add_option("--seed-stride", sim_args.seed_stride, "Seed step between sessions")->capture_default_str();
  sim_cmd->add_option("--init", sim_args.init, "Initial counts, comma separated (default: rounded equilibrium)")
      ->delimiter(',');
  sim_cmd->add_option("--out-dir", sim_args.out_dir, "Output directory")->required();
  sim_cmd->add_flag("--check", sim_args.check, "Rerun and compare digests with the existing manifest");

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Distributions, correlations and regression p-values");
  eval_cmd->add_option("columns", eval_args.columns,
                       "NAME=PATH[:COLUMN]; PATH is a pair CSV, strategy CSV, series CSV or session directory")
      ->required();
  eval_cmd->add_option("--out", eval_args.out, "Write the report as JSON");

  auto* plot_cmd = app.add_subcommand("plot", "Static SVG figures");
  plot_cmd->require_subcommand(1);
  PlotEigenArgs eigen_args;
  auto* plot_eigen = plot_cmd->add_subcommand("eigen", "Eigenvalue and eigenvector panels, one column per analysis");
  plot_eigen->add_option("inputs", eigen_args.inputs, "[TITLE=]analysis.json or controller.json")->required();
  plot_eigen->add_option("--out", eigen_args.out, "SVG path")->required();
  PlotCyclesArgs cycles_args;
  auto* plot_cycles = plot_cmd->add_subcommand("cycles", "Bar chart of eigencycles against measurements");
  plot_cycles->add_option("columns", cycles_args.columns, "NAME=PATH[:COLUMN]")->required();
  plot_cycles->add_option("--title", cycles_args.title, "Chart title");
  plot_cycles->add_option("--out", cycles_args.out, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(analyze_args);
    if (*design_cmd) return cmd_design(design_args);
    if (*sweep_cmd) return cmd_sweep(sweep_args);
    if (*sim_cmd) return cmd_simulate(sim_args);
    if (*eval_cmd) return cmd_evaluate(eval_args);
    if (*plot_eigen) return cmd_plot_eigen(eigen_args);
    if (*plot_cycles) return cmd_plot_cycles(cycles_args);
  } catch (const gdc::Error& e) {
    std::cerr << "gdc: error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    std::cerr << "gdc: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gdc: error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
