#include "mslab/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mslab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad real for '" + key + "': " + v);
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for '" + key + "': " + v);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad boolean for '" + key + "': " + v);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const std::string& item : split_list(v)) out.push_back(parse_real(key, item));
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const std::string& item : split_list(v)) out.push_back(static_cast<int>(parse_int(key, item)));
  return out;
}

std::string fmt_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt(v[i]);
  }
  return out;
}

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "experiment") c.experiment = value;
  else if (key == "scales") c.num_scales_s = static_cast<int>(parse_int(key, value));
  else if (key == "alpha_rule") c.alpha_rule = value;
  else if (key == "dim") c.dim_d = static_cast<int>(parse_int(key, value));
  else if (key == "p") c.order_p = static_cast<int>(parse_int(key, value));
  else if (key == "lambda") c.lambda = (value == "auto") ? 0.0 : parse_real(key, value);
  else if (key == "freq_max") c.freq_max = parse_real(key, value);
  else if (key == "dt") c.dt = parse_real(key, value);
  else if (key == "snapshot_times") c.snapshot_times = parse_real_list(key, value);
  else if (key == "initial") c.initial = value;
  else if (key == "width") c.width_total = static_cast<int>(parse_int(key, value));
  else if (key == "samples") c.num_samples = static_cast<int>(parse_int(key, value));
  else if (key == "lr") c.learning_rate = parse_real(key, value);
  else if (key == "epochs") c.epochs = static_cast<int>(parse_int(key, value));
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "snapshot_epochs")
    c.snapshot_epochs = (value == "auto") ? std::vector<int>{} : parse_int_list(key, value);
  else if (key == "target_a") c.target_a = parse_real(key, value);
  else if (key == "target_b") c.target_b = parse_real(key, value);
  else if (key == "target_beta") c.target_beta = parse_real(key, value);
  else if (key == "ntk_widths") c.ntk_widths = parse_int_list(key, value);
  else if (key == "ntk_train") c.ntk_train = parse_bool(key, value);
  else if (key == "drift_epochs") c.drift_epochs = parse_int_list(key, value);
  else if (key == "drift_small_width") c.drift_small_width = static_cast<int>(parse_int(key, value));
  else if (key == "ntk_angles") c.ntk_angles = static_cast<int>(parse_int(key, value));
  else if (key == "xi_max") c.xi_max = parse_real(key, value);
  else if (key == "xi_points") c.xi_points = static_cast<int>(parse_int(key, value));
  else if (key == "x_points") c.x_points = static_cast<int>(parse_int(key, value));
  else if (key == "out_dir") c.out_dir = value;
  else if (key == "profile") c.profile = value;
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

}  // namespace

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "simulate") {
    c.order_p = 100;
    c.initial = "indicator";
  } else if (experiment == "train_compare") {
    c.order_p = 300;
    c.initial = "network";
  } else if (experiment == "bias_compare") {
    c.order_p = 300;
    c.initial = "network";
  } else if (experiment == "ntk_study") {
    c.dim_d = 3;
    c.epochs = 5000;
  } else {
    throw std::invalid_argument("config: unknown experiment '" + experiment + "'");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  ExperimentConfig c = base;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " is not key=value");
    apply_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

void apply_profile(ExperimentConfig& config, const std::string& profile) {
  if (profile == "paper") {
    config.profile = "paper";
    return;
  }
  if (profile == "ci") {
    config.profile = "ci";
    config.width_total = 2000;
    config.epochs = 500;
    config.order_p = 80;
    return;
  }
  throw std::invalid_argument("config: unknown profile '" + profile + "'");
}

void validate(const ExperimentConfig& c) {
  static const std::set<std::string> kExperiments = {"simulate", "train_compare", "bias_compare",
                                                     "ntk_study"};
  if (!kExperiments.count(c.experiment))
    throw std::invalid_argument("config: unknown experiment '" + c.experiment + "'");
  if (c.alpha_rule != "pow2")
    throw std::invalid_argument("config: unknown alpha_rule '" + c.alpha_rule + "'");
  if (c.num_scales_s < 0) throw std::invalid_argument("config: scales must be >= 0");
  if (c.dim_d < 1) throw std::invalid_argument("config: dim must be >= 1");
  if (c.order_p < 1) throw std::invalid_argument("config: p must be >= 1");
  if (c.lambda < 0.0) throw std::invalid_argument("config: lambda must be positive or auto");
  if (c.lambda == 0.0 && !(c.freq_max > 0.0))
    throw std::invalid_argument("config: freq_max must be positive for auto lambda");
  if (!(c.dt > 0.0)) throw std::invalid_argument("config: dt must be positive");
  for (double t : c.snapshot_times)
    if (!(t >= 0.0)) throw std::invalid_argument("config: snapshot times must be >= 0");
  if (!std::is_sorted(c.snapshot_times.begin(), c.snapshot_times.end()))
    throw std::invalid_argument("config: snapshot times must be sorted");
  if (c.initial != "indicator" && c.initial != "network" && c.initial != "zero")
    throw std::invalid_argument("config: unknown initial '" + c.initial + "'");
  if (c.width_total < c.num_scales_s + 1)
    throw std::invalid_argument("config: width must cover every scale");
  if (c.width_total % (c.num_scales_s + 1) != 0)
    throw std::invalid_argument("config: width must be divisible by scales+1");
  if (c.num_samples < 2) throw std::invalid_argument("config: samples must be >= 2");
  if (!(c.learning_rate > 0.0)) throw std::invalid_argument("config: lr must be positive");
  if (c.epochs < 0) throw std::invalid_argument("config: epochs must be >= 0");
  if (!std::is_sorted(c.snapshot_epochs.begin(), c.snapshot_epochs.end()))
    throw std::invalid_argument("config: snapshot epochs must be sorted");
  for (int e : c.snapshot_epochs)
    if (e < 0) throw std::invalid_argument("config: snapshot epochs must be >= 0");
  if (!(c.target_beta > 0.0)) throw std::invalid_argument("config: target_beta must be positive");
  if (c.ntk_widths.empty()) throw std::invalid_argument("config: ntk_widths must be non-empty");
  for (int w : c.ntk_widths)
    if (w < c.num_scales_s + 1 || w % (c.num_scales_s + 1) != 0)
      throw std::invalid_argument("config: ntk widths must be positive multiples of scales+1");
  if (c.drift_small_width < c.num_scales_s + 1 ||
      c.drift_small_width % (c.num_scales_s + 1) != 0)
    throw std::invalid_argument("config: drift_small_width must be a positive multiple of scales+1");
  if (c.ntk_angles < 2) throw std::invalid_argument("config: ntk_angles must be >= 2");
  if (!(c.xi_max > 0.0)) throw std::invalid_argument("config: xi_max must be positive");
  if (c.xi_points < 2) throw std::invalid_argument("config: xi_points must be >= 2");
  if (c.x_points < 2) throw std::invalid_argument("config: x_points must be >= 2");
  if (c.out_dir.empty()) throw std::invalid_argument("config: out_dir must be set");
  if (c.profile != "paper" && c.profile != "ci")
    throw std::invalid_argument("config: unknown profile '" + c.profile + "'");
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  auto kv = [&out](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  kv("experiment", c.experiment);
  kv("scales", std::to_string(c.num_scales_s));
  kv("alpha_rule", c.alpha_rule);
  kv("dim", std::to_string(c.dim_d));
  kv("p", std::to_string(c.order_p));
  kv("lambda", c.lambda == 0.0 ? "auto" : fmt_real(c.lambda));
  kv("freq_max", fmt_real(c.freq_max));
  kv("dt", fmt_real(c.dt));
  kv("snapshot_times", join(c.snapshot_times, fmt_real));
  kv("initial", c.initial);
  kv("width", std::to_string(c.width_total));
  kv("samples", std::to_string(c.num_samples));
  kv("lr", fmt_real(c.learning_rate));
  kv("epochs", std::to_string(c.epochs));
  kv("seed", std::to_string(c.seed));
  kv("snapshot_epochs",
     c.snapshot_epochs.empty() ? "auto"
                               : join(c.snapshot_epochs, [](int e) { return std::to_string(e); }));
  kv("target_a", fmt_real(c.target_a));
  kv("target_b", fmt_real(c.target_b));
  kv("target_beta", fmt_real(c.target_beta));
  kv("ntk_widths", join(c.ntk_widths, [](int w) { return std::to_string(w); }));
  kv("ntk_train", c.ntk_train ? "true" : "false");
  kv("drift_epochs", join(c.drift_epochs, [](int e) { return std::to_string(e); }));
  kv("drift_small_width", std::to_string(c.drift_small_width));
  kv("ntk_angles", std::to_string(c.ntk_angles));
  kv("xi_max", fmt_real(c.xi_max));
  kv("xi_points", std::to_string(c.xi_points));
  kv("x_points", std::to_string(c.x_points));
  kv("out_dir", c.out_dir);
  kv("profile", c.profile);
  return out;
}

std::vector<int> effective_snapshot_epochs(const ExperimentConfig& config) {
  std::vector<int> epochs = config.snapshot_epochs;
  if (epochs.empty()) {
    const int e = config.epochs;
    epochs = {0, e / 100, e / 10, e / 2, e};
  }
  epochs.push_back(0);
  std::sort(epochs.begin(), epochs.end());
  epochs.erase(std::unique(epochs.begin(), epochs.end()), epochs.end());
  while (!epochs.empty() && epochs.back() > config.epochs) epochs.pop_back();
  return epochs;
}

}  // namespace mslab
