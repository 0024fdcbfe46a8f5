#include "mslab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mslab/net.hpp"
#include "mslab/ntk.hpp"
#include "mslab/spectral.hpp"
#include "mslab/svgplot.hpp"
#include "mslab/xform.hpp"

namespace mslab {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("linspace: need at least one point");
  std::vector<double> g(static_cast<std::size_t>(n));
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + h * i;
  return g;
}

std::string csv_header(const char* axis) {
  return std::string("t,") + axis +
         ",eta_real_model,eta_imag_model,eta_real_train,eta_imag_train\n";
}

// One snapshot of the stacked CSV; a null train profile leaves those columns
// empty rather than writing zeros.
void append_snapshot(std::string& csv, double t, const std::vector<double>& grid,
                     const FrequencyProfile& model, const FrequencyProfile* train) {
  const std::string ts = g12(t);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    csv += ts;
    csv += ',';
    csv += g12(grid[i]);
    csv += ',';
    csv += g12(model.real_part[k]);
    csv += ',';
    csv += g12(model.imag_part[k]);
    csv += ',';
    if (train) csv += g12(train->real_part[k]);
    csv += ',';
    if (train) csv += g12(train->imag_part[k]);
    csv += '\n';
  }
}

void append_physical(std::string& csv, double t, const std::vector<double>& grid,
                     const std::vector<std::complex<double>>& model,
                     const Eigen::VectorXd* train) {
  const std::string ts = g12(t);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv += ts;
    csv += ',';
    csv += g12(grid[i]);
    csv += ',';
    csv += g12(model[i].real());
    csv += ',';
    csv += g12(model[i].imag());
    csv += ',';
    if (train) csv += g12((*train)[static_cast<Eigen::Index>(i)]);
    csv += ',';
    if (train) csv += g12(0.0);
    csv += '\n';
  }
}

template <class ValueSq>
double trapz_band(const std::vector<double>& grid, double lo, double hi, ValueSq value_sq) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double mid = std::abs(0.5 * (grid[i] + grid[i + 1]));
    if (mid < lo || !(mid < hi)) continue;
    total += 0.5 * (value_sq(i) + value_sq(i + 1)) * (grid[i + 1] - grid[i]);
  }
  return total;
}

double sq_at(const FrequencyProfile& p, std::size_t i) {
  const auto k = static_cast<Eigen::Index>(i);
  return p.real_part[k] * p.real_part[k] + p.imag_part[k] * p.imag_part[k];
}

// L^2 norm of the profile over |xi| <= cap.
double l2_over_band(const FrequencyProfile& p, double cap) {
  return std::sqrt(trapz_band(p.xi_grid, 0.0, cap, [&](std::size_t i) { return sq_at(p, i); }));
}

double l2_diff_over_band(const FrequencyProfile& a, const FrequencyProfile& b, double cap) {
  auto dsq = [&](std::size_t i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double dr = a.real_part[k] - b.real_part[k];
    const double di = a.imag_part[k] - b.imag_part[k];
    return dr * dr + di * di;
  };
  return std::sqrt(trapz_band(a.xi_grid, 0.0, cap, dsq));
}

// Boxcar-5 smoothed |eta_hat|; the window suppresses grid-level sign wiggles
// before pointwise ratios are taken.
std::vector<double> smoothed_magnitude(const FrequencyProfile& p) {
  const int n = static_cast<int>(p.xi_grid.size());
  std::vector<double> raw(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    raw[static_cast<std::size_t>(i)] = std::sqrt(sq_at(p, static_cast<std::size_t>(i)));
  for (int i = 0; i < n; ++i) {
    const int a = std::max(0, i - 2), b = std::min(n - 1, i + 2);
    double s = 0.0;
    for (int j = a; j <= b; ++j) s += raw[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s / (b - a + 1);
  }
  return out;
}

// Half-life band: widest symmetric |xi| reach, scanned outward from xi = 0,
// on which the smoothed magnitude has dropped to half its initial value.
double half_life_band(const FrequencyProfile& start, const FrequencyProfile& now) {
  const std::vector<double> s0 = smoothed_magnitude(start);
  const std::vector<double> st = smoothed_magnitude(now);
  const int n = static_cast<int>(start.xi_grid.size());
  int center = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(start.xi_grid[static_cast<std::size_t>(i)]) <
        std::abs(start.xi_grid[static_cast<std::size_t>(center)]))
      center = i;
  auto reach = [&](int dir) {
    double r = -1.0;
    for (int i = center; i >= 0 && i < n; i += dir) {
      const auto u = static_cast<std::size_t>(i);
      if (!(s0[u] > 0.0) || st[u] > 0.5 * s0[u]) break;
      r = std::abs(start.xi_grid[u]);
    }
    return r;
  };
  return std::max(0.0, std::min(reach(+1), reach(-1)));
}

struct Band {
  const char* key;
  const char* label;
  double lo, hi;
};

constexpr Band kBands[] = {{"band_0_2", "|xi| in [0,2)", 0.0, 2.0},
                           {"band_2_5", "|xi| in [2,5)", 2.0, 5.0},
                           {"band_3_5", "|xi| in [3,5)", 3.0, 5.0},
                           {"band_5_inf", "|xi| >= 5", 5.0, kInf}};

std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Writes config_echo.cfg and report.json; the manifest lists every other
// file the run produced, so report consumers can verify completeness.
void finalize_report(ExperimentReport& report) {
  const std::string echo = serialize_config(report.config);
  write_text(join(report.config.out_dir, "config_echo.cfg"), echo);
  report.files.push_back("config_echo.cfg");
  std::sort(report.files.begin(), report.files.end());
  nlohmann::json doc;
  doc["experiment"] = report.config.experiment;
  doc["config_echo"] = echo;
  doc["metrics"] = report.metrics;
  doc["files"] = report.files;
  write_text(join(report.config.out_dir, "report.json"), doc.dump(2) + "\n");
}

std::vector<double> report_times(const ExperimentConfig& config) {
  std::vector<double> times{0.0};
  times.insert(times.end(), config.snapshot_times.begin(), config.snapshot_times.end());
  return times;
}

// Marches the preassembled stepper to step index round(t / dt) and returns
// profiles at t = 0 and each configured snapshot time.
std::vector<FrequencyProfile> march_snapshots(const BackwardEulerStepper& stepper,
                                              SpectralState& state, const HermiteBasis& basis,
                                              const std::vector<double>& times,
                                              const std::vector<double>& xi_grid,
                                              std::vector<double>* energies) {
  std::vector<FrequencyProfile> profiles;
  long steps_done = 0;
  for (double t : times) {
    const long target = std::lround(t / stepper.dt());
    for (; steps_done < target; ++steps_done) state = stepper.step(state);
    profiles.push_back(evaluate_spectral(state, basis, xi_grid));
    if (energies) energies->push_back(energy(state, basis));
  }
  return profiles;
}

}  // namespace

double band_energy(const FrequencyProfile& profile, double lo, double hi) {
  if (!(lo >= 0.0) || !(hi > lo)) throw std::invalid_argument("band_energy: need 0 <= lo < hi");
  return trapz_band(profile.xi_grid, lo, hi, [&](std::size_t i) { return sq_at(profile, i); });
}

double resolve_lambda(const ExperimentConfig& config) {
  if (config.lambda > 0.0) return config.lambda;
  return std::sqrt(2.0 * config.order_p + 1.0) / (2.0 * config.freq_max);
}

ExperimentReport run_simulate(const ExperimentConfig& config) {
  validate(config);
  if (config.dim_d != 1)
    throw std::invalid_argument("simulate: the spectral solver is one-dimensional");
  std::filesystem::create_directories(config.out_dir);

  const double lambda = resolve_lambda(config);
  const HermiteBasis basis(config.order_p, lambda);
  const ScaleSpec spec = ScaleSpec::dyadic(config.num_scales_s, 1);
  const SpectralOperator op = assemble_operator(basis, spec);
  const BackwardEulerStepper stepper(op, config.dt);

  std::function<std::complex<double>(double)> f0;
  if (config.initial == "indicator") {
    const double fm = config.freq_max;
    f0 = [fm](double xi) { return std::complex<double>(std::abs(xi) <= fm ? 1.0 : 0.0, 0.0); };
  } else if (config.initial == "zero") {
    f0 = [](double) { return std::complex<double>(0.0, 0.0); };
  } else {
    throw std::invalid_argument("simulate: initial must be indicator or zero");
  }

  bool tail_warning = false;
  SpectralState state = project_initial(basis, f0, &tail_warning);

  const std::vector<double> xi_grid = linspace(-config.xi_max, config.xi_max, config.xi_points);
  const std::vector<double> times = report_times(config);
  std::vector<double> energies;
  const std::vector<FrequencyProfile> profiles =
      march_snapshots(stepper, state, basis, times, xi_grid, &energies);

  std::string csv = csv_header("xi");
  for (std::size_t i = 0; i < times.size(); ++i)
    append_snapshot(csv, times[i], xi_grid, profiles[i], nullptr);
  write_text(join(config.out_dir, "freq_snapshots.csv"), csv);

  std::vector<double> totals;
  for (const FrequencyProfile& p : profiles) totals.push_back(band_energy(p, 0.0, kInf));

  nlohmann::json metrics;
  metrics["lambda"] = lambda;
  metrics["times"] = times;
  metrics["energy"] = energies;
  metrics["projection_tail_warning"] = tail_warning;
  std::vector<PlotSeries> ratio_series;
  for (const Band& b : kBands) {
    std::vector<double> e_band, ratio, fraction;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      e_band.push_back(band_energy(profiles[i], b.lo, b.hi));
      fraction.push_back(totals[i] > 0.0 ? e_band.back() / totals[i] : 0.0);
    }
    for (double e : e_band) ratio.push_back(e_band.front() > 0.0 ? e / e_band.front() : 0.0);
    metrics["band_energy"][b.key] = e_band;
    metrics["band_ratio_initial"][b.key] = ratio;
    metrics["band_fraction_total"][b.key] = fraction;
    ratio_series.push_back({b.label, times, ratio});
  }

  {
    PlotSpec ps;
    ps.title = "Frequency-domain error snapshots";
    ps.x_label = "xi";
    ps.y_label = "Re eta_hat";
    std::vector<PlotSeries> series;
    for (std::size_t i = 0; i < profiles.size(); ++i)
      series.push_back({"t = " + g12(times[i]), xi_grid, to_vec(profiles[i].real_part)});
    write_svg_plot(join(config.out_dir, "freq_evolution.svg"), ps, series);
  }
  {
    PlotSpec ps;
    ps.title = "Band energy relative to t = 0";
    ps.x_label = "t";
    ps.y_label = "E_band(t) / E_band(0)";
    ps.log_y = true;
    write_svg_plot(join(config.out_dir, "band_fractions.svg"), ps, ratio_series);
  }

  ExperimentReport report;
  report.config = config;
  report.metrics = std::move(metrics);
  report.files = {"freq_snapshots.csv", "freq_evolution.svg", "band_fractions.svg"};
  finalize_report(report);
  return report;
}

ExperimentReport run_train_compare(const ExperimentConfig& config) {
  validate(config);
  if (config.dim_d != 1)
    throw std::invalid_argument("train_compare: the spectral solver is one-dimensional");
  std::filesystem::create_directories(config.out_dir);

  const ScaleSpec spec = ScaleSpec::dyadic(config.num_scales_s, 1);
  const int q = config.width_total / spec.count();
  const NetworkParams init = init_params(spec, q, config.seed, true);
  const TargetSpec target{config.target_a, config.target_b, config.target_beta};

  const double a = config.target_a, b = config.target_b;
  const TargetFn f = [a, b](const Eigen::VectorXd& x) {
    return std::sin(a * kPi * x[0]) + std::cos(b * kPi * x[0]);
  };

  TrainConfig tc;
  tc.learning_rate_tau = config.learning_rate;
  tc.epochs = config.epochs;
  tc.num_samples = config.num_samples;
  tc.domain_beta = config.target_beta;
  tc.seed = config.seed;
  tc.snapshot_epochs = effective_snapshot_epochs(config);
  const TrainResult tr = train(init, f, tc);

  const double lambda = resolve_lambda(config);
  const HermiteBasis basis(config.order_p, lambda);
  const SpectralOperator op = assemble_operator(basis, spec);
  const BackwardEulerStepper stepper(op, config.dt);

  bool tail_warning = false;
  auto err0 = [&init, &target](double xi) {
    return network_hat(xi, init, target.beta) - target_hat(xi, target);
  };
  SpectralState state = project_initial(basis, err0, &tail_warning);

  const std::vector<double> xi_grid = linspace(-config.xi_max, config.xi_max, config.xi_points);
  const std::vector<double> x_grid =
      linspace(-config.target_beta, config.target_beta, config.x_points);
  Eigen::MatrixXd X(config.x_points, 1);
  Eigen::VectorXd target_phys(config.x_points);
  for (int i = 0; i < config.x_points; ++i) {
    X(i, 0) = x_grid[static_cast<std::size_t>(i)];
    target_phys[i] = std::sin(a * kPi * X(i, 0)) + std::cos(b * kPi * X(i, 0));
  }

  // The discrepancy metric lives on |xi| <= 10 (or the whole grid if it is
  // narrower) and is normalized by the epoch-0 network error norm.
  const double cap = std::min(10.0, config.xi_max);
  const FrequencyProfile train0 = error_hat(xi_grid, tr.snapshots.front().params, target);
  const double norm0 = l2_over_band(train0, cap);

  std::string fcsv = csv_header("xi");
  std::string pcsv = csv_header("x");
  std::vector<double> snap_epochs, snap_times, disc, model_norm, train_norm;
  std::vector<FrequencyProfile> models, trains;
  std::vector<std::vector<std::complex<double>>> model_phys;
  std::vector<Eigen::VectorXd> train_phys;
  std::vector<std::string> files = {"freq_snapshots.csv", "phys_snapshots.csv", "loss_curve.csv"};

  long steps_done = 0;
  for (const TrainRecord& rec : tr.snapshots) {
    for (; steps_done < rec.epoch; ++steps_done) state = stepper.step(state);
    const double t = rec.epoch * config.dt;
    FrequencyProfile model = evaluate_spectral(state, basis, xi_grid);
    FrequencyProfile trainp = error_hat(xi_grid, rec.params, target);
    append_snapshot(fcsv, t, xi_grid, model, &trainp);

    std::vector<std::complex<double>> mphys = hermite_to_physical(state, basis, x_grid);
    Eigen::VectorXd terr = forward_batch(rec.params, X) - target_phys;
    append_physical(pcsv, t, x_grid, mphys, &terr);

    disc.push_back(norm0 > 0.0 ? l2_diff_over_band(model, trainp, cap) / norm0 : 0.0);
    model_norm.push_back(l2_over_band(model, cap));
    train_norm.push_back(l2_over_band(trainp, cap));
    snap_epochs.push_back(rec.epoch);
    snap_times.push_back(t);

    const std::string pname = "net_epoch_" + std::to_string(rec.epoch) + ".bin";
    save_params(join(config.out_dir, pname), rec.params);
    files.push_back(pname);

    models.push_back(std::move(model));
    trains.push_back(std::move(trainp));
    model_phys.push_back(std::move(mphys));
    train_phys.push_back(std::move(terr));
  }
  write_text(join(config.out_dir, "freq_snapshots.csv"), fcsv);
  write_text(join(config.out_dir, "phys_snapshots.csv"), pcsv);

  std::string lcsv = "epoch,loss\n";
  for (std::size_t i = 0; i < tr.loss_curve.size(); ++i)
    lcsv += std::to_string(i) + "," + g12(tr.loss_curve[i]) + "\n";
  write_text(join(config.out_dir, "loss_curve.csv"), lcsv);

  auto freq_figure = [&](const char* name, const char* ylab, bool imag) {
    PlotSpec ps;
    ps.title = std::string("Model vs training error, ") + ylab;
    ps.x_label = "xi";
    ps.y_label = ylab;
    std::vector<PlotSeries> series;
    for (std::size_t i = 0; i < models.size(); ++i) {
      const std::string tag = " e = " + g12(snap_epochs[i]);
      series.push_back({"model" + tag, xi_grid,
                        to_vec(imag ? models[i].imag_part : models[i].real_part)});
      series.push_back({"train" + tag, xi_grid,
                        to_vec(imag ? trains[i].imag_part : trains[i].real_part)});
    }
    write_svg_plot(join(config.out_dir, name), ps, series);
    files.push_back(name);
  };
  freq_figure("freq_real.svg", "Re eta_hat", false);
  freq_figure("freq_imag.svg", "Im eta_hat", true);

  {
    PlotSpec ps;
    ps.title = "Physical-domain error";
    ps.x_label = "x";
    ps.y_label = "eta";
    std::vector<PlotSeries> series;
    for (std::size_t i = 0; i < model_phys.size(); ++i) {
      const std::string tag = " e = " + g12(snap_epochs[i]);
      std::vector<double> mre(model_phys[i].size());
      for (std::size_t j = 0; j < mre.size(); ++j) mre[j] = model_phys[i][j].real();
      series.push_back({"model" + tag, x_grid, std::move(mre)});
      series.push_back({"train" + tag, x_grid, to_vec(train_phys[i])});
    }
    write_svg_plot(join(config.out_dir, "physical.svg"), ps, series);
    files.push_back("physical.svg");
  }
  {
    PlotSpec ps;
    ps.title = "Model vs training discrepancy";
    ps.x_label = "epoch";
    ps.y_label = "relative L2";
    ps.log_y = true;
    std::vector<double> mn(model_norm), tn(train_norm);
    if (norm0 > 0.0)
      for (std::size_t i = 0; i < mn.size(); ++i) {
        mn[i] /= norm0;
        tn[i] /= norm0;
      }
    std::vector<PlotSeries> series = {{"discrepancy", snap_epochs, disc},
                                      {"model norm", snap_epochs, mn},
                                      {"train norm", snap_epochs, tn}};
    write_svg_plot(join(config.out_dir, "discrepancy.svg"), ps, series);
    files.push_back("discrepancy.svg");
  }

  nlohmann::json metrics;
  metrics["lambda"] = lambda;
  metrics["snapshot_epochs"] = snap_epochs;
  metrics["times"] = snap_times;
  metrics["xi_cap"] = cap;
  metrics["initial_error_norm"] = norm0;
  metrics["rel_l2_discrepancy"] = disc;
  metrics["model_error_norm"] = model_norm;
  metrics["train_error_norm"] = train_norm;
  metrics["loss_initial"] = tr.loss_curve.front();
  metrics["loss_final"] = tr.loss_curve.back();
  metrics["projection_tail_warning"] = tail_warning;

  ExperimentReport report;
  report.config = config;
  report.metrics = std::move(metrics);
  report.files = std::move(files);
  finalize_report(report);
  return report;
}

ExperimentReport run_bias_compare(const ExperimentConfig& config) {
  validate(config);
  if (config.dim_d != 1)
    throw std::invalid_argument("bias_compare: the spectral solver is one-dimensional");
  std::filesystem::create_directories(config.out_dir);

  const TargetSpec target{config.target_a, config.target_b, config.target_beta};
  const double lambda = resolve_lambda(config);
  const HermiteBasis basis(config.order_p, lambda);
  const std::vector<double> xi_grid = linspace(-config.xi_max, config.xi_max, config.xi_points);
  const std::vector<double> times = report_times(config);

  // Half-life bands are measured at the snapshot closest to t = 1.
  std::size_t idx_half = 0;
  for (std::size_t i = 1; i < times.size(); ++i)
    if (idx_half == 0 || std::abs(times[i] - 1.0) < std::abs(times[idx_half] - 1.0)) idx_half = i;

  std::vector<int> s_vals{0};
  if (config.num_scales_s > 0) s_vals.push_back(config.num_scales_s);

  nlohmann::json metrics;
  metrics["lambda"] = lambda;
  metrics["times"] = times;
  metrics["s_values"] = s_vals;
  metrics["half_band_time"] = times[idx_half];

  std::vector<std::string> files;
  std::vector<PlotSeries> decay_series;
  for (int s_val : s_vals) {
    const ScaleSpec spec = ScaleSpec::dyadic(s_val, 1);
    if (config.width_total % spec.count() != 0)
      throw std::invalid_argument("bias_compare: width must be divisible by every s + 1");
    const int q = config.width_total / spec.count();
    const NetworkParams params = init_params(spec, q, config.seed, true);
    const SpectralOperator op = assemble_operator(basis, spec);
    const BackwardEulerStepper stepper(op, config.dt);

    bool tail_warning = false;
    auto err0 = [&params, &target](double xi) {
      return network_hat(xi, params, target.beta) - target_hat(xi, target);
    };
    SpectralState state = project_initial(basis, err0, &tail_warning);
    const std::vector<FrequencyProfile> profiles =
        march_snapshots(stepper, state, basis, times, xi_grid, nullptr);

    const std::string tag = "s" + std::to_string(s_val);
    std::string csv = csv_header("xi");
    for (std::size_t i = 0; i < times.size(); ++i)
      append_snapshot(csv, times[i], xi_grid, profiles[i], nullptr);
    const std::string csv_name = "freq_snapshots_" + tag + ".csv";
    write_text(join(config.out_dir, csv_name), csv);
    files.push_back(csv_name);

    nlohmann::json run;
    run["s"] = s_val;
    run["tail_warning"] = tail_warning;
    for (const Band& b : kBands) {
      std::vector<double> e_band, ratio;
      for (const FrequencyProfile& p : profiles) e_band.push_back(band_energy(p, b.lo, b.hi));
      for (double e : e_band) ratio.push_back(e_band.front() > 0.0 ? e / e_band.front() : 0.0);
      run["band_energy"][b.key] = e_band;
      run["band_ratio_initial"][b.key] = ratio;
      decay_series.push_back({tag + " " + b.label, times, ratio});
    }
    run["half_band"] = half_life_band(profiles.front(), profiles[idx_half]);
    metrics["runs"][tag] = run;

    PlotSpec ps;
    ps.title = "Error magnitude, " + tag;
    ps.x_label = "xi";
    ps.y_label = "|eta_hat|";
    ps.log_y = true;
    std::vector<PlotSeries> series;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      std::vector<double> mag(xi_grid.size());
      for (std::size_t j = 0; j < mag.size(); ++j) mag[j] = std::sqrt(sq_at(profiles[i], j));
      series.push_back({"t = " + g12(times[i]), xi_grid, std::move(mag)});
    }
    const std::string svg_name = "freq_mag_" + tag + ".svg";
    write_svg_plot(join(config.out_dir, svg_name), ps, series);
    files.push_back(svg_name);
  }

  {
    PlotSpec ps;
    ps.title = "Band energy decay by scale count";
    ps.x_label = "t";
    ps.y_label = "E_band(t) / E_band(0)";
    ps.log_y = true;
    write_svg_plot(join(config.out_dir, "band_decay.svg"), ps, decay_series);
    files.push_back("band_decay.svg");
  }

  ExperimentReport report;
  report.config = config;
  report.metrics = std::move(metrics);
  report.files = std::move(files);
  finalize_report(report);
  return report;
}

ExperimentReport run_ntk_study(const ExperimentConfig& config) {
  validate(config);
  if (config.dim_d < 2)
    throw std::invalid_argument("ntk_study: the angle sweep needs dim >= 2");
  std::filesystem::create_directories(config.out_dir);

  const ScaleSpec spec = ScaleSpec::dyadic(config.num_scales_s, config.dim_d);
  std::vector<double> grid(static_cast<std::size_t>(config.ntk_angles));
  for (int i = 0; i < config.ntk_angles; ++i)
    grid[static_cast<std::size_t>(i)] = kPi * i / (config.ntk_angles - 1);

  const std::vector<KernelSample> limit = kernel_vs_angle_limit(spec, grid);
  double sup_limit = 0.0;
  for (const KernelSample& k : limit) sup_limit = std::max(sup_limit, std::abs(k.value));

  std::vector<std::vector<KernelSample>> curves;
  std::vector<double> sup_rel_error;
  for (std::size_t i = 0; i < config.ntk_widths.size(); ++i) {
    const int w = config.ntk_widths[i];
    if (w % spec.count() != 0)
      throw std::invalid_argument("ntk_study: widths must be divisible by s + 1");
    const NetworkParams params =
        init_params(spec, w / spec.count(), config.seed + static_cast<std::uint64_t>(i), true);
    curves.push_back(kernel_vs_angle(params, grid));
    double sup = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j)
      sup = std::max(sup, std::abs(curves.back()[j].value - limit[j].value));
    sup_rel_error.push_back(sup / sup_limit);
  }

  std::string csv = "beta,limit";
  for (int w : config.ntk_widths) csv += ",width_" + std::to_string(w);
  csv += '\n';
  for (std::size_t j = 0; j < grid.size(); ++j) {
    csv += g12(grid[j]);
    csv += ',';
    csv += g12(limit[j].value);
    for (const auto& c : curves) {
      csv += ',';
      csv += g12(c[j].value);
    }
    csv += '\n';
  }
  write_text(join(config.out_dir, "ntk_curves.csv"), csv);

  std::vector<std::string> files = {"ntk_curves.csv", "ntk_curves.svg"};
  {
    PlotSpec ps;
    ps.title = "NTK vs input angle";
    ps.x_label = "beta";
    ps.y_label = "Theta";
    std::vector<PlotSeries> series;
    std::vector<double> lv(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) lv[j] = limit[j].value;
    series.push_back({"limit", grid, std::move(lv)});
    for (std::size_t i = 0; i < curves.size(); ++i) {
      std::vector<double> cv(grid.size());
      for (std::size_t j = 0; j < grid.size(); ++j) cv[j] = curves[i][j].value;
      series.push_back({"width " + std::to_string(config.ntk_widths[i]), grid, std::move(cv)});
    }
    write_svg_plot(join(config.out_dir, "ntk_curves.svg"), ps, series);
  }

  nlohmann::json metrics;
  metrics["widths"] = config.ntk_widths;
  metrics["sup_rel_error"] = sup_rel_error;
  metrics["sup_limit"] = sup_limit;

  if (config.ntk_train && config.epochs > 0) {
    const double a = config.target_a, b = config.target_b;
    const TargetFn f = [a, b](const Eigen::VectorXd& x) {
      const double xb = x.mean();
      return std::sin(a * kPi * xb) + std::cos(b * kPi * xb);
    };
    std::vector<int> snaps;
    for (int e : config.drift_epochs)
      if (e > 0 && e <= config.epochs) snaps.push_back(e);
    snaps.push_back(config.epochs);
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());

    std::vector<int> widths{config.width_total};
    if (config.drift_small_width != config.width_total) widths.push_back(config.drift_small_width);

    std::vector<int> drift_epochs_out;
    std::vector<std::vector<double>> drift_values;
    for (int w : widths) {
      if (w % spec.count() != 0)
        throw std::invalid_argument("ntk_study: widths must be divisible by s + 1");
      const NetworkParams params = init_params(spec, w / spec.count(), config.seed, true);
      TrainConfig tc;
      tc.learning_rate_tau = config.learning_rate;
      tc.epochs = config.epochs;
      tc.num_samples = config.num_samples;
      tc.domain_beta = config.target_beta;
      tc.seed = config.seed;
      tc.snapshot_epochs = snaps;
      tc.random_samples = true;
      const TrainResult tr = train(params, f, tc);

      const std::vector<KernelSample> base = kernel_vs_angle(tr.snapshots.front().params, grid);
      double sup0 = 0.0;
      for (const KernelSample& k : base) sup0 = std::max(sup0, std::abs(k.value));
      std::vector<double> dv;
      std::vector<int> de;
      for (const TrainRecord& rec : tr.snapshots) {
        if (rec.epoch == 0) continue;
        const std::vector<KernelSample> cur = kernel_vs_angle(rec.params, grid);
        double sup = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j)
          sup = std::max(sup, std::abs(cur[j].value - base[j].value));
        dv.push_back(sup / sup0);
        de.push_back(rec.epoch);
      }
      drift_epochs_out = de;
      drift_values.push_back(dv);
      metrics["drift"]["width_" + std::to_string(w)] = dv;
    }
    metrics["drift"]["epochs"] = drift_epochs_out;

    std::string dcsv = "epoch";
    for (int w : widths) dcsv += ",width_" + std::to_string(w);
    dcsv += '\n';
    for (std::size_t j = 0; j < drift_epochs_out.size(); ++j) {
      dcsv += std::to_string(drift_epochs_out[j]);
      for (const auto& dv : drift_values) {
        dcsv += ',';
        dcsv += g12(dv[j]);
      }
      dcsv += '\n';
    }
    write_text(join(config.out_dir, "ntk_drift.csv"), dcsv);
    files.push_back("ntk_drift.csv");

    PlotSpec ps;
    ps.title = "NTK drift under training";
    ps.x_label = "epoch";
    ps.y_label = "sup |Theta_e - Theta_0| / sup |Theta_0|";
    ps.log_y = true;
    std::vector<double> ex(drift_epochs_out.begin(), drift_epochs_out.end());
    std::vector<PlotSeries> series;
    for (std::size_t i = 0; i < widths.size(); ++i)
      series.push_back(
          {"width " + std::to_string(widths[static_cast<std::size_t>(i)]), ex, drift_values[i]});
    write_svg_plot(join(config.out_dir, "ntk_drift.svg"), ps, series);
    files.push_back("ntk_drift.svg");
  }

  ExperimentReport report;
  report.config = config;
  report.metrics = std::move(metrics);
  report.files = std::move(files);
  finalize_report(report);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate(config);
  if (config.experiment == "simulate") return run_simulate(config);
  if (config.experiment == "train_compare") return run_train_compare(config);
  if (config.experiment == "bias_compare") return run_bias_compare(config);
  if (config.experiment == "ntk_study") return run_ntk_study(config);
  throw std::invalid_argument("unknown experiment " + config.experiment);
}

}  // namespace mslab
