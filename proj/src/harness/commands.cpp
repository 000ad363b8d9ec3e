#include "fluxnet/harness/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "fluxnet/core/errors.hpp"
#include "fluxnet/nn/gradcheck.hpp"

namespace fluxnet::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& s, const fs::path& path, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::ofstream open_output(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& j) { open_output(path) << j.dump(2) << '\n'; }

void log(const CommandOptions& o, const std::string& msg) {
  if (o.verbose) std::cerr << msg << '\n';
}

std::vector<std::string> var_names(const PdeSystem& pde) {
  switch (pde.kind) {
    case PdeKind::Burgers1D:
    case PdeKind::BurgersND: return {"u"};
    case PdeKind::Swe1D: return {"h", "hu"};
    case PdeKind::Swe2D: return {"h", "hu", "hv"};
  }
  return {};
}

json state_json(const StateVector& u) { return std::vector<double>(u.begin(), u.end()); }

// Initial conditions

StateVector param_state(const json& params, const char* key, StateVector fallback, const PdeSystem& pde) {
  if (!params.contains(key)) return fallback;
  const auto v = params.at(key).get<std::vector<double>>();
  if (pde.is_burgers()) {
    if (v.size() != 1) throw ConfigError(std::string("initial_condition.params.") + key + ": expected [u]");
    return StateVector{v[0]};
  }
  if (v.size() != 2 || v[0] < 0.0)
    throw ConfigError(std::string("initial_condition.params.") + key + ": expected [h, u] with h >= 0");
  return StateVector{v[0], v[0] * v[1]};
}

fvm::InitialCondition riemann_ic(const json& params, const PdeSystem& pde, StateVector left, StateVector right) {
  left = param_state(params, "left", left, pde);
  right = param_state(params, "right", right, pde);
  const double x0 = params.value("x0", 0.0);
  return [=](const fvm::Point& x) { return x[0] < x0 ? left : right; };
}

void require_pde(const std::string& name, const PdeSystem& pde, PdeKind kind) {
  if (pde.kind != kind)
    throw ConfigError("initial condition '" + name + "' needs pde " + std::string(to_string(kind)));
}

StateVector swe_hu(double h, double u) { return StateVector{h, h * u}; }

}  // namespace

fvm::InitialCondition make_initial_condition(const std::string& name, const json& params, const PdeSystem& pde) {
  try {
    if (name == "burgers_case1" || name == "burgers_case2" || name == "burgers_riemann") {
      require_pde(name, pde, PdeKind::Burgers1D);
      if (name == "burgers_case2") return riemann_ic(params, pde, StateVector{0.5}, StateVector{-2.5});
      return riemann_ic(params, pde, StateVector{-1.0}, StateVector{1.0});
    }
    if (name == "swe_case1" || name == "swe_case2" || name == "swe_case3" || name == "swe_riemann") {
      require_pde(name, pde, PdeKind::Swe1D);
      if (name == "swe_case2") return riemann_ic(params, pde, swe_hu(2.0, -0.5), swe_hu(1.0, 0.5));
      if (name == "swe_case3") return riemann_ic(params, pde, swe_hu(1.0, -1.0), swe_hu(1.0, 1.0));
      return riemann_ic(params, pde, swe_hu(1.0, -0.5), swe_hu(1.0, 0.5));
    }
    if (name == "burgers_viscous_sine") {
      require_pde(name, pde, PdeKind::Burgers1D);
      const double mean = params.value("mean", 0.2);
      return [mean](const fvm::Point& x) {
        return StateVector{mean + std::sin(2.0 * std::numbers::pi * x[0]) / std::numbers::pi};
      };
    }
    if (name == "burgers2d_cosbump") {
      require_pde(name, pde, PdeKind::BurgersND);
      const double r_max = params.value("r_max", 0.4);
      if (!(r_max > 0.0)) throw ConfigError("initial_condition.params.r_max must be positive");
      return [r_max](const fvm::Point& x) {
        const double r = std::min(std::hypot(x[0], x[1]), r_max);
        return StateVector{(std::cos(8.0 * std::numbers::pi * r) + 1.0) * std::exp(r) / (1.0 + std::exp(r))};
      };
    }
    if (name == "swe2d_dambreak") {
      require_pde(name, pde, PdeKind::Swe2D);
      const double cx = params.value("x_center", 5.0), cy = params.value("y_center", 5.0);
      const double r2 = std::pow(params.value("radius", 2.5), 2);
      const double h_in = params.value("h_inside", 3.0), h_out = params.value("h_outside", 0.25);
      if (h_in < 0.0 || h_out < 0.0) throw ConfigError("initial_condition.params: depths must be >= 0");
      return [=](const fvm::Point& x) {
        const double d2 = (x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy);
        return StateVector{d2 <= r2 ? h_in : h_out, 0.0, 0.0};
      };
    }
  } catch (const json::exception& e) {
    throw ConfigError("initial_condition.params: " + std::string(e.what()));
  }
  throw ConfigError("unknown initial condition '" + name + "'");
}

// gen-data

GenDataResult cmd_gen_data(const ExperimentConfig& config, const fs::path& out, const CommandOptions& options) {
  if (!config.sampling) throw ConfigError("sampling: missing");
  std::optional<surrogate::LowFidelity> lf;
  for (const ModelConfig& m : config.models)
    if (m.kind == surrogate::SurrogateKind::BiFidelity) {
      lf = m.lf_solver;
      break;
    }
  const PdeSystem pde1d = config.pde.one_dimensional();
  data::SamplingSpec train_spec = config.sampling->spec, test_spec = config.sampling->spec;
  train_spec.count = config.sampling->train_count;
  train_spec.seed = train_data_seed(config);
  test_spec.count = config.sampling->test_count;
  test_spec.seed = test_data_seed(config);

  GenDataResult r;
  r.train = data::build_dataset(data::sample_states(train_spec), pde1d, lf);
  r.test = data::build_dataset(data::sample_states(test_spec), pde1d, lf);
  fs::create_directories(out);
  data::write_dataset(out / "train.csv", r.train, config.hash);
  data::write_dataset(out / "test.csv", r.test, config.hash);
  write_json(out / "manifest.json",
             {{"config_hash", config.hash},
              {"name", config.name},
              {"pde", to_string(pde1d.kind)},
              {"lf", lf ? json(surrogate::to_string(*lf)) : json(nullptr)},
              {"train", {{"file", "train.csv"}, {"count", train_spec.count}, {"seed", train_spec.seed}}},
              {"test", {{"file", "test.csv"}, {"count", test_spec.count}, {"seed", test_spec.seed}}}});
  log(options, "gen-data: " + std::to_string(train_spec.count) + " train / " + std::to_string(test_spec.count) +
                   " test samples in " + out.string());
  return r;
}

// train

namespace {

data::Dataset with_lf(const data::Dataset& d, std::optional<surrogate::LowFidelity> lf, const PdeSystem& pde1d) {
  if (d.lf == lf) return d;
  std::vector<data::StatePair> states;
  states.reserve(d.samples.size());
  for (const auto& s : d.samples) states.push_back({s.u_plus, s.u_minus});
  return data::build_dataset(states, pde1d, lf);
}

data::Dataset load_split(const fs::path& path, const PdeSystem& pde1d) {
  if (!fs::exists(path)) throw ConfigError("missing dataset " + path.string() + " (run gen-data first)");
  data::Dataset d = data::read_dataset(path);
  if (d.pde != pde1d.kind)
    throw ConfigError(path.string() + " holds " + std::string(to_string(d.pde)) + " samples, config needs " +
                      std::string(to_string(pde1d.kind)));
  return d;
}

fs::path model_path(const ExperimentConfig& config, const fs::path& out, const std::string& name) {
  return (config.models_dir.empty() ? out : config.models_dir) / ("model_" + name + ".json");
}

double model_error(const surrogate::SurrogateModel& model, const data::Dataset& d) {
  const nn::TrainingData td = data::to_training_data(d, model.kind);
  return nn::relative_loss(td.targets, nn::predict(model.params, td), nn::LossNorm::L1);
}

}  // namespace

std::vector<TrainOutcome> cmd_train(const ExperimentConfig& config, const fs::path& out, const CommandOptions& options) {
  if (config.models.empty()) throw ConfigError("models: none configured");
  const PdeSystem pde1d = config.pde.one_dimensional();
  const data::Dataset train_raw = load_split(out / "train.csv", pde1d);
  const data::Dataset test_raw = load_split(out / "test.csv", pde1d);

  std::vector<TrainOutcome> outcomes;
  std::ostringstream summary;
  summary << "# config_hash=" << config.hash << "\nmodel,kind,lf_solver,epochs,final_loss,train_error,test_error,seconds\n";
  for (const ModelConfig& m : config.models) {
    const std::optional<surrogate::LowFidelity> lf =
        m.kind == surrogate::SurrogateKind::BiFidelity ? std::optional(m.lf_solver) : std::nullopt;
    const data::Dataset train = with_lf(train_raw, lf, pde1d);
    const data::Dataset test = with_lf(test_raw, lf, pde1d);
    const fs::path mpath = model_path(config, out, m.name);
    const fs::path hpath = out / ("history_" + m.name + ".csv");

    TrainOutcome o;
    const auto start = std::chrono::steady_clock::now();
    if (options.reuse_models && fs::exists(mpath) && fs::exists(hpath)) {
      surrogate::SurrogateModel existing = surrogate::load_model(mpath);
      if (existing.config_hash == config.hash) {
        o.model = std::move(existing);
        o.reused = true;
        std::ifstream in(hpath);
        std::string line;
        while (std::getline(in, line)) {
          if (line.empty() || line[0] == '#' || line[0] == 'e') continue;
          const auto f = split(line, ',');
          if (f.size() != 3) throw FormatError(hpath.string() + ": bad history row");
          o.history.loss.push_back(std::stod(f[1]));
          o.history.learning_rate.push_back(std::stod(f[2]));
        }
        log(options, "train " + m.name + ": reusing " + mpath.string());
      }
    }
    if (!o.reused) {
      nn::TrainConfig tc = m.training;
      tc.seed = model_seed(config, m.name);
      const nn::TrainingData td = data::to_training_data(train, m.kind);
      const std::size_t every = std::max<std::size_t>(1, tc.epochs / 10);
      nn::TrainResult tr = nn::train(td, m.network, tc, [&](std::size_t epoch, double loss, double lr) {
        if ((epoch + 1) % every == 0)
          log(options, "train " + m.name + ": epoch " + std::to_string(epoch + 1) + "/" + std::to_string(tc.epochs) +
                           " loss " + number(loss) + " lr " + number(lr));
      });
      o.model.kind = m.kind;
      o.model.lf_solver = m.lf_solver;
      o.model.pde = pde1d.kind;
      o.model.gravity = pde1d.gravity;
      o.model.params = std::move(tr.params);
      o.model.config_hash = config.hash;
      o.history = std::move(tr.history);
      surrogate::save_model(o.model, mpath);
      std::ofstream h = open_output(hpath);
      h << "# config_hash=" << config.hash << "\nepoch,loss,learning_rate\n";
      for (std::size_t e = 0; e < o.history.loss.size(); ++e)
        h << e << ',' << number(o.history.loss[e]) << ',' << number(o.history.learning_rate[e]) << '\n';
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.train_error = model_error(o.model, train);
    o.test_error = model_error(o.model, test);
    log(options, "train " + m.name + ": train error " + number(o.train_error) + ", test error " + number(o.test_error));
    summary << m.name << ',' << surrogate::to_string(m.kind) << ','
            << (lf ? surrogate::to_string(*lf) : std::string()) << ',' << o.history.loss.size() << ','
            << (o.history.loss.empty() ? std::string() : number(o.history.loss.back())) << ','
            << number(o.train_error) << ',' << number(o.test_error) << ',' << number(seconds) << '\n';
    outcomes.push_back(std::move(o));
  }
  open_output(out / "train_summary.csv") << summary.str();
  return outcomes;
}

// eval-apriori

const FluxError& AprioriReport::error(const std::string& label) const {
  for (const FluxError& e : errors)
    if (e.label == label) return e;
  throw ConfigError("no a priori error for '" + label + "'");
}

const StressSeries& AprioriReport::stress_series(const std::string& label) const {
  for (const StressSeries& s : stress)
    if (s.label == label) return s;
  throw ConfigError("no stress series for '" + label + "'");
}

std::shared_ptr<const surrogate::FluxFunction1D> make_flux(const ExperimentConfig& config, const FluxChoice& choice,
                                                           const fs::path& out) {
  if (choice.solver) return std::make_shared<surrogate::SolverFlux>(*choice.solver);
  const fs::path path = model_path(config, out, choice.model);
  if (!fs::exists(path)) throw ConfigError("model file " + path.string() + " not found (run train first)");
  surrogate::SurrogateModel model = surrogate::load_model(path);
  const PdeSystem pde1d = config.pde.one_dimensional();
  if (model.pde != pde1d.kind || (pde1d.is_swe() && model.gravity != pde1d.gravity))
    throw ConfigError("model " + choice.model + " was trained for " + std::string(to_string(model.pde)) +
                      ", configuration needs " + std::string(to_string(pde1d.kind)));
  return std::make_shared<surrogate::SurrogateFlux>(std::move(model));
}

namespace {

struct LabelledFlux {
  std::string label;
  std::shared_ptr<const surrogate::FluxFunction1D> flux;
};

std::vector<LabelledFlux> apriori_fluxes(const ExperimentConfig& config, const fs::path& out) {
  std::vector<LabelledFlux> fluxes{{"godunov", std::make_shared<surrogate::SolverFlux>(surrogate::SolverKind::Godunov)}};
  if (config.evaluation)
    for (surrogate::SolverKind k : config.evaluation->baselines)
      if (k != surrogate::SolverKind::Godunov)
        fluxes.push_back({surrogate::to_string(k), std::make_shared<surrogate::SolverFlux>(k)});
  for (const ModelConfig& m : config.models) {
    FluxChoice c;
    c.model = m.name;
    fluxes.push_back({c.label(), make_flux(config, c, out)});
  }
  return fluxes;
}

std::vector<FluxVector> evaluate_all(const surrogate::FluxFunction1D& f, const PdeSystem& pde1d,
                                     const std::vector<data::StatePair>& states) {
  std::vector<StateVector> plus, minus;
  for (const auto& s : states) {
    plus.push_back(s.u_plus);
    minus.push_back(s.u_minus);
  }
  std::vector<FluxVector> out(states.size(), FluxVector(pde1d.vars()));
  f.evaluate(pde1d, plus, minus, out);
  return out;
}

void write_histogram(std::ostream& os, const std::vector<StressSeries>& series, std::size_t bins) {
  double lo = INFINITY, hi = 0.0;
  for (const auto& s : series)
    for (const auto& comp : s.abs_error)
      for (double e : comp)
        if (e > 0.0) {
          lo = std::min(lo, e);
          hi = std::max(hi, e);
        }
  os << "label,component,log10_lo,log10_hi,count\n";
  if (!(hi > 0.0)) return;
  const double a = std::floor(std::log10(lo)), b = std::max(a + 1.0, std::ceil(std::log10(hi)));
  for (const auto& s : series)
    for (std::size_t c = 0; c < s.abs_error.size(); ++c) {
      std::vector<std::size_t> counts(bins, 0);
      std::size_t zeros = 0;
      for (double e : s.abs_error[c]) {
        if (e == 0.0) {
          ++zeros;
          continue;
        }
        const double t = (std::log10(e) - a) / (b - a);
        ++counts[std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, t) * static_cast<double>(bins)))];
      }
      if (zeros > 0) os << s.label << ',' << c << ",-inf,-inf," << zeros << '\n';
      for (std::size_t k = 0; k < bins; ++k)
        os << s.label << ',' << c << ',' << number(a + (b - a) * static_cast<double>(k) / static_cast<double>(bins))
           << ',' << number(a + (b - a) * static_cast<double>(k + 1) / static_cast<double>(bins)) << ',' << counts[k]
           << '\n';
    }
}

}  // namespace

AprioriReport cmd_eval_apriori(const ExperimentConfig& config, const fs::path& out, const CommandOptions& options) {
  const PdeSystem pde1d = config.pde.one_dimensional();
  const data::Dataset test = load_split(out / "test.csv", pde1d);
  std::vector<data::StatePair> states;
  for (const auto& s : test.samples) states.push_back({s.u_plus, s.u_minus});
  const std::size_t m = pde1d.vars(), n = states.size();
  const std::vector<LabelledFlux> fluxes = apriori_fluxes(config, out);

  AprioriReport report;
  std::vector<std::vector<FluxVector>> predictions;
  for (const LabelledFlux& lf : fluxes) {
    predictions.push_back(evaluate_all(*lf.flux, pde1d, states));
    FluxError e{lf.label, std::vector<double>(m, 0.0), 0.0};
    std::vector<double> num(m, 0.0), den(m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < m; ++c) {
        num[c] += std::abs(test.samples[i].target[c] - predictions.back()[i][c]);
        den[c] += std::abs(test.samples[i].target[c]);
      }
    double num_all = 0.0, den_all = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      e.per_component[c] = num[c] / den[c];
      num_all += num[c];
      den_all += den[c];
    }
    e.total = num_all / den_all;
    log(options, "eval-apriori: " + lf.label + " relative l1 " + number(e.total));
    report.errors.push_back(std::move(e));
  }

  const auto names = var_names(pde1d);
  {
    std::ofstream os = open_output(out / "apriori_errors.csv");
    os << "# config_hash=" << config.hash << "\nflux,relative_l1";
    for (const auto& v : names) os << ",relative_l1_F_" << v;
    os << '\n';
    for (const FluxError& e : report.errors) {
      os << e.label << ',' << number(e.total);
      for (double x : e.per_component) os << ',' << number(x);
      os << '\n';
    }
  }
  {
    std::ofstream os = open_output(out / "apriori_scatter.csv");
    os << "# config_hash=" << config.hash << "\nsample,component";
    for (const LabelledFlux& lf : fluxes) os << ',' << lf.label;
    os << '\n';
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < m; ++c) {
        os << i << ',' << c;
        for (const auto& p : predictions) os << ',' << number(p[i][c]);
        os << '\n';
      }
  }

  if (config.evaluation && config.evaluation->stress) {
    const StressConfig& sc = *config.evaluation->stress;
    if ((sc.scenario == StressScenario::Rarefaction) != pde1d.is_burgers())
      throw ConfigError("evaluation.stress.scenario does not match the pde");
    const std::vector<data::StatePair> stress_states =
        sc.scenario == StressScenario::Rarefaction ? data::rarefaction_scenario_burgers(sc.count, stress_data_seed(config))
                                                   : data::scenario_one_swe(sc.count, stress_data_seed(config));
    const data::Dataset exact = data::build_dataset(stress_states, pde1d, std::nullopt);
    for (const LabelledFlux& lf : fluxes) {
      if (lf.label == "godunov") continue;
      const auto pred = evaluate_all(*lf.flux, pde1d, stress_states);
      StressSeries s{lf.label, std::vector<std::vector<double>>(m, std::vector<double>(sc.count))};
      for (std::size_t i = 0; i < sc.count; ++i)
        for (std::size_t c = 0; c < m; ++c) s.abs_error[c][i] = std::abs(pred[i][c] - exact.samples[i].target[c]);
      report.stress.push_back(std::move(s));
    }
    std::ofstream os = open_output(out / "stress_errors.csv");
    os << "# config_hash=" << config.hash << "\nsample";
    for (std::size_t c = 0; c < m; ++c) os << ",plus_" << names[c] << ",minus_" << names[c];
    for (const auto& s : report.stress)
      for (std::size_t c = 0; c < m; ++c) os << ',' << s.label << "_F_" << names[c];
    os << '\n';
    for (std::size_t i = 0; i < sc.count; ++i) {
      os << i;
      for (std::size_t c = 0; c < m; ++c)
        os << ',' << number(stress_states[i].u_plus[c]) << ',' << number(stress_states[i].u_minus[c]);
      for (const auto& s : report.stress)
        for (std::size_t c = 0; c < m; ++c) os << ',' << number(s.abs_error[c][i]);
      os << '\n';
    }
    std::ofstream hs = open_output(out / "stress_histogram.csv");
    hs << "# config_hash=" << config.hash << '\n';
    write_histogram(hs, report.stress, config.evaluation->histogram_bins);
  }
  return report;
}

// simulate

namespace {

std::string time_tag(double t) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << t;
  return os.str();
}

void write_snapshot(const fs::path& path, const ExperimentConfig& config, const RunConfig& run, const fvm::Mesh& mesh,
                    const fvm::Snapshot& snap) {
  std::ofstream os = open_output(path);
  os << "# config_hash=" << config.hash << "\n# run=" << run.name << "\n# flux=" << run.flux.label()
     << "\n# time=" << number(snap.time) << "\ncell,x,y,measure";
  for (const auto& v : var_names(config.pde)) os << ',' << v;
  os << '\n';
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
    const fvm::Cell& c = mesh.cells[k];
    os << k << ',' << number(c.centroid[0]) << ',' << number(c.centroid[1]) << ',' << number(c.measure);
    for (double x : snap.cells[k]) os << ',' << number(x);
    os << '\n';
  }
}

}  // namespace

std::vector<RunOutcome> cmd_simulate(const ExperimentConfig& config, const fs::path& out, const CommandOptions& options) {
  if (!config.simulation) throw ConfigError("simulation: missing");
  const SimulationSection& sim = *config.simulation;
  const fvm::InitialCondition ic = make_initial_condition(sim.ic, sim.ic_params, config.pde);

  // Resolve everything before running so that configuration errors come first.
  std::vector<std::pair<std::shared_ptr<const fvm::Mesh>, std::shared_ptr<const surrogate::FluxFunction1D>>> setups;
  for (const RunConfig& run : sim.runs) {
    const MeshConfig& mc = run.mesh ? *run.mesh : sim.mesh;
    auto mesh = std::make_shared<const fvm::Mesh>(mc.build());
    if (mesh->dim != config.pde.dim()) throw ConfigError("simulation.runs." + run.name + ": mesh dimension does not match the pde");
    setups.emplace_back(std::move(mesh), make_flux(config, run.flux, out));
  }

  fvm::SimulationConfig sc;
  sc.cfl = sim.cfl;
  sc.t_final = sim.t_final;
  sc.snapshot_times = sim.snapshot_times;

  std::vector<RunOutcome> outcomes;
  for (std::size_t r = 0; r < sim.runs.size(); ++r) {
    const RunConfig& run = sim.runs[r];
    const fs::path dir = out / sim.name / run.name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fvm::Discretization disc(config.pde, setups[r].first, setups[r].second, sim.bc);
    const auto start = std::chrono::steady_clock::now();
    RunOutcome o{run.name, setups[r].first, fvm::run_simulation(disc, sc, ic)};
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const fvm::SimulationResult& res = o.result;

    json log_doc = {{"config_hash", config.hash},
                    {"simulation", sim.name},
                    {"run", run.name},
                    {"flux", run.flux.label()},
                    {"cells", o.mesh->cells.size()},
                    {"completed", res.completed()},
                    {"steps", res.steps},
                    {"final_time", res.final_state.time},
                    {"initial_total", state_json(res.initial_total)},
                    {"final_total", state_json(res.final_total)},
                    {"boundary_outflow", state_json(res.boundary_outflow)},
                    {"seconds", seconds}};
    if (res.completed()) {
      log_doc["balance_defect"] = state_json(res.balance_defect());
      for (std::size_t k = 0; k < res.snapshots.size(); ++k)
        write_snapshot(dir / ("snapshot_t" + time_tag(res.snapshots[k].time) + ".csv"), config, run, *o.mesh,
                       res.snapshots[k]);
      log(options, "simulate " + sim.name + "/" + run.name + ": reached t=" + number(res.final_state.time) + " in " +
                       std::to_string(res.steps) + " steps");
    } else {
      const fvm::FailureRecord& f = *res.failure;
      write_json(dir / "failure.json", {{"config_hash", config.hash},
                                        {"run", run.name},
                                        {"flux", run.flux.label()},
                                        {"time", f.time},
                                        {"step", f.step},
                                        {"cell", f.cell ? json(*f.cell) : json(nullptr)},
                                        {"face", f.face ? json(*f.face) : json(nullptr)},
                                        {"reason", f.reason}});
      log(options, "simulate " + sim.name + "/" + run.name + ": FAILED at t=" + number(f.time) + " (step " +
                       std::to_string(f.step) + "): " + f.reason);
    }
    write_json(dir / "run.json", log_doc);
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

// compare

std::vector<SnapshotFile> read_snapshots(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir)) throw ConfigError("no run directory " + run_dir.string());
  std::vector<SnapshotFile> snaps;
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    const std::string fname = entry.path().filename().string();
    if (fname.rfind("snapshot_", 0) != 0 || entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path());
    SnapshotFile s;
    bool have_time = false, have_header = false;
    std::string line;
    std::size_t lineno = 0, ncols = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      if (line[0] == '#') {
        if (line.rfind("# time=", 0) == 0) {
          s.time = parse_number(line.substr(7), entry.path(), lineno);
          have_time = true;
        }
        continue;
      }
      const auto f = split(line, ',');
      if (!have_header) {
        if (f.size() < 5 || f[0] != "cell") throw FormatError(entry.path().string() + ": bad header");
        ncols = f.size();
        have_header = true;
        continue;
      }
      if (f.size() != ncols) throw FormatError(entry.path().string() + ":" + std::to_string(lineno) + ": column count");
      s.centroids.push_back({parse_number(f[1], entry.path(), lineno), parse_number(f[2], entry.path(), lineno)});
      s.measures.push_back(parse_number(f[3], entry.path(), lineno));
      StateVector u(ncols - 4);
      for (std::size_t c = 4; c < ncols; ++c) u[c - 4] = parse_number(f[c], entry.path(), lineno);
      s.cells.push_back(u);
    }
    if (!have_time || s.cells.empty()) throw FormatError(entry.path().string() + ": missing time or cells");
    snaps.push_back(std::move(s));
  }
  if (snaps.empty()) throw ConfigError("run directory " + run_dir.string() + " has no snapshots (did the run fail?)");
  std::sort(snaps.begin(), snaps.end(), [](const SnapshotFile& a, const SnapshotFile& b) { return a.time < b.time; });
  return snaps;
}

std::vector<ComparisonSummary> cmd_compare(const ExperimentConfig& config, const fs::path& out, const CommandOptions& options) {
  if (!config.simulation) throw ConfigError("simulation: missing");
  if (config.comparisons.empty()) throw ConfigError("comparisons: none configured");
  const fs::path base = out / config.simulation->name;
  const auto names = var_names(config.pde);
  std::vector<ComparisonSummary> all;
  for (const Comparison& cmp : config.comparisons) {
    const auto a = read_snapshots(base / cmp.reference);
    const auto b = read_snapshots(base / cmp.run);
    if (a.size() != b.size()) throw ConfigError("compare " + cmp.reference + "/" + cmp.run + ": snapshot counts differ");
    for (std::size_t k = 0; k < a.size(); ++k) {
      const SnapshotFile &sa = a[k], &sb = b[k];
      if (std::abs(sa.time - sb.time) > 1e-12 * std::max(1.0, sa.time))
        throw ConfigError("compare " + cmp.reference + "/" + cmp.run + ": snapshot times differ");
      if (sa.cells.size() != sb.cells.size())
        throw ConfigError("compare " + cmp.reference + "/" + cmp.run + ": meshes differ");
      const std::size_t m = sa.cells[0].size();
      ComparisonSummary s{cmp.reference, cmp.run, sa.time, std::vector<double>(m, 0.0), std::vector<double>(m, 0.0),
                          std::vector<double>(m, 0.0), 0.0, 0.0};
      std::ofstream os = open_output(out / ("compare_" + cmp.reference + "_" + cmp.run + "_t" + time_tag(sa.time) + ".csv"));
      os << "# config_hash=" << config.hash << "\n# time=" << number(sa.time) << "\ncell,x,y";
      for (const auto& v : names) os << ",abs_err_" << v;
      os << '\n';
      for (std::size_t i = 0; i < sa.cells.size(); ++i) {
        const double scale = std::max({1.0, std::abs(sa.centroids[i][0]), std::abs(sa.centroids[i][1])});
        if (std::abs(sa.centroids[i][0] - sb.centroids[i][0]) > 1e-12 * scale ||
            std::abs(sa.centroids[i][1] - sb.centroids[i][1]) > 1e-12 * scale)
          throw ConfigError("compare " + cmp.reference + "/" + cmp.run + ": meshes differ at cell " + std::to_string(i));
        os << i << ',' << number(sa.centroids[i][0]) << ',' << number(sa.centroids[i][1]);
        for (std::size_t c = 0; c < m; ++c) {
          const double d = std::abs(sa.cells[i][c] - sb.cells[i][c]);
          s.l1[c] += sa.measures[i] * d;
          s.linf[c] = std::max(s.linf[c], d);
          s.reference_l1[c] += sa.measures[i] * std::abs(sa.cells[i][c]);
          os << ',' << number(d);
        }
        os << '\n';
      }
      double num = 0.0, den = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        num += s.l1[c];
        den += s.reference_l1[c];
        s.max_linf = std::max(s.max_linf, s.linf[c]);
      }
      s.relative_l1 = den > 0.0 ? num / den : num;
      log(options, "compare " + cmp.run + " vs " + cmp.reference + " t=" + number(s.time) + ": relative l1 " +
                       number(s.relative_l1) + ", max " + number(s.max_linf));
      all.push_back(std::move(s));
    }
  }
  std::ofstream os = open_output(out / "compare_summary.csv");
  os << "# config_hash=" << config.hash << "\nreference,run,time,component,l1,linf,reference_l1\n";
  for (const ComparisonSummary& s : all)
    for (std::size_t c = 0; c < s.l1.size(); ++c)
      os << s.reference << ',' << s.run << ',' << number(s.time) << ',' << names[c] << ',' << number(s.l1[c]) << ','
         << number(s.linf[c]) << ',' << number(s.reference_l1[c]) << '\n';
  return all;
}

double piecewise_l1_distance_1d(const SnapshotFile& a, const SnapshotFile& b) {
  // Cells are sorted along x; walk both partitions at once.
  std::size_t i = 0, j = 0;
  const auto left = [](const SnapshotFile& s, std::size_t k) { return s.centroids[k][0] - 0.5 * s.measures[k]; };
  const auto right = [](const SnapshotFile& s, std::size_t k) { return s.centroids[k][0] + 0.5 * s.measures[k]; };
  double x = std::max(left(a, 0), left(b, 0)), total = 0.0;
  while (i < a.cells.size() && j < b.cells.size()) {
    const double x_next = std::min(right(a, i), right(b, j));
    if (x_next > x) {
      for (std::size_t c = 0; c < a.cells[i].size(); ++c) total += (x_next - x) * std::abs(a.cells[i][c] - b.cells[j][c]);
      x = x_next;
    }
    if (right(a, i) <= x_next) ++i;
    if (j < b.cells.size() && right(b, j) <= x_next) ++j;
  }
  return total;
}

// gradcheck

GradcheckReport cmd_gradcheck(const ExperimentConfig& config, const fs::path& out, const CommandOptions& options) {
  const GradcheckConfig gc = config.gradcheck.value_or(GradcheckConfig{});
  GradcheckReport report;
  report.tolerance = gc.tolerance;
  std::ofstream os = open_output(out / "gradcheck.csv");
  os << "# config_hash=" << config.hash
     << "\ncase,activation,hidden_layers,batch,loss,offsets,parameters,max_relative_error\n";
  std::size_t k = 0;
  for (const nn::GradCheckCase& c : nn::random_gradcheck_cases(gc.cases, gradcheck_seed(config))) {
    nn::GradCheckResult r = nn::gradient_check(c);
    report.max_relative_error = std::max(report.max_relative_error, r.max_relative_error);
    std::string hidden;
    for (std::size_t w : c.spec.hidden_layers) hidden += (hidden.empty() ? "" : "x") + std::to_string(w);
    os << k++ << ',' << nn::to_string(c.spec.activation) << ',' << hidden << ',' << c.batch_size << ','
       << nn::to_string(c.norm) << ',' << (c.with_offsets ? 1 : 0) << ',' << r.parameters_checked << ','
       << number(r.max_relative_error) << '\n';
    report.results.push_back(std::move(r));
  }
  log(options, "gradcheck: max relative error " + number(report.max_relative_error) + " over " +
                   std::to_string(report.results.size()) + " cases");
  return report;
}

}  // namespace fluxnet::harness
