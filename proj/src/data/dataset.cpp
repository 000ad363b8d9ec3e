#include "fluxnet/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fluxnet/core/errors.hpp"
#include "fluxnet/core/random.hpp"
#include "fluxnet/riemann/exact.hpp"

namespace fluxnet::data {

namespace {

double draw_depth(Rng& rng, const Range& r) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double h = rng.uniform(r.lo, r.hi);
    if (h >= kMinSampledDepth) return h;
  }
  throw ConfigError("depth range admits no samples above the minimum depth");
}

void check_range(const Range& r, const char* name) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
    throw ConfigError(std::string("sampling range ") + name + " must satisfy lo <= hi");
}

std::string number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> header_columns(std::size_t m, bool lf) {
  std::vector<std::string> cols;
  for (const char* prefix : {"u_plus_", "u_minus_", "lf_", "target_"}) {
    if (!lf && std::string(prefix) == "lf_") continue;
    for (std::size_t k = 0; k < m; ++k) cols.push_back(prefix + std::to_string(k));
  }
  return cols;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void SamplingSpec::validate() const {
  if (pde != PdeKind::Burgers1D && pde != PdeKind::Swe1D) throw ConfigError("sampling pde must be burgers1d or swe1d");
  if (count == 0) throw ConfigError("sample count must be >= 1");
  if (pde == PdeKind::Burgers1D) {
    check_range(u_plus, "u_plus");
    check_range(u_minus, "u_minus");
  } else {
    check_range(h_range, "h");
    check_range(u_range, "u");
    if (h_range.lo < 0.0) throw ConfigError("depth range lower bound must be >= 0");
    if (h_range.hi < kMinSampledDepth) throw ConfigError("depth range must extend above the minimum depth");
  }
}

std::vector<StatePair> sample_states(const SamplingSpec& spec) {
  spec.validate();
  std::vector<StatePair> out(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    Rng rng(mix_seed(spec.seed, i));
    if (spec.pde == PdeKind::Burgers1D) {
      const double a = rng.uniform(spec.u_plus.lo, spec.u_plus.hi);
      const double b = rng.uniform(spec.u_minus.lo, spec.u_minus.hi);
      out[i] = {StateVector{a}, StateVector{b}};
    } else {
      const double h1 = draw_depth(rng, spec.h_range);
      const double u1 = rng.uniform(spec.u_range.lo, spec.u_range.hi);
      const double h2 = draw_depth(rng, spec.h_range);
      const double u2 = rng.uniform(spec.u_range.lo, spec.u_range.hi);
      out[i] = {StateVector{h1, h1 * u1}, StateVector{h2, h2 * u2}};
    }
  }
  return out;
}

Dataset build_dataset(const std::vector<StatePair>& states, const PdeSystem& pde,
                      std::optional<surrogate::LowFidelity> lf) {
  if (pde.kind != PdeKind::Burgers1D && pde.kind != PdeKind::Swe1D)
    throw ConfigError("datasets are built for burgers1d or swe1d");
  Dataset d;
  d.pde = pde.kind;
  d.lf = lf;
  d.samples.resize(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const riemann::RiemannFluxQuery q{pde, states[i].u_plus, states[i].u_minus};
    FluxSample& s = d.samples[i];
    s.u_plus = q.u_plus;
    s.u_minus = q.u_minus;
    try {
      s.target = riemann::godunov_flux(q);
      if (lf) s.lf_flux = surrogate::low_fidelity_flux(*lf, q);
    } catch (const DryStateError& e) {
      throw DryStateError("sample " + std::to_string(i) + ": " + e.what());
    } catch (const InvalidStateError& e) {
      throw InvalidStateError("sample " + std::to_string(i) + ": " + e.what());
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("sample " + std::to_string(i) + ": " + e.what());
    }
  }
  return d;
}

std::vector<StatePair> rarefaction_scenario_burgers(std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ConfigError("scenario count must be >= 1");
  std::vector<StatePair> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed, i));
    const double a = rng.uniform(-3.0, 0.0);
    const double b = rng.uniform(0.0, 3.0);
    out[i] = {StateVector{a}, StateVector{b}};
  }
  return out;
}

std::vector<StatePair> scenario_one_swe(std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ConfigError("scenario count must be >= 1");
  std::vector<StatePair> out(count);
  const Range depth{0.0, 3.0};
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed, i));
    const double h = draw_depth(rng, depth);
    const double u_left = rng.uniform(-2.0, 0.0);
    const double u_right = rng.uniform(0.0, 2.0);
    out[i] = {StateVector{h, h * u_left}, StateVector{h, h * u_right}};
  }
  return out;
}

nn::TrainingData to_training_data(const Dataset& d, surrogate::SurrogateKind kind) {
  const bool bf = kind == surrogate::SurrogateKind::BiFidelity;
  if (bf && !d.lf) throw ConfigError("bi-fidelity training needs a dataset with LF fluxes");
  const std::size_t m = d.vars(), n = d.samples.size();
  nn::TrainingData t{nn::Matrix(n, bf ? 3 * m : 2 * m), nn::Matrix(n, m), bf ? nn::Matrix(n, m) : nn::Matrix{}};
  for (std::size_t i = 0; i < n; ++i) {
    const FluxSample& s = d.samples[i];
    for (std::size_t k = 0; k < m; ++k) {
      t.inputs(i, k) = s.u_plus[k];
      t.inputs(i, m + k) = s.u_minus[k];
      t.targets(i, k) = s.target[k];
      if (bf) {
        t.inputs(i, 2 * m + k) = (*s.lf_flux)[k];
        t.offsets(i, k) = (*s.lf_flux)[k];
      }
    }
  }
  return t;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, std::size_t n_test,
                                                                            std::uint64_t seed) {
  if (n_test > n) throw ConfigError("test split larger than the dataset");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(mix_seed(seed, 0x5b11));
  rng.shuffle(std::span<std::size_t>(idx));
  std::vector<std::size_t> test(idx.end() - static_cast<std::ptrdiff_t>(n_test), idx.end());
  idx.resize(n - n_test);
  return {std::move(idx), std::move(test)};
}

void write_dataset(const std::filesystem::path& path, const Dataset& d, const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  const std::size_t m = d.vars();
  out << "# pde=" << to_string(d.pde) << '\n';
  out << "# lf=" << (d.lf ? surrogate::to_string(*d.lf) : std::string("none")) << '\n';
  if (!config_hash.empty()) out << "# config_hash=" << config_hash << '\n';
  const std::vector<std::string> cols = header_columns(m, d.lf.has_value());
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    const FluxSample& s = d.samples[i];
    if (d.lf.has_value() != s.lf_flux.has_value())
      throw InvalidStateError("sample " + std::to_string(i) + " LF flux presence differs from the dataset");
    std::string line;
    auto put = [&](const StateVector& v) {
      for (double x : v) {
        if (!line.empty()) line += ',';
        line += number(x);
      }
    };
    put(s.u_plus);
    put(s.u_minus);
    if (s.lf_flux) put(*s.lf_flux);
    put(s.target);
    out << line << '\n';
  }
  if (!out) throw FormatError("write failed for " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path, std::string* config_hash) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  auto fail = [&](std::size_t line, const std::string& msg) -> FormatError {
    return FormatError(path.string() + ":" + std::to_string(line) + ": " + msg);
  };

  Dataset d;
  std::optional<PdeKind> pde;
  bool lf_known = false;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const std::string body = trim(t.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
      try {
        if (key == "pde") pde = pde_kind_from_string(value);
        if (key == "lf") {
          lf_known = true;
          if (value != "none") d.lf = surrogate::low_fidelity_from_string(value);
        }
      } catch (const ConfigError& e) {
        throw fail(lineno, e.what());
      }
      if (key == "config_hash" && config_hash) *config_hash = value;
      continue;
    }
    header = split(t, ',');
    for (auto& h : header) h = trim(h);
    break;
  }
  if (header.empty()) throw fail(lineno, "empty dataset file (no header)");

  const auto is_lf = [](const std::string& c) { return c.rfind("lf_", 0) == 0; };
  const bool has_lf = std::any_of(header.begin(), header.end(), is_lf);
  const std::size_t m = pde ? (*pde == PdeKind::Swe1D ? 2 : 1)
                            : static_cast<std::size_t>(std::count_if(header.begin(), header.end(), [](const auto& c) {
                                return c.rfind("u_plus_", 0) == 0;
                              }));
  if (m != 1 && m != 2) throw fail(lineno, "header does not describe a burgers1d or swe1d dataset");
  if (header != header_columns(m, has_lf)) throw fail(lineno, "unexpected header columns");
  if (lf_known && d.lf.has_value() != has_lf) throw fail(lineno, "lf metadata disagrees with the header");
  if (has_lf && !d.lf) d.lf = surrogate::LowFidelity::Roe;
  d.pde = pde.value_or(m == 2 ? PdeKind::Swe1D : PdeKind::Burgers1D);
  if (d.pde != PdeKind::Burgers1D && d.pde != PdeKind::Swe1D) throw fail(lineno, "unsupported pde for a dataset");

  const std::size_t header_line = lineno;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::vector<std::string> cells = split(t, ',');
    if (cells.size() != header.size())
      throw fail(lineno, "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()));
    std::vector<double> v(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      const char* b = cell.data();
      const char* e = b + cell.size();
      const auto res = std::from_chars(b, e, v[c]);
      if (res.ec != std::errc() || res.ptr != e || cell.empty())
        throw fail(lineno, "invalid number '" + cell + "' in column " + header[c]);
    }
    FluxSample s{StateVector(m), StateVector(m), std::nullopt, FluxVector(m)};
    std::size_t c = 0;
    for (std::size_t k = 0; k < m; ++k) s.u_plus[k] = v[c++];
    for (std::size_t k = 0; k < m; ++k) s.u_minus[k] = v[c++];
    if (has_lf) {
      s.lf_flux = FluxVector(m);
      for (std::size_t k = 0; k < m; ++k) (*s.lf_flux)[k] = v[c++];
    }
    for (std::size_t k = 0; k < m; ++k) s.target[k] = v[c++];
    d.samples.push_back(s);
  }
  if (d.samples.empty()) throw fail(header_line, "dataset has a header but no samples");
  return d;
}

}  // namespace fluxnet::data
