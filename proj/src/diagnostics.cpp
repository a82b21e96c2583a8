#include "cmcbr/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "cmcbr/error.hpp"

namespace cmcbr {

SliceAnalysis analyze_slice(const SliceState& state, Orientation orientation) {
  SliceAnalysis a;
  a.gamma = christoffels(state.g);
  a.ricci = ricci(state.g, a.gamma);
  a.weyl.electric = electric_weyl(state.g, state.k, a.ricci);
  a.weyl.magnetic = magnetic_weyl(state.k, state.g, a.gamma, orientation);
  a.br = br_components(a.weyl.electric, a.weyl.magnetic, state.g, orientation);
  a.grad_lapse = gradient(state.lapse);
  a.hamiltonian = hamiltonian_constraint(state.g, state.k, a.ricci);
  a.momentum = momentum_constraint(state.g, state.k, a.gamma);
  return a;
}

double br_energy(const SliceState& state, const SliceAnalysis& analysis) {
  return integrate(analysis.br.q_tttt, state.g);
}

double br_energy(const SliceState& state) { return br_energy(state, analyze_slice(state)); }

double lapse_weighted_br_energy(const SliceState& state, const SliceAnalysis& analysis) {
  ScalarField weighted = analysis.br.q_tttt;
  for (std::size_t p = 0; p < weighted.size(); ++p) weighted[p] *= state.lapse[p];
  return integrate(weighted, state.g);
}

double spacetime_br_energy(std::span<const SliceState> history) {
  if (history.empty()) raise(ErrorKind::EmptyHistory, "spacetime energy needs at least one slice");
  double total = 0.0;
  double previous = lapse_weighted_br_energy(history[0], analyze_slice(history[0]));
  for (std::size_t i = 1; i < history.size(); ++i) {
    const double current = lapse_weighted_br_energy(history[i], analyze_slice(history[i]));
    total += 0.5 * (previous + current) * std::abs(history[i].t - history[i - 1].t);
    previous = current;
  }
  return total;
}

double br_flux(const SliceState& state, const SliceAnalysis& analysis) {
  ScalarField integrand(state.grid());
  for (std::size_t p = 0; p < integrand.size(); ++p) {
    const MetricPoint m = metric_point(state.g.at(p));
    integrand[p] = -state.lapse[p] * dot(analysis.br.q_abtt.at(p), state.k.at(p), m) +
                   dot(analysis.br.q_attt.at(p), analysis.grad_lapse.at(p), m);
  }
  return -3.0 * integrate(integrand, state.g);
}

double br_flux(const SliceState& state) { return br_flux(state, analyze_slice(state)); }

double injectivity_cap(const SymTensorField& g) {
  double cap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    const auto& gaa = g(a, a).values();
    const double shortest = *std::min_element(gaa.begin(), gaa.end());
    cap = std::min(cap, 0.5 * g.grid().period[a] * std::sqrt(shortest));
  }
  return cap;
}

double curvature_radius(const SliceState& state, const SliceAnalysis& analysis) {
  const double cap = injectivity_cap(state.g);
  const double peak = sup_norm(analysis.br.q_tttt);
  if (!(peak > 0.0)) return cap;
  return std::min(cap, std::pow(peak, -0.25));
}

double curvature_radius(const SliceState& state) { return curvature_radius(state, analyze_slice(state)); }

GradientLapseCheck gradient_lapse_estimate_check(const SliceState& state, const SliceAnalysis& analysis,
                                                 double r_c, double lambda) {
  GradientLapseCheck c;
  c.lhs = r_c * sup_norm(analysis.grad_lapse, state.g);
  c.rhs_shape = r_c * r_c * lambda + 1.0 / (state.t * state.t);
  c.c_fit = c.lhs / c.rhs_shape;
  return c;
}

GradientLapseCheck gradient_lapse_estimate_check(const SliceState& state, double lambda) {
  const SliceAnalysis analysis = analyze_slice(state);
  return gradient_lapse_estimate_check(state, analysis, curvature_radius(state, analysis), lambda);
}

const DiagnosticsRecord& DiagnosticsRecorder::record(const SliceState& state) {
  const SliceAnalysis analysis = analyze_slice(state);
  DiagnosticsRecord r;
  r.t = state.t;
  r.e_br = br_energy(state, analysis);
  const double weighted = lapse_weighted_br_energy(state, analysis);
  if (records_.empty()) {
    r.e_br_spacetime = 0.0;
  } else {
    const DiagnosticsRecord& prev = records_.back();
    r.e_br_spacetime = prev.e_br_spacetime + 0.5 * (previous_weighted_ + weighted) * std::abs(state.t - prev.t);
  }
  previous_weighted_ = weighted;
  r.k_ratio = sup_norm(state.k, state.g) / std::abs(state.t);
  r.r_c = curvature_radius(state, analysis);
  r.r_c_running = records_.empty() ? r.r_c : std::min(records_.back().r_c_running, r.r_c);
  const LapseMargins margins = lapse_margins(state.lapse, state.k, state.g);
  r.lapse_margin_lower = margins.lower;
  r.lapse_margin_upper = margins.upper;
  r.grad_n_sup = sup_norm(analysis.grad_lapse, state.g);
  r.flux = br_flux(state, analysis);
  r.hamiltonian_norm = sup_norm(analysis.hamiltonian);
  r.momentum_norm = sup_norm(analysis.momentum, state.g);
  records_.push_back(r);
  return records_.back();
}

void MonitorConfig::validate() const {
  if (!(lambda > 1.0)) raise(ErrorKind::ValidationError, "monitor lambda must exceed 1");
  if (!(t0 < 0.0) || !(t_star < 0.0)) raise(ErrorKind::ValidationError, "monitor window must lie in t < 0");
  if (t0 == t_star) raise(ErrorKind::ValidationError, "monitor window is empty (t0 == t_star)");
  if (!(growth_factor > 1.0)) raise(ErrorKind::ValidationError, "growth factor must exceed 1");
}

MonitorVerdict continuation_monitor(std::span<const DiagnosticsRecord> records, const MonitorConfig& config) {
  config.validate();
  if (records.empty()) raise(ErrorKind::EmptyHistory, "continuation monitor needs at least one record");

  const double direction = config.t_star > config.t0 ? 1.0 : -1.0;
  const double slack = 1e-12 * std::max(std::abs(config.t0), std::abs(config.t_star));
  MonitorVerdict verdict;
  const double base_energy = records.front().e_br;
  bool bounded_so_far = true;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DiagnosticsRecord& r = records[i];
    const double progress = direction * (r.t - config.t0);
    const double span = direction * (config.t_star - config.t0);
    if (progress < -slack || progress > span + slack) {
      std::ostringstream msg;
      msg << "record at t = " << r.t << " lies outside the window [" << config.t0 << ", " << config.t_star << "]";
      raise(ErrorKind::ValidationError, msg.str());
    }
    if (i > 0 && direction * (r.t - records[i - 1].t) < 0.0)
      raise(ErrorKind::ValidationError, "records are not ordered from t0 toward t_star");

    RecordVerdict rv{r.t, r.e_br_spacetime <= config.lambda, r.k_ratio * r.k_ratio <= config.lambda};
    verdict.criterion_spacetime_energy |= !rv.spacetime_energy_bounded;
    verdict.criterion_k_ratio |= !rv.k_ratio_bounded;
    bounded_so_far = bounded_so_far && rv.spacetime_energy_bounded && rv.k_ratio_bounded;

    // a zero starting energy gives no scale to measure growth against
    const bool grown = base_energy > 0.0 && r.e_br > config.growth_factor * base_energy;
    verdict.energy_growth |= grown;
    verdict.theorem_tension |= grown && bounded_so_far;
    verdict.records.push_back(rv);
  }
  return verdict;
}

namespace {

constexpr const char* kColumns[] = {"t",          "e_br",        "e_br_spacetime",     "k_ratio",
                                    "r_c",        "r_c_running", "lapse_margin_lower", "lapse_margin_upper",
                                    "grad_n_sup", "flux",        "hamiltonian_norm",   "momentum_norm"};
constexpr std::size_t kColumnCount = std::size(kColumns);

std::array<double DiagnosticsRecord::*, kColumnCount> record_members() {
  return {&DiagnosticsRecord::t,
          &DiagnosticsRecord::e_br,
          &DiagnosticsRecord::e_br_spacetime,
          &DiagnosticsRecord::k_ratio,
          &DiagnosticsRecord::r_c,
          &DiagnosticsRecord::r_c_running,
          &DiagnosticsRecord::lapse_margin_lower,
          &DiagnosticsRecord::lapse_margin_upper,
          &DiagnosticsRecord::grad_n_sup,
          &DiagnosticsRecord::flux,
          &DiagnosticsRecord::hamiltonian_norm,
          &DiagnosticsRecord::momentum_norm};
}

void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

void emit_records(std::span<const DiagnosticsRecord> records, std::ostream& sink) {
  std::string text;
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    if (c) text += ',';
    text += kColumns[c];
  }
  text += '\n';
  const auto members = record_members();
  for (const DiagnosticsRecord& r : records) {
    for (std::size_t c = 0; c < kColumnCount; ++c) {
      if (c) text += ',';
      append_double(text, r.*members[c]);
    }
    text += '\n';
  }
  sink << text;
  sink.flush();
  if (!sink) raise(ErrorKind::SinkError, "failed to write diagnostics records");
}

std::vector<DiagnosticsRecord> parse_records(std::istream& source) {
  std::string line;
  if (!std::getline(source, line)) raise(ErrorKind::ParseError, "diagnostics table has no header");
  std::string expected;
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    if (c) expected += ',';
    expected += kColumns[c];
  }
  if (line != expected) raise(ErrorKind::ParseError, "unexpected diagnostics header: " + line);

  const auto members = record_members();
  std::vector<DiagnosticsRecord> out;
  int line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty()) continue;
    DiagnosticsRecord r;
    const char* pos = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t c = 0; c < kColumnCount; ++c) {
      double v = 0.0;
      const auto res = std::from_chars(pos, end, v);
      if (res.ec != std::errc{}) {
        raise(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": bad number in column " + kColumns[c]);
      }
      r.*members[c] = v;
      pos = res.ptr;
      if (c + 1 < kColumnCount) {
        if (pos == end || *pos != ',')
          raise(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                           std::to_string(kColumnCount) + " columns");
        ++pos;
      }
    }
    if (pos != end) raise(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": trailing characters");
    out.push_back(r);
  }
  return out;
}

}  // namespace cmcbr
