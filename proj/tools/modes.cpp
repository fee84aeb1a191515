// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <numeric>
#include "cli.hpp"
#include "nsa/error.hpp"

namespace nsa::cli
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<int> Range(int n)
{
  std::vector<int> ks(n);
  std::iota(ks.begin(), ks.end(), 0);
  return ks;
}

Json GridJson(const Grid &g)
{
  Json j;
  j["half_width"] = g.half_width;
  j["step"] = g.step;
  j["nodes"] = g.size();
  return j;
}

Json SpecJson(const OscillatorSpec &s)
{
  Json j;
  j["beta"] = s.beta;
  j["deriv_order"] = s.deriv_order;
  j["num_modes"] = s.num_modes;
  j["margin"] = s.margin;
  j["points_per_wavelength"] = s.points_per_wavelength;
  j["max_nodes"] = s.max_nodes;
  j["richardson"] = s.richardson;
  return j;
}

Json WeightJson(const WeightSpec &w)
{
  Json j;
  j["weight"] = w.describe();
  j["bridge"] = w.bridge();
  return j;
}

// Norms mode by mode when the batch hits a truncation, so the sweep keeps every mode that
// is still resolved and flags the rest.
std::vector<ProjectionRecord> NormsWithFlags(const std::vector<EigenPair> &pairs,
                                             const WeightSpec &w, const Grid &grid)
{
  try
  {
    return projection_norm_numeric(pairs, w, grid);
  }
  catch (const TruncationError &)
  {
  }
  std::vector<ProjectionRecord> out;
  out.reserve(pairs.size());
  for (const auto &pair : pairs)
  {
    try
    {
      out.push_back(projection_norm_numeric({pair}, w, grid).front());
    }
    catch (const TruncationError &)
    {
      ProjectionRecord r;
      r.k = pair.k;
      r.lambda = pair.lambda;
      r.log_norm_f = r.log_norm_g = r.log_norm_P = kNaN;
      r.flags.push_back("truncation");
      out.push_back(r);
    }
  }
  bool any = false;
  for (const auto &r : out)
  {
    any = any || std::isfinite(r.log_norm_P);
  }
  if (!any)
  {
    throw TruncationError(0, "no mode is resolved on the grid; widen it");
  }
  return out;
}

std::vector<ProjectionRecord> Resolved(const std::vector<ProjectionRecord> &rows)
{
  std::vector<ProjectionRecord> out;
  for (const auto &r : rows)
  {
    if (std::isfinite(r.log_norm_P))
    {
      out.push_back(r);
    }
  }
  return out;
}

WeightSpec AnharmonicWeight(const RunConfig &cfg)
{
  const double beta = *cfg.beta;
  if (cfg.weight == "odd-power")
  {
    return WeightSpec::odd_power(*cfg.alpha, beta);
  }
  if (cfg.weight == "k-over-log")
  {
    return WeightSpec::k_over_log(*cfg.gamma, beta);
  }
  if (cfg.weight == "log-power")
  {
    return WeightSpec::log_power(*cfg.gamma, beta);
  }
  if (cfg.weight == "loglog")
  {
    return WeightSpec::loglog(beta);
  }
  if (cfg.weight == "scaled-odd-power")
  {
    return WeightSpec::scaled_odd_power(*cfg.c1, beta);
  }
  throw InvalidArgument("unknown weight " + cfg.weight);
}

}  // namespace

std::string to_string(Mode m)
{
  switch (m)
  {
    case Mode::HoExact:
      return "ho-exact";
    case Mode::Anharmonic:
      return "anharmonic";
    case Mode::EvenWeight:
      return "even-weight";
    case Mode::HigherOrder:
      return "higher-order";
    case Mode::Validate:
      return "validate";
    case Mode::Fit:
      return "fit";
  }
  return "";
}

std::string to_string(Format f)
{
  return f == Format::Csv ? "csv" : "json";
}

OscillatorSpec oscillator_from(const RunConfig &cfg, double beta, int num_modes)
{
  OscillatorSpec s;
  s.beta = beta;
  s.num_modes = num_modes;
  if (cfg.margin)
  {
    s.margin = *cfg.margin;
  }
  if (cfg.ppw)
  {
    s.points_per_wavelength = *cfg.ppw;
  }
  if (cfg.max_nodes)
  {
    s.max_nodes = *cfg.max_nodes;
  }
  s.validate();
  return s;
}

RunResult run_ho_exact(const RunConfig &cfg)
{
  RunResult res;
  res.rows = ho_exact_records(Range(*cfg.k_max), *cfg.a);
  res.manifest["method"] = "exact Laguerre identity a^2 + log L_k(-2a^2)";
  res.manifest["theory"] = "leading asymptotic of the harmonic-oscillator shift norms";
  return res;
}

RunResult run_anharmonic(const RunConfig &cfg)
{
  RunResult res;
  const WeightSpec w = AnharmonicWeight(cfg);
  const OscillatorSpec spec = oscillator_from(cfg, *cfg.beta, *cfg.k_max);
  const TSolution sol = solve_T(spec, w);
  res.rows = NormsWithFlags(sol.pairs, w, sol.grid);
  annotate_theory(res.rows, w, spec.beta);
  std::optional<double> exponent;
  if (w.family() == WeightFamily::OddPower)
  {
    // log||P_k|| ~ 2 p(lambda^{1/beta}) ~ 2 lambda^{alpha/beta}
    exponent = w.alpha() / spec.beta;
  }
  res.fit = fit_block(Resolved(res.rows), exponent, spec.beta);
  res.manifest["oscillator"] = SpecJson(sol.spec);
  res.manifest["weight"] = WeightJson(w);
  res.manifest["grid"] = GridJson(sol.grid);
  res.manifest["lambda_estimate"] = sol.lambda_estimate;
  res.manifest["grid_rebuilt"] = sol.rebuilt;
  return res;
}

RunResult run_even_weight(const RunConfig &cfg)
{
  RunResult res;
  res.rows = even_weight_norms(*cfg.a, Range(*cfg.k_max));
  res.manifest["weight"] = *cfg.a > 0.0 ? WeightJson(WeightSpec::even_sqrt(*cfg.a))
                                         : WeightJson(WeightSpec::zero());
  res.manifest["method"] = "whole-line trapezoid quadrature against the Hermite functions";
  return res;
}

RunResult run_higher_order(const RunConfig &cfg)
{
  RunResult res;
  OscillatorSpec base = oscillator_from(cfg, 2.0 * *cfg.m, *cfg.k_max);
  const HigherOrderResult ho = higher_order_norms(*cfg.m, *cfg.a, Range(*cfg.k_max), base);
  res.rows = ho.records;
  res.fit = fit_block(Resolved(res.rows), std::nullopt, base.beta);
  res.manifest["method"] = "Fourier side: eigenfunctions of D^2 + xi^{2m}, cosh(2 a xi) weight";
  res.manifest["oscillator"] = SpecJson(base);
  res.manifest["grid"] = GridJson(ho.grid);
  return res;
}

RunResult run_fit(const RunConfig &cfg)
{
  RunResult res;
  const auto records = read_csv_records(cfg.in);
  NSA_REQUIRE(!records.empty(), "input table has no resolved rows");
  std::optional<double> exponent;
  if (cfg.alpha)
  {
    exponent = *cfg.alpha / *cfg.beta;
  }
  res.fit = fit_block(records, exponent, cfg.beta.value_or(2.0), cfg.k_min, cfg.k_max);
  res.manifest["input"] = cfg.in;
  res.manifest["records"] = records.size();
  std::string csv = "method,sigma_hat,c_hat,k_min,k_max,residual_rms,lambda_ratio,skipped\n";
  for (const auto &f : res.fit)
  {
    auto num = [&](const char *key)
    {
      return f.contains(key) ? format_number(f[key].get<double>()) : std::string();
    };
    auto idx = [&](const char *key)
    {
      return f.contains(key) ? std::to_string(f[key].get<int>()) : std::string();
    };
    std::string skipped = f.contains("skipped") ? f["skipped"].get<std::string>() : "";
    for (char &c : skipped)
    {
      c = c == ',' ? ';' : c;
    }
    csv += f["method"].get<std::string>() + ',' + num("sigma_hat") + ',' + num("c_hat") + ',' +
           idx("k_min") + ',' + idx("k_max") + ',' + num("residual_rms") + ',' +
           num("lambda_ratio") + ',' + skipped + '\n';
  }
  res.custom_csv = csv;
  res.custom_table = res.fit;
  return res;
}

}  // namespace nsa::cli
