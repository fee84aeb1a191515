// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#include "nsa/projections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include "nsa/asymptotics.hpp"
#include "nsa/error.hpp"
#include "nsa/parallel.hpp"

namespace nsa
{

namespace
{

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// log(1e-16): the decay required at the grid ends relative to the peak.
constexpr double kLogDecay = -36.841361487904734;

double LogAbs(double v)
{
  return v == 0.0 ? kNegInf : std::log(std::abs(v));
}

double LogAddExp(double a, double b)
{
  if (a < b)
  {
    std::swap(a, b);
  }
  if (b == kNegInf)
  {
    return a;
  }
  return a + std::log1p(std::exp(b - a));
}

void RequireDecayed(const std::vector<double> &log_density, int k, const char *which)
{
  const double peak = *std::max_element(log_density.begin(), log_density.end());
  const double end = std::max(log_density.front(), log_density.back());
  if (end > peak + kLogDecay)
  {
    throw TruncationError(k, std::string(which) + " for mode " + std::to_string(k) +
                                 " is not decayed at the grid ends (end/peak = e^" +
                                 std::to_string(end - peak) + "); widen the grid");
  }
}

// Below kTailFloor * max|u| the eigenvector entries are not resolved (inverse iteration
// stops there, then underflow). Where e^{2|p|} times that floor could still reach the
// decay threshold, the norm depends on tail values that were never computed.
constexpr double kTailFloor = 1e-280;

void RequireResolved(const std::vector<double> &lf, const std::vector<double> &lg,
                     const std::vector<double> &p, const std::vector<double> &u, double umax,
                     int k)
{
  const double peak_f = *std::max_element(lf.begin(), lf.end());
  const double peak_g = *std::max_element(lg.begin(), lg.end());
  const double log_floor2 = 2.0 * std::log(kTailFloor * umax);
  for (std::size_t i = 0; i < u.size(); i++)
  {
    if (std::abs(u[i]) >= kTailFloor * umax)
    {
      continue;
    }
    if (2.0 * p[i] + log_floor2 > peak_f + kLogDecay ||
        -2.0 * p[i] + log_floor2 > peak_g + kLogDecay)
    {
      throw TruncationError(k, "mode " + std::to_string(k) +
                                   " is not resolved: the weight outgrows the eigenvector tail "
                                   "below the representable floor");
    }
  }
}

// Trapezoid rule on the nodes x >= 0 of a centered grid.
QuadratureRule HalfLineRule(const Grid &grid)
{
  const std::size_t mid = grid.size() / 2;
  return QuadratureRule::trapezoid(std::span<const double>(grid.nodes).subspan(mid));
}

double Norm(const std::vector<std::complex<double>> &v, double h)
{
  double s = 0.0;
  for (const auto &x : v)
  {
    s += std::norm(x);
  }
  return std::sqrt(h * s);
}

}  // namespace

LogScaled projection_norm_ho_exact(int k, double a)
{
  NSA_REQUIRE(k >= 0, "mode index must be nonnegative");
  NSA_REQUIRE(std::isfinite(a), "shift must be finite");
  if (a == 0.0)
  {
    return LogScaled::from_log(0.0);
  }
  const LogScaled l = laguerre_log(k, -2.0 * a * a);
  return LogScaled::from_log(a * a + l.log_mag);
}

LogScaled projection_norm_ho_exact(int k, std::complex<double> a)
{
  return projection_norm_ho_exact(k, a.real());
}

std::vector<ProjectionRecord> ho_exact_records(const std::vector<int> &ks, double a)
{
  std::vector<ProjectionRecord> out;
  out.reserve(ks.size());
  for (int k : ks)
  {
    ProjectionRecord r;
    r.k = k;
    r.lambda = 2.0 * k + 1.0;
    r.log_norm_P = projection_norm_ho_exact(k, a).log_mag;
    r.log_norm_f = r.log_norm_g = 0.5 * r.log_norm_P;
    if (a != 0.0 && k >= 1)
    {
      r.theory_log_norm = ho_projection_asymptotic(k, a).log_mag;
      r.ratio = std::exp(r.log_norm_P - *r.theory_log_norm);
    }
    out.push_back(r);
  }
  return out;
}

std::vector<ProjectionRecord> projection_norm_numeric(const std::vector<EigenPair> &pairs,
                                                      const WeightSpec &w, const Grid &grid)
{
  const std::size_t n = grid.size();
  const QuadratureRule rule = grid.trapezoid();
  const QuadratureRule half = HalfLineRule(grid);
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; i++)
  {
    p[i] = w.p(grid.nodes[i]);
  }
  const bool cosh_route = w.is_odd() && !w.is_zero();
  std::vector<ProjectionRecord> out(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t j)
  {
    const EigenPair &pair = pairs[j];
    NSA_REQUIRE(pair.u.size() == n, "eigenvector does not match the grid");
    std::vector<double> lf(n), lg(n);
    double umax = 0.0;
    for (std::size_t i = 0; i < n; i++)
    {
      const double lu2 = 2.0 * LogAbs(pair.u[i]);
      lf[i] = 2.0 * p[i] + lu2;
      lg[i] = -2.0 * p[i] + lu2;
      umax = std::max(umax, std::abs(pair.u[i]));
    }
    RequireDecayed(lf, pair.k, "e^{2p}u^2");
    RequireDecayed(lg, pair.k, "e^{-2p}u^2");
    RequireResolved(lf, lg, p, pair.u, umax, pair.k);
    ProjectionRecord &r = out[j];
    r.k = pair.k;
    r.lambda = pair.lambda;
    r.log_norm_f = 0.5 * log_integral_exp(lf, rule).log_mag;
    r.log_norm_g = 0.5 * log_integral_exp(lg, rule).log_mag;
    r.log_norm_P = r.log_norm_f + r.log_norm_g;
    if (cosh_route)
    {
      const std::size_t mid = n / 2;
      std::vector<double> lc(n - mid);
      for (std::size_t i = mid; i < n; i++)
      {
        lc[i - mid] = LogAddExp(lf[i], lg[i]);
      }
      r.log_norm_P_cosh = log_integral_exp(lc, half).log_mag;
      if (std::abs(*r.log_norm_P_cosh - r.log_norm_P) > 1e-8 * std::max(1.0, r.log_norm_P))
      {
        r.flags.push_back("cosh_mismatch");
      }
    }
  });
  return out;
}

void annotate_theory(std::vector<ProjectionRecord> &records, const WeightSpec &w, double beta)
{
  for (auto &r : records)
  {
    if (r.k < 2)
    {
      continue;
    }
    switch (w.family())
    {
      case WeightFamily::HoShift:
        r.theory_log_norm = ho_projection_asymptotic(r.k, w.a()).log_mag;
        r.ratio = std::exp(r.log_norm_P - *r.theory_log_norm);
        break;
      case WeightFamily::OddPower:
      {
        const Theorem3Constants tc = theorem3_constants(w.alpha(), beta);
        r.theory_log_norm = tc.c * std::pow(r.k, tc.sigma);
        r.ratio = r.log_norm_P / *r.theory_log_norm;
        break;
      }
      case WeightFamily::KOverLog:
      case WeightFamily::LogPower:
      case WeightFamily::LogLog:
      {
        const ExampleFamily fam = w.family() == WeightFamily::KOverLog ? ExampleFamily::KOverLog
                                  : w.family() == WeightFamily::LogPower
                                      ? ExampleFamily::LogPower
                                      : ExampleFamily::LogLog;
        const ExampleRate rate = example_rates(fam, beta, w.gamma());
        r.theory_log_norm = rate.theory_log_norm(r.k);
        r.ratio = rate.ratio(r.k, r.log_norm_P) / rate.limit;
        break;
      }
      default:
        break;
    }
  }
}

std::string to_string(FitMethod m)
{
  switch (m)
  {
    case FitMethod::LogLogRegression:
      return "loglog-regression";
    case FitMethod::DyadicSlope:
      return "dyadic-slope";
    case FitMethod::LambdaRatio:
      return "lambda-ratio";
  }
  return "";
}

GrowthFit fit_growth(const std::vector<ProjectionRecord> &records, FitMethod method, int k_min,
                     int k_max, double lambda_exponent, double beta)
{
  std::vector<const ProjectionRecord *> win;
  for (const auto &r : records)
  {
    if (r.k >= k_min && r.k <= k_max)
    {
      NSA_REQUIRE(r.log_norm_P > 0.0, "nonpositive log-norm at k=" + std::to_string(r.k) +
                                          " in the fit window");
      NSA_REQUIRE(r.k >= 1, "fit window must exclude k = 0");
      win.push_back(&r);
    }
  }
  NSA_REQUIRE(win.size() >= 10, "need at least 10 records in the fit window, have " +
                                    std::to_string(win.size()));
  std::sort(win.begin(), win.end(), [](auto *a, auto *b) { return a->k < b->k; });
  GrowthFit fit;
  fit.method = method;
  fit.k_min = win.front()->k;
  fit.k_max = win.back()->k;
  if (lambda_exponent > 0.0)
  {
    fit.lambda_ratio = win.back()->log_norm_P / std::pow(win.back()->lambda, lambda_exponent);
  }
  switch (method)
  {
    case FitMethod::LogLogRegression:
    {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const double m = static_cast<double>(win.size());
      for (auto *r : win)
      {
        const double x = std::log(r->k), y = std::log(r->log_norm_P);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double xbar = sx / m, ybar = sy / m;
      fit.sigma_hat = (sxy - m * xbar * ybar) / (sxx - m * xbar * xbar);
      const double logc = ybar - fit.sigma_hat * xbar;
      fit.c_hat = std::exp(logc);
      double ss = 0.0;
      for (auto *r : win)
      {
        const double e = std::log(r->log_norm_P) - logc - fit.sigma_hat * std::log(r->k);
        ss += e * e;
      }
      fit.residual_rms = std::sqrt(ss / m);
      break;
    }
    case FitMethod::DyadicSlope:
    {
      auto at_most = [&](double k) -> const ProjectionRecord *
      {
        const ProjectionRecord *best = nullptr;
        for (auto *r : win)
        {
          if (r->k <= k)
          {
            best = r;
          }
        }
        return best;
      };
      auto slope = [](const ProjectionRecord *a, const ProjectionRecord *b)
      {
        return std::log(b->log_norm_P / a->log_norm_P) / std::log(double(b->k) / a->k);
      };
      const ProjectionRecord *top = win.back();
      const ProjectionRecord *low = at_most(0.5 * top->k);
      NSA_REQUIRE(low != nullptr && low->k < top->k, "fit window does not span a factor of 2");
      fit.sigma_hat = slope(low, top);
      fit.c_hat = top->log_norm_P / std::pow(top->k, fit.sigma_hat);
      std::vector<double> slopes;
      for (auto *r : win)
      {
        if (2 * r->k > top->k)
        {
          if (const ProjectionRecord *l = at_most(0.5 * r->k); l != nullptr && l->k < r->k)
          {
            slopes.push_back(slope(l, r));
          }
        }
      }
      double ss = 0.0;
      for (double s : slopes)
      {
        ss += (s - fit.sigma_hat) * (s - fit.sigma_hat);
      }
      fit.residual_rms = slopes.empty() ? 0.0 : std::sqrt(ss / slopes.size());
      break;
    }
    case FitMethod::LambdaRatio:
    {
      NSA_REQUIRE(lambda_exponent > 0.0, "lambda-ratio fit needs the exponent alpha/beta");
      fit.c_hat = fit.lambda_ratio;
      fit.sigma_hat = lambda_exponent * 2.0 * beta / (2.0 + beta);
      double ss = 0.0;
      for (auto *r : win)
      {
        const double q = r->log_norm_P / std::pow(r->lambda, lambda_exponent) - fit.c_hat;
        ss += q * q;
      }
      fit.residual_rms = std::sqrt(ss / win.size());
      break;
    }
  }
  return fit;
}

LocalizationResult localization_check(const EigenPair &pair, const Grid &grid, double epsilon,
                                      double beta, double c)
{
  NSA_REQUIRE(epsilon > 0.0 && epsilon < 1.0, "localization needs 0 < eps < 1");
  NSA_REQUIRE(pair.u.size() == grid.size(), "eigenvector does not match the grid");
  LocalizationResult res;
  res.x_minus = std::pow((1.0 - epsilon) * pair.lambda, 1.0 / beta);
  res.x_plus = std::pow((1.0 + epsilon) * pair.lambda, 1.0 / beta);
  NSA_REQUIRE(res.x_plus <= grid.half_width,
              "x+ = " + std::to_string(res.x_plus) + " lies beyond the grid half width " +
                  std::to_string(grid.half_width));
  const QuadratureRule rule = grid.trapezoid();
  const double e = 1.0 + 0.5 * beta;
  res.log_tail_sup = kNegInf;
  for (std::size_t i = 0; i < grid.size(); i++)
  {
    const double ax = std::abs(grid.nodes[i]);
    if (ax >= res.x_minus && ax <= res.x_plus)
    {
      res.mass_in_band += rule.weights[i] * pair.u[i] * pair.u[i];
    }
    if (ax >= res.x_plus)
    {
      res.log_tail_sup =
          std::max(res.log_tail_sup, 2.0 * LogAbs(pair.u[i]) + 2.0 * c * std::pow(ax, e));
    }
  }
  return res;
}

double find_localization_constant(const std::vector<EigenPair> &pairs, const Grid &grid,
                                  double epsilon, double beta, int k_min)
{
  double c = 1.0;
  for (int j = 0; j < 60; j++, c *= 0.5)
  {
    bool ok = true;
    for (const auto &p : pairs)
    {
      if (p.k >= k_min && localization_check(p, grid, epsilon, beta, c).log_tail_sup > 0.0)
      {
        ok = false;
        break;
      }
    }
    if (ok)
    {
      return c;
    }
  }
  return 0.0;
}

double subordination_exponent(double alpha, double beta)
{
  return 0.5 + std::max((alpha - 1.0) / beta, 0.0);
}

GaussianLattice default_lattice(const Grid &grid)
{
  const double x = grid.half_width;
  const double nyq4 = 0.25 * std::numbers::pi / grid.step;
  GaussianLattice lat;
  for (double f : {0.0, 0.125, -0.125, 0.25, -0.25, 0.375, -0.375})
  {
    lat.mu.push_back(f * x);
  }
  lat.tau = {1.0 / 16.0, 0.25, 1.0};
  lat.omega = {0.0, nyq4 / 64.0, nyq4 / 16.0, nyq4 / 4.0, nyq4};
  lat.drop_undecayed = true;
  return lat;
}

namespace
{

bool GaussianDecayed(double mu, double tau, double x)
{
  const double d = x - std::abs(mu);
  return d > 0.0 && d * d / (2.0 * tau) >= -std::log(1e-12);
}

}  // namespace

SubordinationReport subordination_check(const OscillatorSpec &spec, const Grid &grid,
                                        const WeightSpec &w, double s,
                                        const GaussianLattice &lattice)
{
  using C = std::complex<double>;
  NSA_REQUIRE(s > 0.0 && s <= 1.0, "subordination exponent must be in (0, 1]");
  const auto t = assemble_T(spec, grid);
  const auto l = assemble_L(spec, grid, w);
  BandMatrix<C> tc(grid.size(), t.lower(), t.upper());
  for (std::size_t i = 0; i < grid.size(); i++)
  {
    for (std::size_t j = (i >= std::size_t(t.lower()) ? i - t.lower() : 0);
         j <= std::min(grid.size() - 1, i + t.upper()); j++)
    {
      tc(i, j) = t(i, j);
    }
  }
  const std::size_t n = grid.size();
  const double h = grid.step;
  SubordinationReport rep;
  rep.s = s;
  std::vector<C> f(n), tf(n), lf(n), bf(n), t1f(n), d(n), vf(n);
  for (double mu : lattice.mu)
  {
    for (double tau : lattice.tau)
    {
      if (!GaussianDecayed(mu, tau, grid.half_width))
      {
        NSA_REQUIRE(lattice.drop_undecayed, "test function is not decayed at the grid ends");
        continue;
      }
      for (double omega : lattice.omega)
      {
        for (std::size_t i = 0; i < n; i++)
        {
          const double y = grid.nodes[i] - mu;
          f[i] = std::exp(-y * y / (2.0 * tau)) * std::exp(C(0.0, omega * grid.nodes[i]));
        }
        tc.multiply(f, tf);
        l.multiply(f, lf);
        for (std::size_t i = 0; i < n; i++)
        {
          bf[i] = lf[i] - tf[i];
          t1f[i] = tf[i] + f[i];
          vf[i] = std::pow(std::abs(grid.nodes[i]), spec.beta) * f[i];
          d[i] = tf[i] - vf[i];
        }
        SubordinationSample smp;
        smp.mu = mu;
        smp.tau = tau;
        smp.omega = omega;
        smp.norm_f = Norm(f, h);
        smp.norm_Bf = Norm(bf, h);
        smp.norm_T1f = Norm(t1f, h);
        smp.ratio = smp.norm_Bf / (std::pow(smp.norm_T1f, s) * std::pow(smp.norm_f, 1.0 - s));
        const double ntf = Norm(tf, h), nd = Norm(d, h), nv = Norm(vf, h);
        smp.graph_ratio = (ntf * ntf + smp.norm_f * smp.norm_f) /
                          (2.0 * (nd * nd + nv * nv + smp.norm_f * smp.norm_f));
        rep.max_ratio = std::max(rep.max_ratio, smp.ratio);
        rep.max_graph_ratio = std::max(rep.max_graph_ratio, smp.graph_ratio);
        rep.samples.push_back(smp);
      }
    }
  }
  NSA_REQUIRE(!rep.samples.empty(), "no test function fits on the grid");
  // Envelope of the ratio over energy bins E = ||(T+1)f||/||f||.
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto &smp : rep.samples)
  {
    const double le = std::log(smp.norm_T1f / smp.norm_f);
    lo = std::min(lo, le);
    hi = std::max(hi, le);
  }
  constexpr int kBins = 6;
  std::vector<double> env(kBins, 0.0);
  for (const auto &smp : rep.samples)
  {
    const double le = std::log(smp.norm_T1f / smp.norm_f);
    const int b = hi > lo ? std::min(kBins - 1, int((le - lo) / (hi - lo) * kBins)) : 0;
    env[b] = std::max(env[b], smp.ratio);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int b = 0; b < kBins; b++)
  {
    if (env[b] > 0.0)
    {
      const double x = lo + (b + 0.5) * (hi - lo) / kBins, y = std::log(env[b]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      m++;
    }
  }
  if (m >= 2)
  {
    rep.trend_slope = (sxy - sx * sy / m) / (sxx - sx * sx / m);
  }
  return rep;
}

PhaseInvariance complex_weight_invariance(const OscillatorSpec &spec, const Grid &grid,
                                          const std::vector<EigenPair> &pairs,
                                          const WeightSpec &w, const PhaseFunction &r,
                                          std::size_t count)
{
  using C = std::complex<double>;
  const WeightSpec wr = w.with_phase(r);
  const auto a = eigensolve_L(assemble_L(spec, grid, w), count);
  const auto b = eigensolve_L(assemble_L(spec, grid, wr), count);
  PhaseInvariance res;
  for (std::size_t j = 0; j < count; j++)
  {
    res.eigen_deviation =
        std::max(res.eigen_deviation, std::abs(a.eigenvalues[j] - b.eigenvalues[j]));
  }
  const auto real_records = projection_norm_numeric(pairs, w, grid);
  const QuadratureRule rule = grid.trapezoid();
  const std::size_t n = grid.size();
  for (std::size_t j = 0; j < pairs.size(); j++)
  {
    // log|e^{p + ir} u| = p + log|e^{ir}| + log|u|, with the phase factor formed explicitly.
    std::vector<double> lf(n), lg(n);
    for (std::size_t i = 0; i < n; i++)
    {
      const double x = grid.nodes[i];
      const double lphase = std::log(std::abs(std::exp(C(0.0, r.eval(x).p))));
      const double lu = LogAbs(pairs[j].u[i]);
      lf[i] = 2.0 * (wr.p(x) + lphase + lu);
      lg[i] = 2.0 * (-wr.p(x) + lphase + lu);
    }
    const double lp = 0.5 * (log_integral_exp(lf, rule).log_mag + log_integral_exp(lg, rule).log_mag);
    res.log_norm_deviation =
        std::max(res.log_norm_deviation, std::abs(lp - real_records[j].log_norm_P));
  }
  return res;
}

EvenWeightComponents even_weight_components(int k, double a)
{
  NSA_REQUIRE(k >= 0, "mode index must be nonnegative");
  NSA_REQUIRE(a > 0.0, "even weight needs a > 0");
  const WeightSpec w = WeightSpec::even_sqrt(a);
  const double lambda = 2.0 * k + 1.0;
  const double x = std::max(decay_half_width(2.0, lambda, w), 12.0);
  const double h_max = std::numbers::pi / (10.0 * std::sqrt(lambda));
  const long nh = static_cast<long>(std::ceil(x / h_max));
  const double h = x / nh;
  LogSumExp f, g, psi;
  for (long i = -nh; i <= nh; i++)
  {
    const double xi = i * h;
    const double wt = (i == -nh || i == nh) ? 0.5 * h : h;
    const double lh2 = 2.0 * hermite_log(k, xi).log_mag;
    const double p = w.p(xi);
    f.add(2.0 * p + lh2, wt);
    g.add(-2.0 * p + lh2, wt);
    psi.add(2.0 * a * std::abs(xi) + lh2, wt);
  }
  EvenWeightComponents c;
  c.k = k;
  c.log_norm_f = 0.5 * f.result().log_mag;
  c.log_norm_g = 0.5 * g.result().log_mag;
  c.log_psi = psi.result().log_mag;
  const double ne = even_p_norm_exp_minus_p(a);
  c.int_exp_minus_2p = ne * ne;
  return c;
}

std::vector<ProjectionRecord> even_weight_norms(double a, const std::vector<int> &ks)
{
  NSA_REQUIRE(a >= 0.0, "even weight needs a >= 0");
  std::vector<ProjectionRecord> out(ks.size());
  const double ne = a > 0.0 ? even_p_norm_exp_minus_p(a) : 0.0;
  parallel_for(ks.size(), [&](std::size_t j)
  {
    ProjectionRecord &r = out[j];
    r.k = ks[j];
    r.lambda = 2.0 * ks[j] + 1.0;
    if (a == 0.0)
    {
      return;
    }
    const EvenWeightComponents c = even_weight_components(ks[j], a);
    r.log_norm_f = c.log_norm_f;
    r.log_norm_g = c.log_norm_g;
    r.log_norm_P = c.log_norm_f + c.log_norm_g;
    if (ks[j] >= 1)
    {
      r.theory_log_norm = even_p_asymptotic(ks[j], a, ne).log_mag;
      r.ratio = std::exp(r.log_norm_P - *r.theory_log_norm);
    }
  });
  return out;
}

HigherOrderResult higher_order_norms(int m, double a, const std::vector<int> &ks,
                                     const OscillatorSpec &base)
{
  NSA_REQUIRE(m >= 1, "higher-order example needs m >= 1");
  NSA_REQUIRE(a >= 0.0, "higher-order example needs a >= 0");
  NSA_REQUIRE(!ks.empty(), "no modes requested");
  OscillatorSpec spec = base;
  spec.beta = 2.0 * m;
  spec.deriv_order = 2;
  spec.num_modes = *std::max_element(ks.begin(), ks.end()) + 1;
  const WeightSpec w = WeightSpec::ho_shift(a);
  const TSolution sol = solve_T(spec, w);
  HigherOrderResult res;
  res.grid = sol.grid;
  const std::size_t n = sol.grid.size(), mid = n / 2;
  const QuadratureRule half = HalfLineRule(sol.grid);
  const HigherOrderRate rate = higher_order_rate(m, a > 0.0 ? a : 1.0);
  res.records.resize(ks.size());
  for (std::size_t j = 0; j < ks.size(); j++)
  {
    const EigenPair &pair = sol.pairs[ks[j]];
    ProjectionRecord &r = res.records[j];
    r.k = pair.k;
    r.lambda = pair.lambda;
    if (a == 0.0)
    {
      continue;
    }
    std::vector<double> lf(n), lg(n), lc(n - mid);
    for (std::size_t i = 0; i < n; i++)
    {
      const double lu2 = 2.0 * LogAbs(pair.u[i]);
      lf[i] = 2.0 * a * sol.grid.nodes[i] + lu2;
      lg[i] = -2.0 * a * sol.grid.nodes[i] + lu2;
    }
    RequireDecayed(lf, pair.k, "e^{2a xi}u~^2");
    for (std::size_t i = mid; i < n; i++)
    {
      // 2 cosh(2 a xi) u~^2
      lc[i - mid] = LogAddExp(lf[i], lg[i]);
    }
    r.log_norm_P = log_integral_exp(lc, half).log_mag;
    r.log_norm_f = r.log_norm_g = 0.5 * r.log_norm_P;
    if (r.k >= 1)
    {
      r.theory_log_norm = rate.constant * std::pow(r.k, rate.exponent);
      r.ratio = r.log_norm_P / *r.theory_log_norm;
    }
  }
  return res;
}

double biorthogonality_defect(const std::vector<EigenPair> &pairs, const WeightSpec &w,
                              const Grid &grid, std::size_t count)
{
  NSA_REQUIRE(count <= pairs.size(), "not enough eigenpairs for the biorthogonality check");
  const QuadratureRule rule = grid.trapezoid();
  const std::size_t n = grid.size();
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; i++)
  {
    p[i] = w.p(grid.nodes[i]);
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < count; j++)
  {
    for (std::size_t k = 0; k < count; k++)
    {
      double s = 0.0;
      for (std::size_t i = 0; i < n; i++)
      {
        const LogScaled f = LogScaled::from_log(p[i], 1) * LogScaled::from_double(pairs[j].u[i]);
        const LogScaled g = LogScaled::from_log(-p[i], 1) * LogScaled::from_double(pairs[k].u[i]);
        s += rule.weights[i] * (f * g).to_double();
      }
      worst = std::max(worst, std::abs(s - (j == k ? 1.0 : 0.0)));
    }
  }
  return worst;
}

RankOneCheck rank_one_check(const EigenPair &pair, const WeightSpec &w, const Grid &grid,
                            int vectors, unsigned seed)
{
  const auto rec = projection_norm_numeric({pair}, w, grid).front();
  NSA_REQUIRE(rec.log_norm_P < 300.0, "||P_k|| too large for the linear rank-one check");
  const double big_n = std::exp(rec.log_norm_P);
  const std::size_t n = grid.size();
  const QuadratureRule rule = grid.trapezoid();
  std::vector<double> fh(n), gh(n);
  for (std::size_t i = 0; i < n; i++)
  {
    const double p = w.p(grid.nodes[i]);
    const double lu = LogAbs(pair.u[i]);
    const double sg = pair.u[i] < 0.0 ? -1.0 : 1.0;
    fh[i] = sg * std::exp(p + lu - rec.log_norm_f);
    gh[i] = sg * std::exp(-p + lu - rec.log_norm_g);
  }
  auto dot = [&](const std::vector<double> &a, const std::vector<double> &b)
  {
    double s = 0.0;
    for (std::size_t i = 0; i < n; i++)
    {
      s += rule.weights[i] * a[i] * b[i];
    }
    return s;
  };
  auto norm = [&](const std::vector<double> &a) { return std::sqrt(dot(a, a)); };
  // P u = N <u, g^> f^, P* v = N <v, f^> g^.
  auto apply = [&](const std::vector<double> &u, bool adjoint)
  {
    const auto &in = adjoint ? fh : gh;
    const auto &outv = adjoint ? gh : fh;
    const double c = big_n * dot(u, in);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; i++)
    {
      y[i] = c * outv[i];
    }
    return y;
  };
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  RankOneCheck res;
  for (int t = 0; t < vectors; t++)
  {
    std::vector<double> u(n);
    for (auto &x : u)
    {
      x = dist(rng);
    }
    const auto pu = apply(u, false);
    const auto ppu = apply(pu, false);
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; i++)
    {
      diff[i] = ppu[i] - pu[i];
    }
    res.idempotence_defect = std::max(res.idempotence_defect, norm(diff) / norm(pu));
    // One power step on P*P lands on the top right singular vector of a rank-one map.
    const auto v = apply(pu, true);
    const double est = norm(apply(v, false)) / norm(v);
    res.norm_defect = std::max(res.norm_defect, std::abs(est / big_n - 1.0));
  }
  return res;
}

}  // namespace nsa
