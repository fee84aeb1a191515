// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

// nsa-spectra <mode> [options]: projection-norm tables, fits and the property suite.
// Exit codes: 0 success, 1 invalid configuration, 2 numerical failure, 3 validate found a
// failing check.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include "CLI11.hpp"
#include "cli.hpp"
#include "nsa/error.hpp"

#ifndef NSA_VERSION
#define NSA_VERSION "unknown"
#endif

namespace
{

using namespace nsa;
using namespace nsa::cli;

const std::map<std::string, Mode> kModes = {
    {"ho-exact", Mode::HoExact},         {"anharmonic", Mode::Anharmonic},
    {"even-weight", Mode::EvenWeight},   {"higher-order", Mode::HigherOrder},
    {"validate", Mode::Validate},        {"fit", Mode::Fit}};

struct Allowed
{
  std::set<std::string> required, optional;
};

// Option names as given on the command line, without dashes.
Allowed AllowedFor(const RunConfig &cfg)
{
  const std::set<std::string> out = {"out", "format", "seed"};
  const std::set<std::string> grid = {"margin", "ppw", "max-nodes"};
  Allowed a;
  a.optional = out;
  switch (cfg.mode)
  {
    case Mode::HoExact:
    case Mode::EvenWeight:
      a.required = {"a", "k-max"};
      break;
    case Mode::Anharmonic:
      a.required = {"beta", "k-max"};
      if (cfg.weight == "odd-power")
      {
        a.required.insert("alpha");
      }
      else if (cfg.weight == "k-over-log" || cfg.weight == "log-power")
      {
        a.required.insert("gamma");
      }
      else if (cfg.weight == "scaled-odd-power")
      {
        a.required.insert("c1");
      }
      a.optional.insert("weight");
      a.optional.insert(grid.begin(), grid.end());
      break;
    case Mode::HigherOrder:
      a.required = {"m", "a", "k-max"};
      a.optional.insert(grid.begin(), grid.end());
      break;
    case Mode::Validate:
      break;
    case Mode::Fit:
      a.required = {"in"};
      a.optional.insert({"alpha", "beta", "k-min", "k-max"});
      break;
  }
  return a;
}

void CheckConfig(const RunConfig &cfg)
{
  auto need = [](bool ok, const std::string &msg)
  {
    if (!ok)
    {
      throw InvalidArgument(msg);
    }
  };
  if (cfg.k_max)
  {
    need(*cfg.k_max >= 1, "--k-max must be >= 1");
  }
  if (cfg.a)
  {
    need(std::isfinite(*cfg.a), "--a must be finite");
  }
  switch (cfg.mode)
  {
    case Mode::EvenWeight:
      need(*cfg.a >= 0.0, "even-weight needs --a >= 0");
      break;
    case Mode::HigherOrder:
      need(*cfg.m >= 1, "higher-order needs --m >= 1");
      need(*cfg.a >= 0.0, "higher-order needs --a >= 0");
      break;
    case Mode::Anharmonic:
      need(*cfg.beta > 0.0, "anharmonic needs --beta > 0");
      break;
    case Mode::Fit:
      need(cfg.alpha.has_value() == cfg.beta.has_value(),
           "fit needs --alpha and --beta together (they set the lambda-ratio exponent)");
      if (cfg.k_min && cfg.k_max)
      {
        need(*cfg.k_min < *cfg.k_max, "--k-min must be below --k-max");
      }
      break;
    default:
      break;
  }
}

void WriteFile(const std::filesystem::path &path, const std::string &text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out)
  {
    throw InvalidArgument("cannot write " + path.string());
  }
}

std::filesystem::path Beside(const std::filesystem::path &table, const std::string &suffix)
{
  std::filesystem::path p = table;
  p.replace_extension(suffix);
  return p;
}

Json ParametersJson(const RunConfig &cfg)
{
  Json j;
  j["mode"] = to_string(cfg.mode);
  auto opt = [&](const char *key, const auto &v)
  {
    if (v)
    {
      j[key] = *v;
    }
  };
  opt("beta", cfg.beta);
  opt("alpha", cfg.alpha);
  opt("a", cfg.a);
  opt("gamma", cfg.gamma);
  opt("c1", cfg.c1);
  opt("m", cfg.m);
  if (cfg.mode == Mode::Anharmonic)
  {
    j["weight"] = cfg.weight;
  }
  opt("k_min", cfg.k_min);
  opt("k_max", cfg.k_max);
  opt("margin", cfg.margin);
  opt("points_per_wavelength", cfg.ppw);
  opt("max_nodes", cfg.max_nodes);
  if (!cfg.in.empty())
  {
    j["in"] = cfg.in;
  }
  j["format"] = to_string(cfg.format);
  j["seed"] = cfg.seed;
  return j;
}

int Emit(const RunConfig &cfg, RunResult &res)
{
  Json manifest;
  manifest["tool"] = "nsa-spectra";
  manifest["version"] = NSA_VERSION;
  manifest["parameters"] = ParametersJson(cfg);
  for (auto &[key, value] : res.manifest.items())
  {
    manifest[key] = value;
  }
  if (!res.fit.empty())
  {
    manifest["fit"] = res.fit;
  }
  std::size_t flagged = 0;
  for (const auto &r : res.rows)
  {
    flagged += r.flags.empty() ? 0 : 1;
  }
  if (!res.custom_table)
  {
    manifest["rows"] = res.rows.size();
    manifest["flagged_rows"] = flagged;
  }

  const bool side_files = !cfg.out.empty();
  const std::filesystem::path out = cfg.out;
  const bool plot = side_files && !res.custom_table && !res.rows.empty();
  if (side_files)
  {
    manifest["table"] = out.filename().string();
    if (plot)
    {
      manifest["plot_data"] = Beside(out, ".plot.dat").filename().string();
    }
  }

  std::string table;
  if (cfg.format == Format::Csv)
  {
    table = res.custom_table ? res.custom_csv : csv_table(res.rows);
  }
  else
  {
    Json doc;
    doc["manifest"] = manifest;
    doc["rows"] = res.custom_table ? *res.custom_table : json_rows(res.rows);
    table = doc.dump(2) + "\n";
  }

  if (!side_files)
  {
    if (cfg.mode != Mode::Validate)
    {
      std::fputs(table.c_str(), stdout);
    }
  }
  else
  {
    if (out.has_parent_path())
    {
      std::filesystem::create_directories(out.parent_path());
    }
    WriteFile(out, table);
    WriteFile(Beside(out, ".manifest.json"), manifest.dump(2) + "\n");
    if (plot)
    {
      WriteFile(Beside(out, ".plot.dat"), plot_data(res.rows));
    }
  }
  if (!res.fit.empty() && cfg.mode != Mode::Fit)
  {
    // Fit summary on stderr so a table on stdout stays machine-readable.
    for (const auto &f : res.fit)
    {
      std::cerr << "fit " << f["method"].get<std::string>() << ": ";
      if (f.contains("skipped"))
      {
        std::cerr << "skipped (" << f["skipped"].get<std::string>() << ")\n";
        continue;
      }
      std::cerr << "sigma_hat " << f["sigma_hat"].get<double>() << ", c_hat "
                << f["c_hat"].get<double>();
      if (f.contains("lambda_ratio"))
      {
        std::cerr << ", lambda ratio " << f["lambda_ratio"].get<double>();
      }
      std::cerr << " over k in [" << f["k_min"].get<int>() << ", " << f["k_max"].get<int>()
                << "]\n";
    }
  }
  if (flagged > 0)
  {
    std::cerr << "warning: " << flagged << " rows carry flags (see the flags column)\n";
  }
  return res.exit_code;
}

}  // namespace

int main(int argc, char **argv)
{
  RunConfig cfg;
  std::string mode_name, format = "csv";
  double beta = 0, alpha = 0, a = 0, gamma = 0, c1 = 0, margin = 0, ppw = 0;
  int m = 0, k_max = 0, k_min = 0;
  std::size_t max_nodes = 0;

  CLI::App app{"Spectral-projection norms of non-self-adjoint (an)harmonic oscillators"};
  app.set_version_flag("--version", NSA_VERSION);
  std::vector<std::string> names;
  for (const auto &[name, _] : kModes)
  {
    names.push_back(name);
  }
  app.add_option("mode", mode_name, "Run mode")->required()->check(CLI::IsMember(names));
  std::map<std::string, CLI::Option *> opts;
  opts["beta"] = app.add_option("--beta", beta, "Potential exponent of T = D^2 + |x|^beta");
  opts["alpha"] = app.add_option("--alpha", alpha, "Growth exponent of the odd power weight");
  opts["a"] = app.add_option("--a", a, "Shift / even-weight amplitude");
  opts["gamma"] = app.add_option("--gamma", gamma, "Exponent of the logarithmic weights");
  opts["c1"] = app.add_option("--c1", c1, "Divisor of the scaled odd power weight");
  opts["m"] = app.add_option("--m", m, "Order of the higher-order example");
  opts["weight"] = app.add_option("--weight", cfg.weight, "Anharmonic weight family")
                       ->check(CLI::IsMember({"odd-power", "k-over-log", "log-power", "loglog",
                                              "scaled-odd-power"}));
  opts["k-max"] = app.add_option("--k-max", k_max, "Number of modes (rows k = 0 .. k_max-1); "
                                                   "top of the window for fit");
  opts["k-min"] = app.add_option("--k-min", k_min, "Bottom of the fit window");
  opts["out"] = app.add_option("--out", cfg.out, "Table path; manifest and plot data go beside it");
  opts["in"] = app.add_option("--in", cfg.in, "CSV table to fit");
  opts["format"] = app.add_option("--format", format, "csv or json")
                       ->check(CLI::IsMember({"csv", "json"}));
  opts["seed"] = app.add_option("--seed", cfg.seed, "Seed for randomized checks");
  opts["margin"] = app.add_option("--margin", margin, "Domain safety factor");
  opts["ppw"] = app.add_option("--ppw", ppw, "Grid points per local wavelength");
  opts["max-nodes"] = app.add_option("--max-nodes", max_nodes, "Grid node cap");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try
  {
    cfg.mode = kModes.at(mode_name);
    cfg.format = format == "json" ? Format::Json : Format::Csv;
    const Allowed allowed = AllowedFor(cfg);
    for (const auto &[name, opt] : opts)
    {
      const bool given = opt->count() > 0;
      if (given && !allowed.required.count(name) && !allowed.optional.count(name))
      {
        throw InvalidArgument("--" + name + " is not used by mode " + mode_name);
      }
      if (!given && allowed.required.count(name))
      {
        throw InvalidArgument("mode " + mode_name + " requires --" + name);
      }
    }
    auto take = [&](const char *name, auto value, auto &slot)
    {
      if (opts[name]->count() > 0)
      {
        slot = value;
      }
    };
    take("beta", beta, cfg.beta);
    take("alpha", alpha, cfg.alpha);
    take("a", a, cfg.a);
    take("gamma", gamma, cfg.gamma);
    take("c1", c1, cfg.c1);
    take("m", m, cfg.m);
    take("k-max", k_max, cfg.k_max);
    take("k-min", k_min, cfg.k_min);
    take("margin", margin, cfg.margin);
    take("ppw", ppw, cfg.ppw);
    take("max-nodes", max_nodes, cfg.max_nodes);
    CheckConfig(cfg);

    RunResult res;
    switch (cfg.mode)
    {
      case Mode::HoExact:
        res = run_ho_exact(cfg);
        break;
      case Mode::Anharmonic:
        res = run_anharmonic(cfg);
        break;
      case Mode::EvenWeight:
        res = run_even_weight(cfg);
        break;
      case Mode::HigherOrder:
        res = run_higher_order(cfg);
        break;
      case Mode::Validate:
        res = run_validate(cfg);
        break;
      case Mode::Fit:
        res = run_fit(cfg);
        break;
    }
    return Emit(cfg, res);
  }
  catch (const InvalidArgument &e)
  {
    std::cerr << "nsa-spectra: invalid configuration: " << e.what() << "\n";
    return 1;
  }
  catch (const NumericalFailure &e)
  {
    std::cerr << "nsa-spectra: numerical failure in stage '" << e.stage() << "': " << e.what()
              << "\n";
    return 2;
  }
}
