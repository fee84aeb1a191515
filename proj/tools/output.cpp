// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include "cli.hpp"
#include "nsa/error.hpp"

namespace nsa::cli
{

namespace
{

std::string JoinFlags(const std::vector<std::string> &flags)
{
  std::string s;
  for (const auto &f : flags)
  {
    if (!s.empty())
    {
      s += ';';
    }
    s += f;
  }
  return s;
}

std::string Cell(const std::optional<double> &v)
{
  return v && std::isfinite(*v) ? format_number(*v) : std::string();
}

Json JsonNumber(const std::optional<double> &v)
{
  return v && std::isfinite(*v) ? Json(*v) : Json(nullptr);
}

std::vector<std::string> SplitCsvLine(const std::string &line)
{
  // The writer never quotes: flags use ';' and numbers have no commas.
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line)
  {
    if (c == ',')
    {
      cells.push_back(cur);
      cur.clear();
    }
    else if (c != '\r')
    {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

double ParseNumber(const std::string &s, const std::string &what)
{
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  double v = 0.0;
  in >> v;
  if (in.fail() || !in.eof())
  {
    throw InvalidArgument("cannot parse " + what + " '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_number(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_table(const std::vector<ProjectionRecord> &rows)
{
  std::string s = "k,lambda_k,log_norm_f,log_norm_g,log_norm_P,theory_log_norm,ratio,flags\n";
  for (const auto &r : rows)
  {
    s += std::to_string(r.k) + ',' + Cell(r.lambda) + ',' + Cell(r.log_norm_f) + ',' +
         Cell(r.log_norm_g) + ',' + Cell(r.log_norm_P) + ',' + Cell(r.theory_log_norm) + ',' +
         Cell(r.ratio) + ',' + JoinFlags(r.flags) + '\n';
  }
  return s;
}

Json json_rows(const std::vector<ProjectionRecord> &rows)
{
  Json out = Json::array();
  for (const auto &r : rows)
  {
    Json j;
    j["k"] = r.k;
    j["lambda_k"] = JsonNumber(r.lambda);
    j["log_norm_f"] = JsonNumber(r.log_norm_f);
    j["log_norm_g"] = JsonNumber(r.log_norm_g);
    j["log_norm_P"] = JsonNumber(r.log_norm_P);
    j["theory_log_norm"] = JsonNumber(r.theory_log_norm);
    j["ratio"] = JsonNumber(r.ratio);
    j["flags"] = r.flags;
    out.push_back(std::move(j));
  }
  return out;
}

std::string plot_data(const std::vector<ProjectionRecord> &rows)
{
  NSA_REQUIRE(!rows.empty(), "plot data needs at least one record");
  const bool theory = std::any_of(rows.begin(), rows.end(),
                                  [](const ProjectionRecord &r) { return r.theory_log_norm.has_value(); });
  std::string s = theory ? "# k log_norm_P theory_log_norm ratio\n" : "# k log_norm_P\n";
  for (const auto &r : rows)
  {
    if (!std::isfinite(r.log_norm_P))
    {
      continue;
    }
    s += std::to_string(r.k) + ' ' + format_number(r.log_norm_P);
    if (theory)
    {
      // Rows without a comparator (k below the asymptotic range) keep the column count.
      s += ' ' + (r.theory_log_norm ? format_number(*r.theory_log_norm) : std::string("nan"));
      s += ' ' + (r.ratio ? format_number(*r.ratio) : std::string("nan"));
    }
    s += '\n';
  }
  return s;
}

std::vector<ProjectionRecord> read_csv_records(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw InvalidArgument("cannot open input table " + path);
  }
  std::string line;
  if (!std::getline(in, line))
  {
    throw InvalidArgument("input table " + path + " is empty");
  }
  std::map<std::string, std::size_t> col;
  const auto header = SplitCsvLine(line);
  for (std::size_t i = 0; i < header.size(); i++)
  {
    col[header[i]] = i;
  }
  for (const char *need : {"k", "lambda_k", "log_norm_f", "log_norm_g", "log_norm_P"})
  {
    if (!col.count(need))
    {
      throw InvalidArgument(std::string("input table lacks column ") + need);
    }
  }
  std::vector<ProjectionRecord> out;
  while (std::getline(in, line))
  {
    if (line.empty())
    {
      continue;
    }
    const auto cells = SplitCsvLine(line);
    if (cells.size() != header.size())
    {
      throw InvalidArgument("ragged row in " + path + ": " + line);
    }
    if (cells[col["log_norm_P"]].empty())
    {
      continue;  // flagged row without a value
    }
    ProjectionRecord r;
    r.k = static_cast<int>(ParseNumber(cells[col["k"]], "k"));
    r.lambda = ParseNumber(cells[col["lambda_k"]], "lambda_k");
    r.log_norm_f = ParseNumber(cells[col["log_norm_f"]], "log_norm_f");
    r.log_norm_g = ParseNumber(cells[col["log_norm_g"]], "log_norm_g");
    r.log_norm_P = ParseNumber(cells[col["log_norm_P"]], "log_norm_P");
    out.push_back(r);
  }
  return out;
}

Json fit_block(const std::vector<ProjectionRecord> &records, std::optional<double> lambda_exponent,
               double beta, std::optional<int> k_min, std::optional<int> k_max)
{
  Json out = Json::array();
  if (records.empty())
  {
    return out;
  }
  const int top = k_max.value_or(records.back().k);
  const int bottom = k_min.value_or(std::max(1, top / 4));
  std::vector<std::pair<FitMethod, double>> methods = {{FitMethod::LogLogRegression, 0.0},
                                                       {FitMethod::DyadicSlope, 0.0}};
  if (lambda_exponent)
  {
    methods.emplace_back(FitMethod::LambdaRatio, *lambda_exponent);
  }
  for (const auto &[method, exponent] : methods)
  {
    Json j;
    j["method"] = to_string(method);
    try
    {
      const GrowthFit f = fit_growth(records, method, bottom, top, exponent, beta);
      j["sigma_hat"] = f.sigma_hat;
      j["c_hat"] = f.c_hat;
      j["k_min"] = f.k_min;
      j["k_max"] = f.k_max;
      j["residual_rms"] = f.residual_rms;
      if (method == FitMethod::LambdaRatio)
      {
        j["lambda_exponent"] = exponent;
        j["lambda_ratio"] = f.lambda_ratio;
      }
    }
    catch (const InvalidArgument &e)
    {
      j["skipped"] = e.what();
    }
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace nsa::cli
