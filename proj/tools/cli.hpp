// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>
#include "json.hpp"
#include "nsa/projections.hpp"

namespace nsa::cli
{

using Json = nlohmann::ordered_json;

enum class Mode
{
  HoExact,
  Anharmonic,
  EvenWeight,
  HigherOrder,
  Validate,
  Fit
};

enum class Format
{
  Csv,
  Json
};

struct RunConfig
{
  Mode mode = Mode::HoExact;
  std::optional<double> beta, alpha, a, gamma, c1;
  std::optional<int> m;
  std::string weight = "odd-power";  // anharmonic only
  std::optional<int> k_max, k_min;
  std::optional<double> margin, ppw;
  std::optional<std::size_t> max_nodes;
  std::string out;  // empty: table to stdout, no side files
  std::string in;   // fit only
  Format format = Format::Csv;
  unsigned seed = 1;
};

std::string to_string(Mode m);
std::string to_string(Format f);

// Parsed table plus everything that goes into the manifest.
struct RunResult
{
  std::vector<ProjectionRecord> rows;
  Json manifest = Json::object();
  Json fit = Json::array();
  // Validate and fit produce their own table instead of rows.
  std::optional<Json> custom_table;
  std::string custom_csv;
  int exit_code = 0;
};

// Grid settings with the overrides from the config applied.
OscillatorSpec oscillator_from(const RunConfig &cfg, double beta, int num_modes);

RunResult run_ho_exact(const RunConfig &cfg);
RunResult run_anharmonic(const RunConfig &cfg);
RunResult run_even_weight(const RunConfig &cfg);
RunResult run_higher_order(const RunConfig &cfg);
RunResult run_fit(const RunConfig &cfg);

struct CheckResult
{
  std::string name;
  bool passed = false;
  std::string detail;
};

// The invariant suite behind `validate`. Exit code 3 when any check fails.
std::vector<CheckResult> run_property_suite(unsigned seed);
RunResult run_validate(const RunConfig &cfg);

// Fit blocks for a record table: log-log regression and dyadic slope over the upper three
// quarters of the k range, plus the lambda ratio when an exponent is known.
Json fit_block(const std::vector<ProjectionRecord> &records, std::optional<double> lambda_exponent,
               double beta, std::optional<int> k_min = std::nullopt,
               std::optional<int> k_max = std::nullopt);

std::string format_number(double v);
std::string csv_table(const std::vector<ProjectionRecord> &rows);
Json json_rows(const std::vector<ProjectionRecord> &rows);
// Columns k, observed (log||P_k||), and theory plus ratio when any record has a comparator.
std::string plot_data(const std::vector<ProjectionRecord> &rows);
std::vector<ProjectionRecord> read_csv_records(const std::string &path);

}  // namespace nsa::cli
