// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include "nsa/error.hpp"
#include "nsa/schrodinger.hpp"

namespace nsa
{

namespace
{

static_assert(std::endian::native == std::endian::little, "cache format assumes little-endian");

constexpr char kMagic[4] = {'N', 'S', 'A', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void Put(std::ofstream &out, const T &v)
{
  out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
bool Get(std::ifstream &in, T &v)
{
  return static_cast<bool>(in.read(reinterpret_cast<char *>(&v), sizeof(T)));
}

std::uint64_t Fnv1a(const std::string &s)
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s)
  {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::string cache_key(const OscillatorSpec &spec, const Grid &grid)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, "beta=%.17g;2m=%d;K=%d;X=%.17g;h=%.17g;N=%zu;rich=%d;ppw=%.17g",
                spec.beta, spec.deriv_order, spec.num_modes, grid.half_width, grid.step,
                grid.size(), spec.richardson ? 1 : 0, spec.points_per_wavelength);
  char name[64];
  std::snprintf(name, sizeof name, "nsas_%016llx.bin",
                static_cast<unsigned long long>(Fnv1a(buf)));
  return name;
}

void write_cache(const std::string &path, const OscillatorSpec &spec, const Grid &grid,
                 const std::vector<EigenPair> &pairs)
{
  // Write to a temporary then rename, so a concurrent reader never sees a partial file.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
    {
      throw NumericalFailure("cache", "cannot write " + tmp);
    }
    out.write(kMagic, 4);
    Put(out, kVersion);
    Put(out, spec.beta);
    Put(out, static_cast<std::uint32_t>(pairs.size()));
    Put(out, static_cast<std::uint32_t>(grid.size()));
    for (double x : grid.nodes)
    {
      Put(out, x);
    }
    for (const auto &p : pairs)
    {
      Put(out, p.lambda);
    }
    for (const auto &p : pairs)
    {
      out.write(reinterpret_cast<const char *>(p.u.data()),
                static_cast<std::streamsize>(p.u.size() * sizeof(double)));
    }
    for (const auto &p : pairs)
    {
      Put(out, p.lambda_error);
    }
    if (!out)
    {
      throw NumericalFailure("cache", "short write to " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
  {
    throw NumericalFailure("cache", "cannot rename " + tmp + ": " + ec.message());
  }
}

bool read_cache(const std::string &path, const OscillatorSpec &spec, Grid &grid,
                std::vector<EigenPair> &pairs)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    return false;
  }
  char magic[4];
  std::uint32_t version = 0, k = 0, n = 0;
  double beta = 0.0;
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0 || !Get(in, version) ||
      version != kVersion || !Get(in, beta) || !Get(in, k) || !Get(in, n))
  {
    return false;
  }
  if (beta != spec.beta || k != static_cast<std::uint32_t>(spec.num_modes) || n < 3 || n % 2 == 0)
  {
    return false;
  }
  Grid g;
  g.nodes.resize(n);
  std::vector<EigenPair> ps(k);
  if (!in.read(reinterpret_cast<char *>(g.nodes.data()), n * sizeof(double)))
  {
    return false;
  }
  for (auto &p : ps)
  {
    if (!Get(in, p.lambda))
    {
      return false;
    }
  }
  for (std::uint32_t j = 0; j < k; j++)
  {
    ps[j].k = static_cast<int>(j);
    ps[j].u.resize(n);
    if (!in.read(reinterpret_cast<char *>(ps[j].u.data()), n * sizeof(double)))
    {
      return false;
    }
  }
  for (auto &p : ps)
  {
    if (!Get(in, p.lambda_error))
    {
      return false;
    }
  }
  g.half_width = g.nodes.back();
  g.step = 2.0 * g.half_width / static_cast<double>(n - 1);
  for (auto &p : ps)
  {
    p.sign_changes = count_sign_changes(p.u);
    double d = 0.0;
    for (std::size_t i = 0; i < n / 2; i++)
    {
      d = std::max(d, std::abs(std::abs(p.u[i]) - std::abs(p.u[n - 1 - i])));
    }
    p.parity_defect = d;
  }
  grid = std::move(g);
  pairs = std::move(ps);
  return true;
}

}  // namespace nsa
