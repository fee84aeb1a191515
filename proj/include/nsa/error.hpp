// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace nsa
{

// Precondition or configuration violations. Maps to CLI exit code 1.
class InvalidArgument : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// A numerical stage could not produce a trustworthy result. Maps to CLI exit code 2.
class NumericalFailure : public std::runtime_error
{
public:
  NumericalFailure(std::string stage, const std::string &what)
    : std::runtime_error(stage + ": " + what), stage_(std::move(stage))
  {
  }

  const std::string &stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

// The grid truncates a weighted eigenfunction that has not yet decayed.
class TruncationError : public NumericalFailure
{
public:
  TruncationError(int k, const std::string &what)
    : NumericalFailure("truncation", what), k_(k)
  {
  }

  // First mode index at which the grid must grow.
  int mode() const noexcept { return k_; }

private:
  int k_;
};

namespace detail
{

[[noreturn]] inline void Fail(const std::string &msg)
{
  throw InvalidArgument(msg);
}

}  // namespace detail

#define NSA_REQUIRE(cond, msg)            \
  do                                      \
  {                                       \
    if (!(cond))                          \
    {                                     \
      ::nsa::detail::Fail(msg);           \
    }                                     \
  } while (false)

}  // namespace nsa
