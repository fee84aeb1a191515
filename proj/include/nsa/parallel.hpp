// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nsa
{

// Worker count: NSA_THREADS if set, else the hardware concurrency.
inline unsigned default_threads()
{
  if (const char *env = std::getenv("NSA_THREADS"))
  {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1)
    {
      return static_cast<unsigned>(n);
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls f(i) for i in [0, n) on a small pool. Each index must write only its own output
// slot, so results do not depend on scheduling. The exception from the lowest failing
// index that ran is rethrown.
template <typename F>
void parallel_for(std::size_t n, F &&f, unsigned threads = default_threads())
{
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1)
  {
    for (std::size_t i = 0; i < n; i++)
    {
      f(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::size_t error_index = n;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; t++)
  {
    pool.emplace_back([&]
    {
      for (std::size_t i = next++; i < n; i = next++)
      {
        try
        {
          f(i);
        }
        catch (...)
        {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (i < error_index)
          {
            error = std::current_exception();
            error_index = i;
          }
          next = n;
        }
      }
    });
  }
  for (auto &th : pool)
  {
    th.join();
  }
  if (error)
  {
    std::rethrow_exception(error);
  }
}

}  // namespace nsa
