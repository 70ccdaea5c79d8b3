#include "popsim/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace popsim {

unsigned configured_threads() {
  if (const char* env = std::getenv("POPSIM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::uint64_t count, unsigned threads, const std::function<void(std::uint64_t)>& body) {
  if (count == 0) return;
  const std::uint64_t workers = std::min<std::uint64_t>(std::max(1u, threads), count);
  if (workers == 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }

  struct Failure {
    std::uint64_t index = std::numeric_limits<std::uint64_t>::max();
    std::exception_ptr error;
  };
  std::vector<Failure> failures(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = count * w / workers;
      const std::uint64_t end = count * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        for (std::uint64_t i = begin; i < end; ++i) {
          try {
            body(i);
          } catch (...) {
            failures[w] = {i, std::current_exception()};
            return;
          }
        }
      });
    }
  }
  for (const auto& f : failures)
    if (f.error) std::rethrow_exception(f.error);
}

}  // namespace popsim
