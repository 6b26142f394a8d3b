#include "peglue/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace peglue {

int thread_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("PEGLUE_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) hw = std::min(hw, cap);
    } catch (...) {
      // unparsable value: ignore the cap
    }
  }
  return hw;
}

void parallel_for(long n, const std::function<void(long, long)>& fn) {
  const int t = static_cast<int>(std::min<long>(thread_count(), std::max<long>(n / 256, 1)));
  if (t <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  const long chunk = (n + t - 1) / t;
  for (int i = 0; i < t; ++i) {
    const long b = i * chunk, e = std::min(n, b + chunk);
    if (b < e)
      pool.emplace_back([&fn, &errors, i, b, e] {
        try {
          fn(b, e);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace peglue
