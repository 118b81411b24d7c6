#ifndef BLAB_PARALLEL_HPP
#define BLAB_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace blab {

namespace detail {
inline std::atomic<unsigned>& thread_setting()
{
  static std::atomic<unsigned> threads{1};
  return threads;
}
} // namespace detail

/// Worker count used by parallel_for. Results never depend on it.
inline unsigned thread_count()
{
  return detail::thread_setting().load();
}

inline void set_thread_count(unsigned threads)
{
  detail::thread_setting().store(std::max(1u, threads));
}

/// Calls body(i) for i in [0, count). Tasks are claimed dynamically, so
/// bodies must write to disjoint, index-addressed outputs; callers reduce
/// those outputs in index order afterwards.
template <typename Body>
void parallel_for(std::size_t count, Body&& body)
{
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(thread_count(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count)
        return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 1; t < workers; ++t)
    pool.emplace_back(run);
  run();
  for (auto& th : pool)
    th.join();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace blab

#endif
