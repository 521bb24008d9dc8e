#pragma once
#include <atomic>
#include <complex>
#include <thread>
#include <vector>

namespace ctc {

// Worker count from CTC_WORKERS, else hardware concurrency.
int worker_count();

// f(i) for i in [0, n); results land in index order whatever the schedule.
template <class T, class F>
std::vector<T> parallel_map(int n, F f, int workers = 0) {
  std::vector<T> out(n > 0 ? n : 0);
  if (n <= 0) return out;
  if (workers <= 0) workers = worker_count();
  workers = std::min(workers, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) out[i] = f(i);
    });
  for (auto& t : pool) t.join();
  return out;
}

double pairwise_sum(const double* x, std::size_t n);
std::complex<double> pairwise_sum(const std::complex<double>* x, std::size_t n);

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }
inline std::complex<double> pairwise_sum(const std::vector<std::complex<double>>& v) {
  return pairwise_sum(v.data(), v.size());
}

}  // namespace ctc
