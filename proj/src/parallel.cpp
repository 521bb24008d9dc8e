#include "ctc/parallel.hpp"

#include <cstdlib>
#include <string>

namespace ctc {

int worker_count() {
  if (const char* env = std::getenv("CTC_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w > 0) return w;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

template <class T>
T pairwise(const T* x, std::size_t n) {
  if (n == 0) return T{};
  if (n <= 8) {
    T s = x[0];
    for (std::size_t i = 1; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise(x, h) + pairwise(x + h, n - h);
}

}  // namespace

double pairwise_sum(const double* x, std::size_t n) { return pairwise(x, n); }
std::complex<double> pairwise_sum(const std::complex<double>* x, std::size_t n) { return pairwise(x, n); }

}  // namespace ctc
