#include "mbg/util.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace mbg {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose,
                          std::uint64_t index) {
  char buf[16];
  for (int i = 0; i < 8; ++i) buf[i] = char((base >> (8 * i)) & 0xff);
  for (int i = 0; i < 8; ++i) buf[8 + i] = char((index >> (8 * i)) & 0xff);
  std::uint64_t h = fnv1a64(purpose);
  h = fnv1a64(std::string_view(buf, 16), h);
  // avoid the all-zero seed corner
  return h ? h : 0x9e3779b97f4a7c15ull;
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
  if (n == 0) fail("uniform_int: n must be positive");
  // rejection sampling keeps the draw unbiased
  const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double RngStream::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1, u2;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * 3.14159265358979323846 * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("MBG_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

namespace {

// Minimal pool: workers pull block indices from a shared counter. Each block
// is processed entirely by one worker, so results keyed by block index are
// independent of scheduling.
class Pool {
 public:
  static Pool& instance() {
    static Pool p;
    return p;
  }

  void run(std::size_t n_blocks,
           const std::function<void(std::size_t)>& body) {
    if (n_blocks == 0) return;
    if (workers_.empty() || n_blocks == 1 || inside_pool()) {
      // nested calls degrade to serial; counters are not reentrant
      for (std::size_t b = 0; b < n_blocks; ++b) body(b);
      return;
    }
    inside_pool() = true;
    std::unique_lock lock(mu_);
    body_ = &body;
    next_ = 0;
    total_ = n_blocks;
    pending_ = n_blocks;
    ++generation_;
    cv_work_.notify_all();
    // the caller participates too
    work(lock);
    cv_done_.wait(lock, [&] { return pending_ == 0; });
    body_ = nullptr;
    inside_pool() = false;
  }

  static bool& inside_pool() {
    thread_local bool flag = false;
    return flag;
  }

 private:
  Pool() {
    const int n = worker_count() - 1;
    for (int i = 0; i < n; ++i) {
      workers_.emplace_back([this] { worker_loop(); });
    }
  }

  ~Pool() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
      cv_work_.notify_all();
    }
    for (auto& t : workers_) t.join();
  }

  void work(std::unique_lock<std::mutex>& lock) {
    while (next_ < total_) {
      const std::size_t b = next_++;
      lock.unlock();
      (*body_)(b);
      lock.lock();
      if (--pending_ == 0) cv_done_.notify_all();
    }
  }

  void worker_loop() {
    inside_pool() = true;
    std::unique_lock lock(mu_);
    std::uint64_t seen = 0;
    for (;;) {
      cv_work_.wait(lock, [&] { return stop_ || (body_ && generation_ != seen && next_ < total_); });
      if (stop_) return;
      seen = generation_;
      work(lock);
    }
  }

  std::mutex mu_;
  std::condition_variable cv_work_, cv_done_;
  std::vector<std::thread> workers_;
  const std::function<void(std::size_t)>* body_ = nullptr;
  std::size_t next_ = 0, total_ = 0, pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace

void parallel_blocks(std::size_t n, std::size_t block,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  if (block == 0) block = 1;
  const std::size_t n_blocks = (n + block - 1) / block;
  Pool::instance().run(n_blocks, [&](std::size_t b) {
    const std::size_t first = b * block;
    fn(first, std::min(first + block, n));
  });
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers = static_cast<std::size_t>(worker_count());
  // a few blocks per worker smooths imbalance without hurting determinism
  const std::size_t block = std::max<std::size_t>(1, n / (workers * 4));
  parallel_blocks(n, block, fn);
}

}  // namespace mbg
