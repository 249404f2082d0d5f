#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <new>

#include "flashsample/grouped.hpp"

// Counts live heap bytes so the online grouped sampler's footprint can be measured.
namespace {

std::atomic<std::size_t> g_live{0};
std::atomic<std::size_t> g_peak{0};

struct Header {
  std::size_t size;
  std::size_t pad;
};

void* counted_alloc(std::size_t n) {
  auto* h = static_cast<Header*>(std::malloc(sizeof(Header) + n));
  if (h == nullptr) throw std::bad_alloc();
  h->size = n;
  const std::size_t live = g_live.fetch_add(n) + n;
  std::size_t peak = g_peak.load();
  while (live > peak && !g_peak.compare_exchange_weak(peak, live)) {
  }
  return h + 1;
}

void counted_free(void* p) noexcept {
  if (p == nullptr) return;
  auto* h = static_cast<Header*>(p) - 1;
  g_live.fetch_sub(h->size);
  std::free(h);
}

std::size_t peak_extra(const auto& fn) {
  const std::size_t base = g_live.load();
  g_peak.store(base);
  fn();
  return g_peak.load() - base;
}

}  // namespace

void* operator new(std::size_t n) { return counted_alloc(n); }
void* operator new[](std::size_t n) { return counted_alloc(n); }
void operator delete(void* p) noexcept { counted_free(p); }
void operator delete[](void* p) noexcept { counted_free(p); }
void operator delete(void* p, std::size_t) noexcept { counted_free(p); }
void operator delete[](void* p, std::size_t) noexcept { counted_free(p); }

using namespace flashsample;

TEST(Alloc, OnlineGroupedPeakIsIndependentOfVocab) {
  constexpr std::size_t g = 64;
  std::size_t peaks[2];
  const std::size_t vocabs[2] = {10000, 1000000};
  for (int k = 0; k < 2; ++k) {
    std::vector<double> row(vocabs[k]);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = static_cast<double>(i % 97) / 50.0;
    peaks[k] = peak_extra([&] { (void)online_group_sample(row, {}, RngKey{1}, g); });
  }
  EXPECT_EQ(peaks[0], peaks[1]);
  EXPECT_LE(peaks[1], g * sizeof(double) + 256);
}

TEST(Alloc, ParallelGroupedGrowsWithVocab) {
  // the parallel variant holds a transformed copy of the row, so it is the control
  std::vector<double> row(200000, 0.0);
  const std::size_t peak = peak_extra([&] { (void)parallel_group_sample(row, {}, RngKey{1}, 64); });
  EXPECT_GE(peak, row.size() * sizeof(double));
}
