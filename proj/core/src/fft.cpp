#include "dbmid/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace dbmid {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is. We keep
// one plan pair per shape and reuse the buffers they were planned with, so the
// whole transform stays under the lock. Transforms here are short relative to
// the work around them; contention is not a concern.
struct PlanEntry {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
};

std::mutex g_mutex;
std::map<std::pair<int, int>, PlanEntry>& plan_cache() {
    static std::map<std::pair<int, int>, PlanEntry> cache;
    return cache;
}

PlanEntry& entry_for(int h, int w) {
    auto& cache = plan_cache();
    auto it = cache.find({h, w});
    if (it != cache.end()) return it->second;
    PlanEntry e;
    e.real = fftw_alloc_real(size_t(h) * w);
    e.spec = fftw_alloc_complex(size_t(h) * spectrum_width(w));
    // FFTW_ESTIMATE keeps planning deterministic (no runtime measurement).
    e.fwd = fftw_plan_dft_r2c_2d(h, w, e.real, e.spec, FFTW_ESTIMATE);
    e.inv = fftw_plan_dft_c2r_2d(h, w, e.spec, e.real, FFTW_ESTIMATE);
    return cache.emplace(std::make_pair(h, w), e).first->second;
}

}  // namespace

std::vector<std::complex<double>> fft2_r2c(const double* in, int h, int w) {
    std::lock_guard<std::mutex> lock(g_mutex);
    PlanEntry& e = entry_for(h, w);
    std::memcpy(e.real, in, size_t(h) * w * sizeof(double));
    fftw_execute(e.fwd);
    const size_t n = size_t(h) * spectrum_width(w);
    std::vector<std::complex<double>> out(n);
    std::memcpy(out.data(), e.spec, n * sizeof(fftw_complex));
    return out;
}

void ifft2_c2r(const std::complex<double>* in, int h, int w, double* out) {
    std::lock_guard<std::mutex> lock(g_mutex);
    PlanEntry& e = entry_for(h, w);
    const size_t n = size_t(h) * spectrum_width(w);
    std::memcpy(e.spec, in, n * sizeof(fftw_complex));
    fftw_execute(e.inv);
    const double scale = 1.0 / (double(h) * double(w));
    const size_t total = size_t(h) * w;
    for (size_t i = 0; i < total; ++i) out[i] = e.real[i] * scale;
}

}  // namespace dbmid
