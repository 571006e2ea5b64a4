#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "hbk/error.hpp"

namespace hbk {

// Thin FFTW wrapper for batched d-dimensional complex transforms on N^d grids.
// Plans are created once per shape under a global mutex (FFTW planning is not
// thread safe) and executed with the new-array interface, which is. Planning
// uses FFTW_ESTIMATE so the chosen algorithm, and hence every bit of output,
// does not depend on timing.
class FftPlanCache {
public:
    static FftPlanCache& instance() {
        static FftPlanCache cache;
        return cache;
    }

    fftw_plan get(int d, int n, int howmany, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(d, n, howmany, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        int dims[3] = {n, n, n};
        std::size_t total = 1;
        for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
        total *= static_cast<std::size_t>(howmany);
        fftw_complex* buf = fftw_alloc_complex(total);
        fftw_plan p = fftw_plan_many_dft(d, dims, howmany, buf, nullptr, 1, static_cast<int>(total / howmany),
                                         buf, nullptr, 1, static_cast<int>(total / howmany), sign,
                                         FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        if (!p) throw Error("fft", "plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

    ~FftPlanCache() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }

private:
    FftPlanCache() = default;
    std::mutex mutex_;
    std::map<std::tuple<int, int, int, int>, fftw_plan> plans_;
};

/// In-place batched transform: `data` holds `howmany` contiguous N^d blocks,
/// row-major with the last axis fastest. sign = FFTW_FORWARD uses e^{-i...}.
/// Unnormalized in both directions.
inline void fft_inplace(std::vector<std::complex<double>>& data, int d, int n, int howmany, int sign) {
    fftw_plan p = FftPlanCache::instance().get(d, n, howmany, sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, ptr, ptr);
}

inline void fft_forward(std::vector<std::complex<double>>& data, int d, int n, int howmany = 1) {
    fft_inplace(data, d, n, howmany, FFTW_FORWARD);
}

inline void fft_backward(std::vector<std::complex<double>>& data, int d, int n, int howmany = 1) {
    fft_inplace(data, d, n, howmany, FFTW_BACKWARD);
}

}  // namespace hbk
