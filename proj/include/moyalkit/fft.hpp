#pragma once

// Thin RAII layer over FFTW: plans are built once per (shape, direction)
// under a lock and executed on arbitrary buffers (FFTW_UNALIGNED), which is
// safe to call concurrently.

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace moyalkit::fft {

enum class Direction { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

namespace detail {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(const std::vector<int>& shape, Direction dir) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(shape, static_cast<int>(dir));
        if (auto it = plans_.find(key); it != plans_.end()) return it->second.get();
        std::size_t total = 1;
        for (int n : shape) total *= static_cast<std::size_t>(n);
        std::vector<std::complex<double>> scratch(total);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), buf, buf,
                                    static_cast<int>(dir), FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, PlanHandle(p));
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::vector<int>, int>, PlanHandle> plans_;
};

}  // namespace detail

// Unnormalized in-place DFT over a row-major array of the given shape.
inline void transform(std::vector<std::complex<double>>& data, const std::vector<int>& shape, Direction dir) {
    fftw_plan p = detail::PlanCache::instance().get(shape, dir);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, buf, buf);
}

}  // namespace moyalkit::fft
