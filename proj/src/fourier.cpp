#include "vpfp/fourier.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "vpfp/error.hpp"

namespace vpfp {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

}  // namespace

Fourier::Fourier(std::size_t n) : n_(n)
{
    if (n < 2) throw InvalidArgument("Fourier: length must be at least 2");
    std::lock_guard lock(planner_mutex());
    double* real = fftw_alloc_real(n);
    fftw_complex* spec = fftw_alloc_complex(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, spec, flags);
    inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, real, flags);
    fftw_free(real);
    fftw_free(spec);
    if (!forward_plan_ || !inverse_plan_) throw Error("Fourier: FFTW planning failed");
}

Fourier::~Fourier()
{
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void Fourier::forward(std::span<const double> in, std::span<Complex> out) const
{
    // r2c out-of-place transforms preserve their input.
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
}

void Fourier::inverse(std::span<const Complex> in, std::span<double> out) const
{
    // c2r destroys its input; work on a per-thread copy.
    thread_local std::vector<Complex> scratch;
    scratch.assign(in.begin(), in.end());
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                         reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& x : out) x *= scale;
}

const Fourier& fourier_for(std::size_t n)
{
    planner_mutex();  // must outlive the cache below
    static std::mutex cache_mutex;
    static std::map<std::size_t, std::unique_ptr<Fourier>> cache;
    std::lock_guard lock(cache_mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Fourier>(n);
    return *slot;
}

}  // namespace vpfp
