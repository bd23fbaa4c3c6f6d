#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace vpfp {

using Complex = std::complex<double>;

/// Real-to-complex FFT pair of fixed length, backed by FFTW.
///
/// Plans are created once (FFTW_ESTIMATE, unaligned) and executed through the
/// new-array interface, so one instance may be used from several threads at once.
/// Obtain instances through `fourier_for`.
class Fourier {
public:
    explicit Fourier(std::size_t n);
    ~Fourier();
    Fourier(const Fourier&) = delete;
    Fourier& operator=(const Fourier&) = delete;

    std::size_t size() const { return n_; }
    /// Number of stored modes, n / 2 + 1.
    std::size_t modes() const { return n_ / 2 + 1; }

    /// out[m] = sum_j in[j] exp(-2 pi i j m / n), m = 0 .. n/2.
    void forward(std::span<const double> in, std::span<Complex> out) const;
    /// Normalized inverse: inverse(forward(u)) == u. `in` is left untouched.
    void inverse(std::span<const Complex> in, std::span<double> out) const;

private:
    std::size_t n_;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

/// Process-wide cached transform of length n (thread-safe).
const Fourier& fourier_for(std::size_t n);

/// Angular wavenumber of stored mode m on a period of length L.
inline double wavenumber(std::size_t m, double length)
{
    return 2.0 * 3.14159265358979323846 * static_cast<double>(m) / length;
}

}  // namespace vpfp
