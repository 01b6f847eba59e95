#include "nudge/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace nudge {

namespace {

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

// Planning is not thread-safe in FFTW, execution with the new-array interface
// is. Plans are created once per size under the lock and never destroyed.
// FFTW_ESTIMATE keeps the chosen algorithm, and therefore the bits, stable
// between runs.
const PlanPair& plans_for(int n) {
    static std::mutex mutex;
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) {
        return it->second;
    }
    const auto count = static_cast<std::size_t>(n) * n;
    auto* in = fftw_alloc_complex(count);
    auto* out = fftw_alloc_complex(count);
    PlanPair pair;
    pair.forward = fftw_plan_dft_2d(n, n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    pair.backward = fftw_plan_dft_2d(n, n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    if (pair.forward == nullptr || pair.backward == nullptr) {
        throw std::runtime_error("FFTW planning failed for n=" + std::to_string(n));
    }
    return cache.emplace(n, pair).first->second;
}

struct FftwDeleter {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

// Per-thread SIMD-aligned buffers, so the plans never need FFTW_UNALIGNED.
struct Scratch {
    std::size_t count = 0;
    std::unique_ptr<fftw_complex[], FftwDeleter> in;
    std::unique_ptr<fftw_complex[], FftwDeleter> out;

    void reserve(std::size_t n) {
        if (n != count) {
            in.reset(fftw_alloc_complex(n));
            out.reset(fftw_alloc_complex(n));
            count = n;
        }
    }
    Complex* in_data() { return reinterpret_cast<Complex*>(in.get()); }
    Complex* out_data() { return reinterpret_cast<Complex*>(out.get()); }
};

Scratch& scratch_for(const Grid& grid) {
    thread_local Scratch scratch;
    scratch.reserve(grid.size());
    return scratch;
}

void check_size(const Grid& grid, std::size_t got, const char* what) {
    if (got != grid.size()) {
        throw std::invalid_argument(std::string(what) + ": expected " +
                                    std::to_string(grid.size()) + " values, got " +
                                    std::to_string(got));
    }
}

}  // namespace

std::vector<Complex> forward_scalar(const Grid& grid, std::span<const double> samples) {
    check_size(grid, samples.size(), "forward transform");
    auto& buf = scratch_for(grid);
    std::copy(samples.begin(), samples.end(), buf.in_data());
    fftw_execute_dft(plans_for(grid.n()).forward, buf.in.get(), buf.out.get());
    const double scale = 1.0 / static_cast<double>(grid.size());
    std::vector<Complex> out(buf.out_data(), buf.out_data() + grid.size());
    for (auto& c : out) {
        c *= scale;
    }
    return out;
}

std::vector<double> backward_scalar(const Grid& grid, std::span<const Complex> coeffs) {
    check_size(grid, coeffs.size(), "backward transform");
    auto& buf = scratch_for(grid);
    std::copy(coeffs.begin(), coeffs.end(), buf.in_data());
    fftw_execute_dft(plans_for(grid.n()).backward, buf.in.get(), buf.out.get());
    std::vector<double> samples(grid.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i] = buf.out_data()[i].real();
    }
    return samples;
}

// Both components are real, so one complex transform of x + i*y carries them.
PhysicalField to_physical(const SpectralField& f) {
    const Grid& grid = f.grid();
    auto& buf = scratch_for(grid);
    const Complex i_unit(0.0, 1.0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        buf.in_data()[j] = f.x()[j] + i_unit * f.y()[j];
    }
    fftw_execute_dft(plans_for(grid.n()).backward, buf.in.get(), buf.out.get());
    PhysicalField p(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        p.x[j] = buf.out_data()[j].real();
        p.y[j] = buf.out_data()[j].imag();
    }
    return p;
}

SpectralField from_physical(const PhysicalField& samples) {
    return from_physical(samples, samples.grid);
}

SpectralField from_physical(const PhysicalField& samples, const Grid& grid) {
    if (!(samples.grid == grid) || samples.x.size() != grid.size() ||
        samples.y.size() != grid.size()) {
        throw std::invalid_argument("from_physical: sample layout does not match grid of size " +
                                    std::to_string(grid.n()));
    }
    auto& buf = scratch_for(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        buf.in_data()[j] = Complex(samples.x[j], samples.y[j]);
    }
    fftw_execute_dft(plans_for(grid.n()).forward, buf.in.get(), buf.out.get());
    // Split Z = X + iY using X(k) = (Z(k) + conj Z(-k)) / 2, Y(k) = (Z(k) - conj Z(-k)) / 2i.
    const int n = grid.n();
    const double half_scale = 0.5 / static_cast<double>(grid.size());
    const Complex* z = buf.out_data();
    SpectralField f(grid);
    for (int r = 0; r < n; ++r) {
        const int rm = (n - r) % n;
        for (int c = 0; c < n; ++c) {
            const int cm = (n - c) % n;
            const Complex a = z[static_cast<std::size_t>(r) * n + c];
            const Complex b = std::conj(z[static_cast<std::size_t>(rm) * n + cm]);
            const auto idx = static_cast<std::size_t>(r) * n + c;
            f.x()[idx] = (a + b) * half_scale;
            f.y()[idx] = Complex(0.0, -1.0) * (a - b) * half_scale;
        }
    }
    return f;
}

}  // namespace nudge
