#include "nlps/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <string>

namespace nlps {

namespace {

// The FFTW planner is not thread-safe; plan creation/destruction is a
// one-time cost per grid, so a global lock is fine.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace

struct ConvolutionPlan::Impl {
    GridSpec spec;
    std::vector<std::complex<double>> spec_j, spec_djx, spec_djy;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }

    std::vector<std::complex<double>> forward(const Field& f) const {
        const std::size_t n2 = f.size();
        std::vector<std::complex<double>> in(n2), out(n2);
        for (std::size_t k = 0; k < n2; ++k) in[k] = f.data[k];
        fftw_execute_dft(fwd, as_fftw(in.data()), as_fftw(out.data()));
        return out;
    }

    // cell_area * IFFT(fhat . khat), real part, with the imaginary residue
    // checked against input_scale before being discarded.
    Field inverse_product(const std::vector<std::complex<double>>& fhat,
                          const std::vector<std::complex<double>>& khat,
                          double input_scale) const {
        const std::size_t n2 = fhat.size();
        const double scale = spec.cell_area / static_cast<double>(n2);
        std::vector<std::complex<double>> prod(n2), out(n2);
        for (std::size_t k = 0; k < n2; ++k) prod[k] = fhat[k] * khat[k] * scale;
        fftw_execute_dft(bwd, as_fftw(prod.data()), as_fftw(out.data()));

        double imag_max = 0.0;
        for (std::size_t k = 0; k < n2; ++k) imag_max = std::max(imag_max, std::fabs(out[k].imag()));
        if (imag_max > 1e-10 * input_scale) {
            throw std::runtime_error(
                "convolution imaginary residue " + std::to_string(imag_max) +
                " exceeds 1e-10 * max|f| = " + std::to_string(1e-10 * input_scale) +
                "; kernel symmetry corrupted");
        }

        Field result(spec);
        for (std::size_t k = 0; k < n2; ++k) result.data[k] = out[k].real();
        return result;
    }
};

ConvolutionPlan::ConvolutionPlan(const KernelGrids& kg) : impl_(std::make_unique<Impl>()) {
    impl_->spec = kg.j_grid.spec;
    const int n = impl_->spec.n;
    const std::size_t n2 = static_cast<std::size_t>(n) * n;

    std::vector<std::complex<double>> in(n2), out(n2);
    {
        // FFTW_ESTIMATE picks the algorithm from heuristics only, so the plan
        // (and therefore every transform result) is deterministic;
        // FFTW_UNALIGNED lets fftw_execute_dft run on any scratch buffers.
        std::lock_guard<std::mutex> lock(planner_mutex());
        impl_->fwd = fftw_plan_dft_2d(n, n, as_fftw(in.data()), as_fftw(out.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        impl_->bwd = fftw_plan_dft_2d(n, n, as_fftw(in.data()), as_fftw(out.data()),
                                      FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    if (!impl_->fwd || !impl_->bwd) {
        throw std::runtime_error("FFTW failed to create plans for n = " + std::to_string(n));
    }

    impl_->spec_j = impl_->forward(kg.j_grid);
    impl_->spec_djx = impl_->forward(kg.djx_grid);
    impl_->spec_djy = impl_->forward(kg.djy_grid);
}

ConvolutionPlan::~ConvolutionPlan() = default;
ConvolutionPlan::ConvolutionPlan(ConvolutionPlan&&) noexcept = default;
ConvolutionPlan& ConvolutionPlan::operator=(ConvolutionPlan&&) noexcept = default;

const GridSpec& ConvolutionPlan::spec() const { return impl_->spec; }

const std::vector<std::complex<double>>& ConvolutionPlan::spectrum(KernelComponent which) const {
    switch (which) {
        case KernelComponent::J: return impl_->spec_j;
        case KernelComponent::DJX: return impl_->spec_djx;
        default: return impl_->spec_djy;
    }
}

Field ConvolutionPlan::convolve(const Field& f, KernelComponent which) const {
    if (!(f.spec == impl_->spec)) {
        throw ConfigError("convolution plan grid (n=" + std::to_string(impl_->spec.n) +
                          ") does not match field grid (n=" + std::to_string(f.spec.n) + ")");
    }
    const auto fhat = impl_->forward(f);
    return impl_->inverse_product(fhat, spectrum(which), max_abs(f.data));
}

std::pair<Field, Field> ConvolutionPlan::convolve_gradient_pair(const Field& f) const {
    if (!(f.spec == impl_->spec)) {
        throw ConfigError("convolution plan grid (n=" + std::to_string(impl_->spec.n) +
                          ") does not match field grid (n=" + std::to_string(f.spec.n) + ")");
    }
    const auto fhat = impl_->forward(f);
    const double scale = max_abs(f.data);
    Field gx = impl_->inverse_product(fhat, impl_->spec_djx, scale);
    Field gy = impl_->inverse_product(fhat, impl_->spec_djy, scale);
    return {std::move(gx), std::move(gy)};
}

Field convolve_direct(const Field& f, const Field& kernel) {
    if (!(f.spec == kernel.spec)) {
        throw ConfigError("convolve_direct: field and kernel grids differ");
    }
    const int n = f.spec.n;
    Field out(f.spec);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int q = 0; q < n; ++q) {
                const int kj = wrap_index(j - q, n);
                for (int p = 0; p < n; ++p) {
                    acc += kernel.at(wrap_index(i - p, n), kj) * f.at(p, q);
                }
            }
            out.at(i, j) = f.spec.cell_area * acc;
        }
    }
    return out;
}

}  // namespace nlps
