#pragma once

#include <complex>
#include <memory>
#include <utility>
#include <vector>

#include "nlps/kernel.hpp"

namespace nlps {

enum class KernelComponent { J, DJX, DJY };

/// Periodic convolution against the sampled kernel grids through FFTs.
/// The output carries the Riemann weight cell_area, so it approximates the
/// integral convolution (J*f or dJ*f) on the torus. Any n >= 4 is supported.
///
/// A plan caches the forward transforms of the three kernel grids at
/// construction. convolve() allocates its own scratch, so one plan may be
/// used concurrently from several threads; results are bit-identical to the
/// sequential order.
class ConvolutionPlan {
public:
    explicit ConvolutionPlan(const KernelGrids& kg);
    ~ConvolutionPlan();

    ConvolutionPlan(ConvolutionPlan&&) noexcept;
    ConvolutionPlan& operator=(ConvolutionPlan&&) noexcept;
    ConvolutionPlan(const ConvolutionPlan&) = delete;
    ConvolutionPlan& operator=(const ConvolutionPlan&) = delete;

    const GridSpec& spec() const;

    Field convolve(const Field& f, KernelComponent which) const;

    /// Both gradient convolutions sharing one forward transform of f.
    /// Bit-identical to two separate convolve() calls.
    std::pair<Field, Field> convolve_gradient_pair(const Field& f) const;

    const std::vector<std::complex<double>>& spectrum(KernelComponent which) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

inline ConvolutionPlan plan_convolution(const KernelGrids& kg) { return ConvolutionPlan(kg); }

inline Field convolve(const ConvolutionPlan& plan, const Field& f, KernelComponent which) {
    return plan.convolve(f, which);
}

/// O(N^4) direct summation used as the oracle for the FFT path:
///   out[i,j] = cell_area * sum_{p,q} kernel[wrap(i-p), wrap(j-q)] * f[p,q].
Field convolve_direct(const Field& f, const Field& kernel);

}  // namespace nlps
