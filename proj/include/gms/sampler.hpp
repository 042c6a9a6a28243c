#pragma once

// Deterministic counter-indexed samplers. A draw is a pure function of
// (stream, index), so Monte Carlo runs are reproducible under any worker
// schedule. Each sampler owns a span of Philox slots; convolution factors
// get disjoint slot ranges.

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "gms/common.hpp"
#include "gms/grid_measure.hpp"
#include "gms/rng.hpp"

namespace gms {

class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual int dim() const = 0;
  virtual Vec draw(const rng::Stream& st, std::uint64_t index, std::uint32_t slot_base) const = 0;
  virtual std::uint32_t slot_span() const { return 4096; }

  Vec operator()(const rng::Stream& st, std::uint64_t index) const { return draw(st, index, 0); }
};

using SamplerPtr = std::shared_ptr<const Sampler>;

SamplerPtr make_gaussian_sampler(Vec mean, Mat cov);
// isotropic symmetric alpha-stable, char fn exp(-(scale |xi|)^alpha)
SamplerPtr make_stable_sampler(int dim, double alpha, double scale);
SamplerPtr make_laplace_sampler(double scale);
SamplerPtr make_dirac_sampler(Vec point);
SamplerPtr make_convolution_sampler(std::vector<SamplerPtr> parts);
// inverse-CDF draw from a tabulated density (dimension 1)
SamplerPtr make_grid_sampler(std::shared_ptr<const GridMeasure> grid);
// escape hatch for composite laws built out of the primitives above
SamplerPtr make_function_sampler(
    int dim, std::uint32_t slot_span,
    std::function<Vec(const rng::Stream&, std::uint64_t, std::uint32_t)> fn);

// Standard positive alpha-stable variate with Laplace transform
// exp(-lambda^alpha), alpha in (0,1). Uses two slots.
double one_sided_stable(const rng::Stream& st, std::uint64_t index, std::uint32_t slot,
                        double alpha);

// Poisson count by CDF inversion from a single uniform.
int poisson_count(const rng::Stream& st, std::uint64_t index, std::uint32_t slot, double mean);

}  // namespace gms
