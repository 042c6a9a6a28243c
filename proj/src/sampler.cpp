#include "gms/sampler.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>

namespace gms {

namespace {

// Chambers-Mallows-Stuck variate with char fn exp(-|xi|^alpha) (symmetric)
// or the totally skewed variant used for subordination.
double cms_symmetric(double alpha, double v, double w) {
  if (std::abs(alpha - 1.0) < 1e-12) return std::tan(v);
  const double s = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha);
  return s * std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

double cms_positive(double alpha, double v, double w) {
  // skew beta = 1, alpha in (0,1); shift makes the support positive
  const double b = std::atan(std::tan(pi * alpha / 2.0)) / alpha;  // = pi/2 here
  const double sc = std::pow(1.0 + std::pow(std::tan(pi * alpha / 2.0), 2.0), 0.5 / alpha);
  const double s = sc * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha);
  return s * std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
}

std::pair<double, double> angle_exp(const rng::Stream& st, std::uint64_t index,
                                    std::uint32_t slot) {
  auto [u1, u2] = st.u01_pair(index, slot);
  const double v = pi * (u1 - 0.5) * (1.0 - 1e-15);  // keep cos(v) > 0
  const double w = -std::log(st.u01(index, slot + 1));
  (void)u2;
  return {v, w};
}

class GaussianSampler final : public Sampler {
 public:
  GaussianSampler(Vec mean, Mat cov) : mean_(std::move(mean)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(cov);
    root_ = es.eigenvectors() *
            es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  int dim() const override { return int(mean_.size()); }
  Vec draw(const rng::Stream& st, std::uint64_t index, std::uint32_t slot) const override {
    const int d = dim();
    Vec z(d);
    for (int j = 0; j < d; j += 2) {
      auto [g1, g2] = st.gaussian_pair(index, slot + j / 2);
      z[j] = g1;
      if (j + 1 < d) z[j + 1] = g2;
    }
    return mean_ + root_ * z;
  }

 private:
  Vec mean_;
  Mat root_;
};

class StableSampler final : public Sampler {
 public:
  StableSampler(int dim, double alpha, double scale) : d_(dim), alpha_(alpha), scale_(scale) {}
  int dim() const override { return d_; }
  Vec draw(const rng::Stream& st, std::uint64_t index, std::uint32_t slot) const override {
    if (d_ == 1) {
      auto [v, w] = angle_exp(st, index, slot);
      return Vec::Constant(1, scale_ * cms_symmetric(alpha_, v, w));
    }
    const double a = one_sided_stable(st, index, slot, alpha_ / 2.0);
    Vec g(d_);
    for (int j = 0; j < d_; j += 2) {
      auto [g1, g2] = st.gaussian_pair(index, slot + 2 + j / 2);
      g[j] = g1;
      if (j + 1 < d_) g[j + 1] = g2;
    }
    return scale_ * std::sqrt(2.0 * a) * g;
  }

 private:
  int d_;
  double alpha_, scale_;
};

class LaplaceSampler final : public Sampler {
 public:
  explicit LaplaceSampler(double scale) : scale_(scale) {}
  int dim() const override { return 1; }
  Vec draw(const rng::Stream& st, std::uint64_t index, std::uint32_t slot) const override {
    const double u = st.u01(index, slot) - 0.5;
    const double t = std::max(1.0 - 2.0 * std::abs(u), 1e-300);
    return Vec::Constant(1, -scale_ * sgn(u) * std::log(t));
  }

 private:
  double scale_;
};

class DiracSampler final : public Sampler {
 public:
  explicit DiracSampler(Vec point) : point_(std::move(point)) {}
  int dim() const override { return int(point_.size()); }
  Vec draw(const rng::Stream&, std::uint64_t, std::uint32_t) const override { return point_; }
  std::uint32_t slot_span() const override { return 1; }

 private:
  Vec point_;
};

class ConvolutionSampler final : public Sampler {
 public:
  explicit ConvolutionSampler(std::vector<SamplerPtr> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw ConfigError("empty convolution");
    span_ = 0;
    for (const auto& p : parts_) {
      if (p->dim() != parts_[0]->dim()) throw ConfigError("convolution dimension mismatch");
      offsets_.push_back(span_);
      span_ += p->slot_span();
    }
  }
  int dim() const override { return parts_[0]->dim(); }
  std::uint32_t slot_span() const override { return span_; }
  Vec draw(const rng::Stream& st, std::uint64_t index, std::uint32_t slot) const override {
    Vec acc = parts_[0]->draw(st, index, slot + offsets_[0]);
    for (size_t k = 1; k < parts_.size(); ++k)
      acc += parts_[k]->draw(st, index, slot + offsets_[k]);
    return acc;
  }

 private:
  std::vector<SamplerPtr> parts_;
  std::vector<std::uint32_t> offsets_;
  std::uint32_t span_ = 0;
};

class GridSampler final : public Sampler {
 public:
  explicit GridSampler(std::shared_ptr<const GridMeasure> grid) : grid_(std::move(grid)) {}
  int dim() const override { return 1; }
  std::uint32_t slot_span() const override { return 1; }
  Vec draw(const rng::Stream& st, std::uint64_t index, std::uint32_t slot) const override {
    return Vec::Constant(1, grid_->quantile(st.u01(index, slot)));
  }

 private:
  std::shared_ptr<const GridMeasure> grid_;
};

class FunctionSampler final : public Sampler {
 public:
  FunctionSampler(int dim, std::uint32_t span,
                  std::function<Vec(const rng::Stream&, std::uint64_t, std::uint32_t)> fn)
      : d_(dim), span_(span), fn_(std::move(fn)) {}
  int dim() const override { return d_; }
  std::uint32_t slot_span() const override { return span_; }
  Vec draw(const rng::Stream& st, std::uint64_t index, std::uint32_t slot) const override {
    return fn_(st, index, slot);
  }

 private:
  int d_;
  std::uint32_t span_;
  std::function<Vec(const rng::Stream&, std::uint64_t, std::uint32_t)> fn_;
};

}  // namespace

double one_sided_stable(const rng::Stream& st, std::uint64_t index, std::uint32_t slot,
                        double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("one-sided index must lie in (0,1)");
  auto [v, w] = angle_exp(st, index, slot);
  return std::pow(std::cos(pi * alpha / 2.0), 1.0 / alpha) * cms_positive(alpha, v, w);
}

int poisson_count(const rng::Stream& st, std::uint64_t index, std::uint32_t slot, double mean) {
  if (mean < 0.0) throw ConfigError("Poisson mean must be nonnegative");
  if (mean > 256.0) throw NumericError("Poisson mean too large for inversion sampling");
  double u = st.u01(index, slot);
  double p = std::exp(-mean), cdf = p;
  int k = 0;
  while (u > cdf && k < 4000) {
    ++k;
    p *= mean / k;
    cdf += p;
  }
  return k;
}

SamplerPtr make_gaussian_sampler(Vec mean, Mat cov) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size())
    throw ConfigError("covariance dimension mismatch");
  return std::make_shared<GaussianSampler>(std::move(mean), std::move(cov));
}

SamplerPtr make_stable_sampler(int dim, double alpha, double scale) {
  if (dim < 1) throw ConfigError("dimension must be positive");
  if (!(alpha > 0.0) || !(alpha < 2.0)) throw ConfigError("stable index must lie in (0,2)");
  if (!(scale > 0.0)) throw ConfigError("scale must be positive");
  return std::make_shared<StableSampler>(dim, alpha, scale);
}

SamplerPtr make_laplace_sampler(double scale) {
  if (!(scale > 0.0)) throw ConfigError("scale must be positive");
  return std::make_shared<LaplaceSampler>(scale);
}

SamplerPtr make_dirac_sampler(Vec point) { return std::make_shared<DiracSampler>(std::move(point)); }

SamplerPtr make_convolution_sampler(std::vector<SamplerPtr> parts) {
  return std::make_shared<ConvolutionSampler>(std::move(parts));
}

SamplerPtr make_grid_sampler(std::shared_ptr<const GridMeasure> grid) {
  if (!grid) throw ConfigError("null grid");
  return std::make_shared<GridSampler>(std::move(grid));
}

SamplerPtr make_function_sampler(
    int dim, std::uint32_t slot_span,
    std::function<Vec(const rng::Stream&, std::uint64_t, std::uint32_t)> fn) {
  return std::make_shared<FunctionSampler>(dim, slot_span, std::move(fn));
}

}  // namespace gms
