#include "projsmooth/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "projsmooth/parallel.hpp"

namespace projsmooth {

namespace {

double glue(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

}  // namespace

double smooth_transition(double t) {
  const double a = glue(1.0 - t);
  const double b = glue(t);
  return a / (a + b);
}

MollifierKernel::MollifierKernel(int dim, double plateau) : dim_(dim), plateau_(plateau) {
  if (dim != 1 && dim != 2) throw ValidationError("kernel dimension must be 1 or 2");
  if (!(plateau > 0.0 && plateau < 1.0))
    throw ValidationError("kernel plateau radius must lie in (0, 1)");

  int panels = 4096;
  double previous = integral(panels);
  for (int attempt = 0; attempt < 12; ++attempt) {
    panels *= 2;
    const double current = integral(panels);
    const bool converged = std::abs(current - previous) <= 1e-10 * std::abs(current);
    previous = current;
    if (converged) break;
  }
  norm_const_ = 1.0 / previous;
}

double MollifierKernel::shape(double r) const {
  r = std::abs(r);
  if (r <= plateau_) return 1.0;
  if (r >= 1.0) return 0.0;
  return smooth_transition((r - plateau_) / (1.0 - plateau_));
}

double MollifierKernel::integral(int panels) const {
  // Radial measure: 2 dr on the line, 2 pi r dr in the plane.
  auto integrand = [this](double r) {
    const double k = (*this)(r);
    return dim_ == 1 ? 2.0 * k : 2.0 * std::numbers::pi * r * k;
  };
  const double h = 1.0 / panels;
  double sum = integrand(0.0) + integrand(1.0);
  for (int i = 1; i < panels; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * h);
  return sum * h / 3.0;
}

nlohmann::json DiscreteStencil::to_json() const {
  nlohmann::json offs = nlohmann::json::array();
  for (const auto& o : offsets) {
    nlohmann::json entry = nlohmann::json::array();
    for (int d = 0; d < grid.dim(); ++d) entry.push_back(o[d]);
    offs.push_back(entry);
  }
  return {{"epsilon", epsilon}, {"offsets", offs}, {"weights", weights}};
}

DiscreteStencil discretize(const MollifierKernel& kernel, const TorusGrid& grid, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw ValidationError("smoothing radius must lie in (0, 1/2), got " + std::to_string(epsilon));
  if (kernel.dim() != grid.dim()) throw ValidationError("kernel and grid dimensions differ");

  DiscreteStencil stencil{grid, epsilon, {}, {}};
  const int dim = grid.dim();
  const bool isotropic = dim == 1 || grid.size(0) == grid.size(1);

  std::array<int, 2> reach{0, 0};
  for (int d = 0; d < dim; ++d) reach[d] = static_cast<int>(std::ceil(epsilon * grid.size(d)));

  std::vector<double> raw;
  for (int a = -reach[0]; a <= reach[0]; ++a) {
    for (int b = -reach[1]; b <= reach[1]; ++b) {
      // Length of the offset itself; epsilon < 1/2 keeps it below the wrap.
      double length;
      if (isotropic) {
        length = std::sqrt(static_cast<double>(a * a + b * b)) / grid.size(0);
      } else {
        const double x = static_cast<double>(a) / grid.size(0);
        const double y = static_cast<double>(b) / grid.size(1);
        length = std::sqrt(x * x + y * y);
      }
      if (!(length < epsilon)) continue;
      stencil.offsets.push_back({a, b});
      raw.push_back(kernel(length / epsilon));
    }
  }
  if (stencil.offsets.size() <= 1)
    throw ValidationError("smoothing radius " + std::to_string(epsilon) +
                          " is below one grid step; stencil would be empty");

  double total = 0.0;
  for (double w : raw) total += w;
  stencil.weights.reserve(raw.size());
  for (double w : raw) stencil.weights.push_back(w / total);
  return stencil;
}

MatrixField smooth(const MatrixField& f, const DiscreteStencil& stencil) {
  if (!(f.grid() == stencil.grid)) throw ValidationError("smooth: stencil built for another grid");
  const TorusGrid& grid = f.grid();
  const int m = f.matrix_dim();
  std::vector<Matrix> out(f.size());

  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (f.size() + kBlock - 1) / kBlock;
  parallel_for_blocks(blocks, [&](std::size_t b) {
    Matrix acc(m, m);
    const std::size_t end = std::min(f.size(), (b + 1) * kBlock);
    for (std::size_t x = b * kBlock; x < end; ++x) {
      const Matrix& center = f[x];
      acc.setZero();
      for (std::size_t k = 0; k < stencil.size(); ++k) {
        const std::size_t y = grid.translate(x, stencil.offsets[k]);
        acc.noalias() += stencil.weights[k] * (f[y] - center);
      }
      out[x] = center + acc;
    }
  });
  return MatrixField(grid, m, std::move(out), f.hermitian());
}

double second_difference_diagnostic(const MatrixField& f) {
  const TorusGrid& grid = f.grid();
  double worst = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    for (int d = 0; d < grid.dim(); ++d) {
      std::array<int, 2> step{0, 0};
      step[d] = 1;
      const std::size_t fwd = grid.translate(x, step);
      step[d] = -1;
      const std::size_t bwd = grid.translate(x, step);
      const double h = 1.0 / grid.size(d);
      const Matrix second = f[fwd] - 2.0 * f[x] + f[bwd];
      worst = std::max(worst, operator_norm(second) / (h * h));
    }
  }
  return worst;
}

}  // namespace projsmooth
