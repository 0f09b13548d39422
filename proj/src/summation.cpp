#include "bie2d/summation.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "bie2d/fmm.hpp"
#include "bie2d/parallel.hpp"

namespace bie2d {

namespace {

std::vector<double> direct_sum(const SumProblem& p, SumKernel kernel,
                               int threads) {
  int nt = static_cast<int>(p.targets.size());
  int ns = static_cast<int>(p.sources.size());
  std::vector<double> out(nt, 0.0);
  const double inv2pi = 1.0 / (2.0 * std::numbers::pi);
  parallel_for(nt, threads, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const Vec2 x = p.targets[i];
      double acc = 0;
      if (kernel == SumKernel::LogPotential) {
        for (int j = 0; j < ns; ++j) {
          Vec2 d = x - p.sources[j];
          double r2 = d.squaredNorm();
          if (r2 == 0.0) continue;  // coincident pair: caller's diagonal rule
          acc += p.charges[j] * 0.5 * std::log(r2);
        }
      } else {
        const Vec2 nx = p.target_normals[i];
        for (int j = 0; j < ns; ++j) {
          Vec2 d = x - p.sources[j];
          double r2 = d.squaredNorm();
          if (r2 == 0.0) continue;
          acc += p.charges[j] * d.dot(nx) / r2;
        }
      }
      out[i] = acc * inv2pi;
    }
  });
  return out;
}

std::vector<double> fmm_sum(const SumProblem& p, SumKernel kernel, double eps,
                            int threads) {
  int nt = static_cast<int>(p.targets.size());
  std::vector<double> out(nt, 0.0);
  const double inv2pi = 1.0 / (2.0 * std::numbers::pi);
  if (kernel == SumKernel::LogPotential) {
    std::vector<double> pot(nt);
    fmm_laplace_sum(p.sources, p.charges, p.targets, eps * 2.0 * std::numbers::pi,
                    threads, pot.data(), nullptr);
    for (int i = 0; i < nt; ++i) out[i] = pot[i] * inv2pi;
  } else {
    std::vector<std::complex<double>> field(nt);
    fmm_laplace_sum(p.sources, p.charges, p.targets, eps * 2.0 * std::numbers::pi,
                    threads, nullptr, field.data());
    for (int i = 0; i < nt; ++i) {
      // (x-y).n / |x-y|^2 = Re[ n / (z_x - z_y) ] with n = nx + i ny.
      const Vec2 n = p.target_normals[i];
      out[i] = (n.x() * field[i].real() - n.y() * field[i].imag()) * inv2pi;
    }
  }
  return out;
}

}  // namespace

std::vector<double> layer_potential_sum(const SumProblem& p, SumKernel kernel,
                                        const SumOptions& opts) {
  if (p.sources.size() != p.charges.size())
    throw IndexMismatch("one charge per source required");
  if (kernel == SumKernel::NormalDerivative &&
      p.target_normals.size() != p.targets.size())
    throw IndexMismatch("one normal per target required");
  if (opts.backend == Backend::Direct)
    return direct_sum(p, kernel, opts.threads);
  return fmm_sum(p, kernel, opts.fmm_eps, opts.threads);
}

}  // namespace bie2d
