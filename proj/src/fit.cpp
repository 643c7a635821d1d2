#include "maxstab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "maxstab/errors.hpp"

namespace maxstab {

namespace {

Eigen::VectorXd clamp_into(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                           const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Parabolic refinement along each coordinate; keeps only improving steps.
void polish_coordinates(const std::function<double(const Eigen::VectorXd&)>& fn,
                        Eigen::VectorXd& x, double& fx, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
  const int n = static_cast<int>(x.size());
  for (int cycle = 0; cycle < 4; ++cycle) {
    double moved = 0.0;
    for (int j = 0; j < n; ++j) {
      const double h = 1e-5 * (1.0 + std::abs(x[j]));
      Eigen::VectorXd xp = x, xm = x;
      xp[j] = std::min(x[j] + h, hi[j]);
      xm[j] = std::max(x[j] - h, lo[j]);
      const double fp = fn(xp);
      const double fm = fn(xm);
      const double denom = 2.0 * fx - fp - fm;  // positive where locally concave
      double step = 0.0;
      if (denom > 0.0) step = 0.5 * (fp - fm) * h / denom;
      if (step == 0.0) continue;
      step = std::clamp(step, -8.0 * h, 8.0 * h);
      Eigen::VectorXd trial = x;
      trial[j] = std::clamp(x[j] + step, lo[j], hi[j]);
      const double ft = fn(trial);
      double best = fx;
      if (ft > best) {
        moved = std::max(moved, std::abs(trial[j] - x[j]));
        x = trial;
        fx = ft;
        best = ft;
      }
      if (fp > best) {
        x = xp;
        fx = fp;
        best = fp;
      }
      if (fm > best) {
        x = xm;
        fx = fm;
      }
    }
    if (moved < 1e-9) break;
  }
}

}  // namespace

SimplexResult maximize_simplex_box(const std::function<double(const Eigen::VectorXd&)>& fn,
                                   const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper, const FitOptions& opt) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> verts;
  std::vector<double> values;
  verts.reserve(n + 1);
  verts.push_back(clamp_into(x0, lower, upper));
  for (int j = 0; j < n; ++j) {
    const double scale = opt.simplex_scale * (upper[j] - lower[j]);
    Eigen::VectorXd v = verts[0];
    v[j] = (v[j] + scale <= upper[j]) ? v[j] + scale : v[j] - scale;
    verts.push_back(clamp_into(v, lower, upper));
  }
  values.reserve(n + 1);
  for (const auto& v : verts) values.push_back(fn(v));

  std::vector<int> order(n + 1);
  auto sort_order = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] > values[b]; });
  };

  SimplexResult result;
  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    sort_order();
    const int best = order[0], worst = order[n];
    double diameter = 0.0;
    for (int i = 1; i <= n; ++i)
      diameter = std::max(diameter, (verts[order[i]] - verts[best]).cwiseAbs().maxCoeff());
    const double spread = values[best] - values[worst];
    if (diameter <= opt.diameter_tol && spread <= opt.spread_tol) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += verts[order[i]];
    centroid /= n;

    const Eigen::VectorXd reflected = clamp_into(centroid + (centroid - verts[worst]), lower, upper);
    const double f_reflected = fn(reflected);
    if (f_reflected > values[order[0]]) {
      const Eigen::VectorXd expanded =
          clamp_into(centroid + 2.0 * (centroid - verts[worst]), lower, upper);
      const double f_expanded = fn(expanded);
      if (f_expanded > f_reflected) {
        verts[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        verts[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected > values[order[n - 1]]) {
      verts[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const Eigen::VectorXd contracted =
        clamp_into(centroid + 0.5 * (verts[worst] - centroid), lower, upper);
    const double f_contracted = fn(contracted);
    if (f_contracted > values[worst]) {
      verts[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    // Shrink toward the best vertex.
    for (int i = 1; i <= n; ++i) {
      const int v = order[i];
      verts[v] = clamp_into(verts[best] + 0.5 * (verts[v] - verts[best]), lower, upper);
      values[v] = fn(verts[v]);
    }
  }

  sort_order();
  result.x = verts[order[0]];
  result.value = values[order[0]];
  result.iterations = iter;
  if (opt.polish) polish_coordinates(fn, result.x, result.value, lower, upper);
  return result;
}

EstimateResult fit(const FieldSample& field, const DesignMask& mask, const ParamBox& box,
                   const ParamVector& init, const FitOptions& opt) {
  box.validate();
  if (!box.contains(init)) throw ConfigError("fit: initial parameters outside the box");
  const IdentifiabilityMask gating = identifiability_mask(mask.r, mask.p, init);

  Objective objective{&field, mask, gating, opt.threads, {}};
  std::vector<int> free_idx;
  for (int i = 0; i < 4; ++i)
    if (gating.free[i]) free_idx.push_back(i);
  const int n_free = static_cast<int>(free_idx.size());

  auto assemble = [&](const Eigen::VectorXd& xfree) {
    Eigen::Vector4d v = gating.fixed_values;
    for (int i = 0; i < n_free; ++i) v[free_idx[i]] = xfree[i];
    return ParamVector::from_vector(v);
  };

  Eigen::VectorXd x0(n_free), lo(n_free), hi(n_free);
  const Eigen::Vector4d init_v = init.to_vector();
  for (int i = 0; i < n_free; ++i) {
    x0[i] = init_v[free_idx[i]];
    lo[i] = box.lower[free_idx[i]];
    hi[i] = box.upper[free_idx[i]];
  }

  auto fn = [&](const Eigen::VectorXd& xfree) { return objective(assemble(xfree)); };
  SimplexResult sim = maximize_simplex_box(fn, x0, lo, hi, opt);

  if (opt.gradient_refine) {
    Eigen::VectorXd x = sim.x;
    double fx = sim.value;
    double step = 10.0 * opt.diameter_tol;
    for (int it = 0; it < 50; ++it) {
      const Eigen::Vector4d g4 = objective.gradient(assemble(x));
      Eigen::VectorXd g(n_free);
      for (int i = 0; i < n_free; ++i) g[i] = g4[free_idx[i]];
      const double gn = g.norm();
      if (gn < 1e-12) break;
      g /= gn;
      bool accepted = false;
      while (step > 1e-12) {
        const Eigen::VectorXd trial = clamp_into(x + step * g, lo, hi);
        const double ft = fn(trial);
        if (ft > fx) {
          x = trial;
          fx = ft;
          step *= 2.0;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    if (fx > sim.value) {
      sim.x = x;
      sim.value = fx;
    }
  }

  EstimateResult result;
  result.psi_hat = assemble(sim.x);
  result.loglik = sim.value;
  result.converged = sim.converged;
  result.iterations = sim.iterations;
  result.n_pairs = count_pairs(field.grid, mask);
  result.fixed_mask = gating;
  result.stats = objective.stats;
  return result;
}

SandwichParts estimate_sandwich(const FieldSample& field, const DesignMask& mask,
                                const ParamVector& psi_hat, const IdentifiabilityMask& gating,
                                int window_space, int window_time, int threads) {
  if (window_space < 0 || window_time < 0)
    throw ConfigError("sandwich: window radii must be nonnegative");
  const GridSpec& grid = field.grid;
  const double N = static_cast<double>(grid.n_points());

  SandwichParts parts;
  parts.window_space = window_space;
  parts.window_time = window_time;

  // F_hat = -(1/N) sum_a Hessian(g_a), by central differences of the score.
  const Eigen::Vector4d v = psi_hat.to_vector();
  Eigen::Matrix4d hessian = Eigen::Matrix4d::Zero();
  for (int j = 0; j < 4; ++j) {
    if (!gating.free[j]) continue;
    const double h = 1e-5 * (1.0 + std::abs(v[j]));
    Eigen::Vector4d vp = v, vm = v;
    vp[j] += h;
    vm[j] -= h;
    const Eigen::Vector4d sp = score(field, mask, ParamVector::from_vector(vp), gating, threads);
    const Eigen::Vector4d sm = score(field, mask, ParamVector::from_vector(vm), gating, threads);
    hessian.col(j) = (sp - sm) / (2.0 * h);
  }
  hessian = 0.5 * (hessian + hessian.transpose()).eval();
  parts.F_hat = -hessian / N;

  // Sigma_hat: windowed sum of lagged score cross-products.
  const Eigen::MatrixX4d scores = anchor_scores(field, mask, psi_hat, gating, threads);
  Eigen::Matrix4d sigma = Eigen::Matrix4d::Zero();
  const std::int64_t n_sites = grid.n_sites();
  Eigen::MatrixXi coords(n_sites, grid.d);
  {
    Eigen::VectorXi site;
    int k = 0;
    for (std::int64_t s = 0; s < n_sites; ++s) {
      unflatten(grid, s * grid.T, site, k);
      coords.row(s) = site.transpose();
    }
  }
  Eigen::VectorXi offset = Eigen::VectorXi::Constant(grid.d, -window_space);
  for (;;) {
    // Flat site offset of this spatial displacement.
    std::int64_t site_off = 0, stride = 1;
    for (int j = grid.d - 1; j >= 0; --j) {
      site_off += stride * offset[j];
      stride *= grid.m;
    }
    for (std::int64_t s = 0; s < n_sites; ++s) {
      bool inside = true;
      for (int j = 0; j < grid.d && inside; ++j) {
        const int c = coords(s, j) + offset[j];
        inside = c >= 1 && c <= grid.m;
      }
      if (!inside) continue;
      const std::int64_t base1 = s * grid.T;
      const std::int64_t base2 = (s + site_off) * grid.T;
      for (int dt = -window_time; dt <= window_time; ++dt) {
        const int t_lo = std::max(0, -dt);
        const int t_hi = grid.T - std::max(0, dt);
        for (int t = t_lo; t < t_hi; ++t)
          sigma += scores.row(base1 + t).transpose() * scores.row(base2 + t + dt);
      }
    }
    int j = grid.d - 1;
    while (j >= 0 && offset[j] == window_space) offset[j--] = -window_space;
    if (j < 0) break;
    ++offset[j];
  }
  parts.Sigma_hat = (sigma / N).eval();
  parts.Sigma_hat = (0.5 * (parts.Sigma_hat + parts.Sigma_hat.transpose())).eval();

  // Invert the free block.
  std::vector<int> free_idx;
  for (int i = 0; i < 4; ++i)
    if (gating.free[i]) free_idx.push_back(i);
  const int k = static_cast<int>(free_idx.size());
  Eigen::MatrixXd Ff(k, k), Sf(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      Ff(i, j) = parts.F_hat(free_idx[i], free_idx[j]);
      Sf(i, j) = parts.Sigma_hat(free_idx[i], free_idx[j]);
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ff, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()[0];
  const double smin = svd.singularValues()[k - 1];
  if (!(smin > 0.0) || smax / smin > 1e12) {
    std::ostringstream msg;
    msg << "sandwich: F_hat is singular on the free block (condition number "
        << (smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity()) << ")";
    throw NumericalError(msg.str());
  }
  const Eigen::MatrixXd Finv = svd.solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd covf = Finv * Sf * Finv.transpose() / N;
  covf = (0.5 * (covf + covf.transpose())).eval();
  // The truncated lag window can leave Sigma_hat slightly indefinite;
  // clip the covariance back onto the psd cone.
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covf);
    covf = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).asDiagonal() *
           eig.eigenvectors().transpose();
  }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) parts.covariance(free_idx[i], free_idx[j]) = covf(i, j);
  for (int i = 0; i < 4; ++i)
    parts.std_errors[i] = gating.free[i] ? std::sqrt(std::max(0.0, parts.covariance(i, i))) : 0.0;
  return parts;
}

double mixing_bound(const ParamVector& psi, int k, int l, int n) {
  if (k < 1 || l < 1 || n < 1)
    throw ConfigError("mixing_bound: k, l and n must be positive");
  const double min_theta = std::min(psi.theta1, psi.theta2);
  const double min_alpha = std::min(psi.alpha1, psi.alpha2);
  return 4.0 * k * l * std::exp(-0.5 * min_theta * std::pow(static_cast<double>(n), min_alpha));
}

}  // namespace maxstab
