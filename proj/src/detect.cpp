#include "dcd/detect.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace dcd {

namespace {

void check_system(const ComplexMatrix& h, const ComplexVector& y, double n0, double ex) {
  if (h.rows() == 0 || h.cols() == 0)
    throw std::invalid_argument("detector: empty channel matrix");
  if (y.size() != h.rows())
    throw std::invalid_argument("detector: observation length must match antenna count");
  if (n0 < 0.0 || !(ex > 0.0))
    throw std::invalid_argument("detector: need N0 >= 0 and E_x > 0");
}

ComplexMatrix gram(const ComplexMatrix& h) {
  const std::size_t u = h.cols();
  ComplexMatrix g(u, u);
  for (std::size_t j = 0; j < u; ++j)
    for (std::size_t i = 0; i < u; ++i)
      g(i, j) = kernels::cdotc(h.col(i).data(), h.col(j).data(), h.rows());
  return g;
}

}  // namespace

void run_cluster_workers(std::size_t count, bool concurrent,
                         const std::function<void(std::size_t)>& worker) {
  if (!concurrent || count < 2) {
    for (std::size_t c = 0; c < count; ++c) worker(c);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> threads;
  threads.reserve(count);
  for (std::size_t c = 0; c < count; ++c)
    threads.emplace_back([&, c] {
      try {
        worker(c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

ComplexVector lmmse_exact(const ComplexMatrix& h, const ComplexVector& y,
                          double n0, double ex) {
  check_system(h, y, n0, ex);
  const std::size_t u = h.cols();
  ComplexMatrix a = gram(h);
  const double kappa = n0 / ex;
  for (std::size_t j = 0; j < u; ++j) a(j, j) += kappa;
  ComplexVector b(u);
  for (std::size_t j = 0; j < u; ++j)
    b[j] = kernels::cdotc(h.col(j).data(), y.data(), h.rows());
  return hermitian_solve(a, b);
}

ComplexVector cd_detect(const ComplexMatrix& h, const ComplexVector& y,
                        double n0, double ex, unsigned t_max,
                        const PrecisionMode& prec, SweepObserver* observer) {
  check_system(h, y, n0, ex);
  if (t_max == 0)
    throw std::invalid_argument("cd_detect: need at least one sweep");

  const std::size_t b = h.rows(), u = h.cols();
  const bool store_rounded = prec.rounds_storage();

  ComplexMatrix hs = h;
  ComplexVector r = y;
  if (store_rounded) {
    round_precision(hs, prec.format);
    round_precision(r, prec.format);
  }

  const double kappa = n0 / ex;
  std::vector<double> m(u), nn(u);
  for (std::size_t j = 0; j < u; ++j) {
    const double e = kernels::norm2sq(hs.col(j).data(), b);
    m[j] = 1.0 / (e + kappa);
    nn[j] = m[j] * e;
  }
  if (store_rounded) {
    round_precision(std::span<double>(m.data(), u), prec.format);
    round_precision(std::span<double>(nn.data(), u), prec.format);
  }

  ComplexVector x(u, cf64{0.0, 0.0});
  for (unsigned t = 0; t < t_max; ++t) {
    for (std::size_t j = 0; j < u; ++j) {
      const cf64* hj = hs.col(j).data();
      cf64 xj = m[j] * kernels::cdotc(hj, r.data(), b) + nn[j] * x[j];
      if (store_rounded) xj = round_precision(xj, prec.format);
      const cf64 dx = xj - x[j];
      x[j] = xj;
      kernels::caxpy(-dx, hj, r.data(), b);
      if (store_rounded) round_precision(r, prec.format);
      if (observer) observer->after_update(t, j, x, r);
    }
  }
  return x;
}

double post_eq_variance(const ComplexMatrix& hc, double n0, double ex) {
  if (hc.rows() == 0 || hc.cols() == 0)
    throw std::invalid_argument("post_eq_variance: empty channel block");
  if (!(n0 > 0.0) || !(ex > 0.0))
    throw std::invalid_argument("post_eq_variance: need N0 > 0 and E_x > 0");
  const std::size_t u = hc.cols();
  ComplexMatrix a = gram(hc);
  const double g = ex / n0;
  for (std::size_t j = 0; j < u; ++j)
    for (std::size_t i = 0; i < u; ++i) a(i, j) = (i == j ? 1.0 : 0.0) + g * a(i, j);
  double tr = 0.0;
  ComplexVector e(u, cf64{0.0, 0.0});
  for (std::size_t j = 0; j < u; ++j) {
    e[j] = 1.0;
    tr += hermitian_solve(a, e)[j].real();
    e[j] = 0.0;
  }
  return ex / static_cast<double>(u) * tr;
}

std::vector<double> fusion_weights(std::span<const double> sigma2) {
  if (sigma2.empty())
    throw std::invalid_argument("fusion_weights: no clusters");
  std::vector<double> inv(sigma2.size());
  double total = 0.0;
  for (std::size_t c = 0; c < sigma2.size(); ++c) {
    if (!(sigma2[c] > 0.0) || !std::isfinite(sigma2[c]))
      throw std::invalid_argument("fusion_weights: variances must be positive and finite");
    inv[c] = 1.0 / sigma2[c];
    total += inv[c];
  }
  for (auto& w : inv) w /= total;
  return inv;
}

DetectionResult decentralized_cd_detect(std::span<const ClusterData> clusters,
                                        const DetectorConfig& cfg,
                                        bool concurrent) {
  if (clusters.empty())
    throw std::invalid_argument("decentralized_cd_detect: no clusters");
  const std::size_t u = clusters[0].h.cols();
  for (const auto& c : clusters)
    if (c.h.cols() != u)
      throw std::invalid_argument("decentralized_cd_detect: clusters disagree on user count");

  const std::size_t nc = clusters.size();
  const bool optimal = cfg.fusion == FusionMode::optimal;

  DetectionResult res;
  res.local.resize(nc);
  res.sigma2.assign(optimal ? nc : 0, 0.0);

  auto worker = [&](std::size_t c) {
    ComplexVector est = cd_detect(clusters[c].h, clusters[c].y, cfg.n0, cfg.ex,
                                  cfg.t_max, cfg.precision);
    double s2 = 0.0;
    if (optimal) s2 = post_eq_variance(clusters[c].h, cfg.n0, cfg.ex);
    // Message boundary: payloads leave the cluster in the wire precision.
    if (cfg.precision.rounds()) {
      round_precision(est, cfg.precision.format);
      if (optimal) s2 = round_precision(s2, cfg.precision.format);
    }
    res.local[c] = std::move(est);
    if (optimal) res.sigma2[c] = s2;
  };

  run_cluster_workers(nc, concurrent, worker);

  res.weights = optimal ? fusion_weights(res.sigma2)
                        : std::vector<double>(nc, 1.0 / static_cast<double>(nc));

  // Fuse in ascending cluster order regardless of worker scheduling.
  res.xhat.resize(u);
  for (std::size_t j = 0; j < u; ++j) res.xhat[j] = res.weights[0] * res.local[0][j];
  for (std::size_t c = 1; c < nc; ++c)
    for (std::size_t j = 0; j < u; ++j) res.xhat[j] += res.weights[c] * res.local[c][j];
  return res;
}

ComplexVector mf_detect(std::span<const ClusterData> clusters, const PrecisionMode& prec) {
  if (clusters.empty())
    throw std::invalid_argument("mf_detect: no clusters");
  const std::size_t u = clusters[0].h.cols();
  ComplexVector corr(u, cf64{0.0, 0.0});
  std::vector<double> energy(u, 0.0);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const auto& cl = clusters[c];
    if (cl.h.cols() != u)
      throw std::invalid_argument("mf_detect: clusters disagree on user count");
    if (cl.y.size() != cl.h.rows())
      throw std::invalid_argument("mf_detect: observation length mismatch");
    ComplexVector pc(u);
    std::vector<double> pe(u);
    for (std::size_t j = 0; j < u; ++j) {
      pc[j] = kernels::cdotc(cl.h.col(j).data(), cl.y.data(), cl.h.rows());
      pe[j] = kernels::norm2sq(cl.h.col(j).data(), cl.h.rows());
    }
    if (prec.rounds()) {
      round_precision(pc, prec.format);
      round_precision(std::span<double>(pe.data(), u), prec.format);
    }
    for (std::size_t j = 0; j < u; ++j) {
      corr[j] += pc[j];
      energy[j] += pe[j];
    }
  }
  for (std::size_t j = 0; j < u; ++j) {
    if (energy[j] == 0.0)
      throw std::runtime_error("mf_detect: user " + std::to_string(j) +
                               " has zero channel energy");
    corr[j] /= energy[j];
  }
  return corr;
}

std::vector<double> mmse_bias_factors(const ComplexMatrix& h, double n0, double ex) {
  check_system(h, ComplexVector(h.rows()), n0, ex);
  const std::size_t u = h.cols();
  std::vector<double> beta(u, 1.0);
  const double kappa = n0 / ex;
  if (kappa == 0.0) return beta;
  ComplexMatrix a = gram(h);
  for (std::size_t j = 0; j < u; ++j) a(j, j) += kappa;
  ComplexVector e(u, cf64{0.0, 0.0});
  for (std::size_t j = 0; j < u; ++j) {
    e[j] = 1.0;
    beta[j] = 1.0 - kappa * hermitian_solve(a, e)[j].real();
    e[j] = 0.0;
  }
  return beta;
}

}  // namespace dcd
