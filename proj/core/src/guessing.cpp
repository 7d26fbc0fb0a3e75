#include "unplab/guessing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "unplab/config.hpp"
#include "unplab/linalg.hpp"

namespace unplab {

namespace {

// ---------------------------------------------------------------- audit hook

std::mutex& audit_mutex() {
  static std::mutex m;
  return m;
}

std::vector<CertificateAudit::Entry>*& audit_sink() {
  static std::vector<CertificateAudit::Entry>* sink = nullptr;
  return sink;
}

void report(const GuessCertificate& c) {
  std::lock_guard lock(audit_mutex());
  if (auto* sink = audit_sink()) sink->push_back({c.gap, c.min_dual_eigenvalue, c.method});
}

// ---------------------------------------------------------------- block solvers

struct BlockResult {
  std::vector<Matrix> povm;  // one per active outcome
  Matrix sigma;
  double primal = 0.0;
  double dual = 0.0;
  std::size_t iterations = 0;
  std::string method;
};

double real_trace_product(const Matrix& a, const Matrix& b) {
  // Re tr(a b) without forming the product.
  return (a.transpose().cwiseProduct(b)).sum().real();
}

// Dual witness from a POVM: Hermitian part of sum M_x E_x, shifted by the
// smallest multiple of identity that makes it feasible.
void dual_from_povm(const std::vector<Matrix>& ms, const std::vector<Matrix>& povm, Matrix& sigma,
                    double& primal, double& dual) {
  const auto d = ms.front().rows();
  Matrix s = Matrix::Zero(d, d);
  for (std::size_t x = 0; x < ms.size(); ++x) s.noalias() += ms[x] * povm[x];
  s = linalg::hermitian_part(s);
  primal = s.trace().real();
  double shift = 0.0;
  for (const auto& m : ms) shift = std::max(shift, -linalg::min_eigenvalue(s - m));
  sigma = s + shift * Matrix::Identity(d, d);
  dual = primal + shift * static_cast<double>(d);
}

BlockResult solve_helstrom(const Matrix& m0, const Matrix& m1) {
  const auto d = m0.rows();
  const auto eig = linalg::eigh(m0 - m1);
  Matrix e0 = Matrix::Zero(d, d);
  Matrix pos = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > 0.0) {
      const Matrix proj = eig.vectors.col(i) * eig.vectors.col(i).adjoint();
      e0 += proj;
      pos += eig.values(i) * proj;
    }
  }
  BlockResult r;
  r.povm = {linalg::hermitian_part(e0), linalg::hermitian_part(Matrix::Identity(d, d) - e0)};
  r.sigma = linalg::hermitian_part(m1 + pos);
  r.primal = real_trace_product(r.povm[0], m0) + real_trace_product(r.povm[1], m1);
  r.dual = r.sigma.trace().real();
  r.method = "helstrom";
  return r;
}

std::vector<Matrix> pgm(const std::vector<Matrix>& ms) {
  const auto d = ms.front().rows();
  Matrix total = Matrix::Zero(d, d);
  for (const auto& m : ms) total += m;
  const double scale = std::max(total.cwiseAbs().maxCoeff(), 1e-300);
  const Matrix inv_sqrt = linalg::psd_inv_sqrt(total, 1e-13 * scale);
  const Matrix support = linalg::hermitian_part(inv_sqrt * total * inv_sqrt);
  const Matrix kernel = Matrix::Identity(d, d) - support;
  std::vector<Matrix> out;
  out.reserve(ms.size());
  for (const auto& m : ms) {
    out.push_back(linalg::hermitian_part(inv_sqrt * m * inv_sqrt + kernel / static_cast<double>(ms.size())));
  }
  return out;
}

// Fixed-point iteration on the optimality conditions: with
// G = sum_x M_x E_x M_x, update E_x <- G^{-1/2} M_x E_x M_x G^{-1/2}.
BlockResult solve_fixed_point(const std::vector<Matrix>& ms, const SolverOptions& opt, std::size_t budget,
                              std::size_t stall_window) {
  const auto d = ms.front().rows();
  const auto k = ms.size();
  std::vector<Matrix> e = pgm(ms);

  BlockResult best;
  best.primal = -1.0;
  best.dual = std::numeric_limits<double>::infinity();
  double window_start_gap = std::numeric_limits<double>::infinity();

  for (std::size_t it = 1; it <= budget; ++it) {
    Matrix sigma;
    double primal = 0.0, dual = 0.0;
    dual_from_povm(ms, e, sigma, primal, dual);
    if (primal > best.primal) {
      best.primal = primal;
      best.povm = e;
    }
    if (dual < best.dual) {
      best.dual = dual;
      best.sigma = sigma;
    }
    best.iterations = it;
    const double gap = best.dual - best.primal;
    if (gap <= 0.5 * opt.gap_tolerance) break;
    if (stall_window > 0 && it % stall_window == 0) {
      if (gap > 0.5 * window_start_gap) break;  // slow progress; let the caller refine
      window_start_gap = gap;
    }

    Matrix g = Matrix::Zero(d, d);
    std::vector<Matrix> me(k);
    for (std::size_t x = 0; x < k; ++x) {
      me[x] = ms[x] * e[x] * ms[x];
      g += me[x];
    }
    const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-300);
    const Matrix g_inv_sqrt = linalg::psd_inv_sqrt(g, 1e-14 * scale);
    const Matrix kernel =
        Matrix::Identity(d, d) - linalg::hermitian_part(g_inv_sqrt * g * g_inv_sqrt);
    for (std::size_t x = 0; x < k; ++x) {
      e[x] = linalg::hermitian_part(g_inv_sqrt * me[x] * g_inv_sqrt + kernel / static_cast<double>(k));
    }
  }
  best.method = "fixed-point";
  return best;
}

// ---------------------------------------------------------------- barrier refinement

bool cholesky_logdet(const Matrix& z, double& logdet, Matrix* inverse) {
  Eigen::LLT<Matrix> llt(z);
  if (llt.info() != Eigen::Success) return false;
  const Matrix& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double diag = l(i, i).real();
    if (!(diag > 0.0)) return false;
    acc += std::log(diag);
  }
  logdet = 2.0 * acc;
  if (inverse != nullptr) *inverse = llt.solve(Matrix::Identity(z.rows(), z.cols()));
  return true;
}

// Interior-point path following on the dual
//   min tr(sigma) - mu sum_x log det(sigma - M_x),
// whose central points give primal POVMs E_x = mu (sigma - M_x)^{-1}.
bool solve_barrier(const std::vector<Matrix>& ms, const SolverOptions& opt, BlockResult& out) {
  const auto d = ms.front().rows();
  const auto k = ms.size();
  const auto dd = d * d;

  double lmax = 0.0;
  for (const auto& m : ms) lmax = std::max(lmax, linalg::eigenvalues(m).maxCoeff());
  const double scale = std::max(lmax, 1e-12);
  Matrix sigma = (1.5 * scale + 1e-12) * Matrix::Identity(d, d);
  double mu = 0.1 * scale;
  const double mu_final = 0.02 * opt.gap_tolerance / static_cast<double>(k * static_cast<std::size_t>(d));

  auto objective = [&](const Matrix& s, double mu_now, double& value) {
    double acc = s.trace().real();
    for (const auto& m : ms) {
      double ld = 0.0;
      if (!cholesky_logdet(linalg::hermitian_part(s - m), ld, nullptr)) return false;
      acc -= mu_now * ld;
    }
    value = acc;
    return true;
  };

  std::vector<Matrix> w(k);
  std::size_t newton_steps = 0;
  while (true) {
    for (int step = 0; step < 60; ++step) {
      Matrix grad = Matrix::Identity(d, d);
      Matrix hess = Matrix::Zero(dd, dd);
      for (std::size_t x = 0; x < k; ++x) {
        double ld = 0.0;
        if (!cholesky_logdet(linalg::hermitian_part(sigma - ms[x]), ld, &w[x])) return false;
        w[x] = linalg::hermitian_part(w[x]);
        grad -= mu * w[x];
        hess += mu * linalg::kron(w[x].transpose(), w[x]);
      }
      Eigen::Map<const Vector> g_vec(grad.data(), dd);
      Eigen::LDLT<Matrix> ldlt(linalg::hermitian_part(hess));
      if (ldlt.info() != Eigen::Success) return false;
      Vector step_vec = ldlt.solve(-g_vec);
      Matrix delta = Eigen::Map<Matrix>(step_vec.data(), d, d);
      delta = linalg::hermitian_part(delta);
      const double decrement = -real_trace_product(grad, delta);
      ++newton_steps;
      if (!(decrement >= 0.0) || decrement < 1e-14 * std::max(1.0, mu)) break;

      double f0 = 0.0;
      objective(sigma, mu, f0);
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        double f1 = 0.0;
        const Matrix trial = sigma + t * delta;
        if (objective(trial, mu, f1) && f1 <= f0 - 0.25 * t * decrement) {
          sigma = trial;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
      if (decrement < 1e-10 * mu) break;
    }
    if (mu <= mu_final) break;
    mu = std::max(mu * 0.1, mu_final);
  }

  // Primal point from the last central step, renormalized to a POVM.
  Matrix total = Matrix::Zero(d, d);
  std::vector<Matrix> e(k);
  for (std::size_t x = 0; x < k; ++x) {
    double ld = 0.0;
    Matrix inv;
    if (!cholesky_logdet(linalg::hermitian_part(sigma - ms[x]), ld, &inv)) return false;
    e[x] = linalg::hermitian_part(mu * inv);
    total += e[x];
  }
  const Matrix norm = linalg::psd_inv_sqrt(total, 1e-300);
  for (auto& ex : e) ex = linalg::hermitian_part(norm * ex * norm);

  out.povm = e;
  out.primal = 0.0;
  for (std::size_t x = 0; x < k; ++x) out.primal += real_trace_product(e[x], ms[x]);
  out.sigma = linalg::hermitian_part(sigma);
  out.dual = out.sigma.trace().real();
  out.iterations = newton_steps;
  out.method = "barrier";
  return true;
}

BlockResult solve_block(const std::vector<Matrix>& ms, const SolverOptions& opt) {
  const auto d = ms.front().rows();
  const auto k = ms.size();
  if (k == 1) {
    BlockResult r;
    r.povm = {Matrix::Identity(d, d)};
    r.sigma = ms[0];
    r.primal = r.dual = ms[0].trace().real();
    r.method = "single";
    return r;
  }
  if (d == 1) {
    BlockResult r;
    std::size_t best = 0;
    for (std::size_t x = 1; x < k; ++x) {
      if (ms[x](0, 0).real() > ms[best](0, 0).real()) best = x;
    }
    r.povm.assign(k, Matrix::Zero(1, 1));
    r.povm[best](0, 0) = 1.0;
    r.sigma = ms[best];
    r.primal = r.dual = ms[best](0, 0).real();
    r.method = "diagonal";
    return r;
  }
  if (k == 2) return solve_helstrom(ms[0], ms[1]);

  BlockResult fp = solve_fixed_point(ms, opt, opt.max_iterations,
                                     opt.allow_barrier && static_cast<std::size_t>(d) <= opt.barrier_max_dim
                                         ? opt.fixed_point_stall
                                         : 0);
  if (fp.dual - fp.primal <= 0.5 * opt.gap_tolerance) return fp;
  if (opt.allow_barrier && static_cast<std::size_t>(d) <= opt.barrier_max_dim) {
    BlockResult br;
    if (solve_barrier(ms, opt, br)) {
      br.iterations += fp.iterations;
      // keep whichever side is tighter from each run
      BlockResult merged = br;
      if (fp.primal > br.primal) {
        merged.primal = fp.primal;
        merged.povm = fp.povm;
      }
      if (fp.dual < br.dual) {
        merged.dual = fp.dual;
        merged.sigma = fp.sigma;
      }
      merged.method = "fixed-point+barrier";
      if (merged.dual - merged.primal <= 0.5 * opt.gap_tolerance) return merged;
      const std::size_t remaining = opt.max_iterations > fp.iterations ? opt.max_iterations - fp.iterations : 0;
      if (remaining == 0) return merged;
      BlockResult more = solve_fixed_point(ms, opt, remaining, 0);
      if (more.primal > merged.primal) {
        merged.primal = more.primal;
        merged.povm = more.povm;
      }
      if (more.dual < merged.dual) {
        merged.dual = more.dual;
        merged.sigma = more.sigma;
      }
      merged.iterations += more.iterations;
      return merged;
    }
  }
  if (fp.iterations < opt.max_iterations) {
    BlockResult more = solve_fixed_point(ms, opt, opt.max_iterations - fp.iterations, 0);
    if (more.primal > fp.primal) {
      fp.primal = more.primal;
      fp.povm = more.povm;
    }
    if (more.dual < fp.dual) {
      fp.dual = more.dual;
      fp.sigma = more.sigma;
    }
    fp.iterations += more.iterations;
  }
  return fp;
}

bool nearly_equal(const Matrix& a, const Matrix& b, double tol) {
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

// ---------------------------------------------------------------- public API

GuessCertificate guess_weighted(const std::vector<Matrix>& weighted_in, const SolverOptions& opt) {
  if (weighted_in.empty()) throw ValidationError("guessing: empty alphabet");
  const auto d = weighted_in.front().rows();
  check_dimension(static_cast<std::size_t>(d), "guessing solver side register");
  std::vector<Matrix> ms;
  ms.reserve(weighted_in.size());
  double scale = 0.0;
  for (const auto& m : weighted_in) {
    if (m.rows() != d || m.cols() != d) throw DimensionError("guessing: blocks differ in shape");
    ms.push_back(linalg::hermitian_part(m));
    if (m.size() > 0) scale = std::max(scale, m.cwiseAbs().maxCoeff());
  }
  const std::size_t n = ms.size();
  GuessCertificate cert;
  cert.povm_elements.assign(n, Matrix::Zero(d, d));

  if (scale == 0.0) {
    cert.povm_elements[0] = Matrix::Identity(d, d);
    cert.sigma = Matrix::Zero(d, d);
    cert.method = "zero";
    cert.converged = true;
    report(cert);
    return cert;
  }

  // Identical blocks are interchangeable guesses; zero blocks never win.
  const double same_tol = 1e-14 * scale;
  std::vector<std::size_t> active;
  for (std::size_t x = 0; x < n; ++x) {
    if (ms[x].cwiseAbs().maxCoeff() <= same_tol) continue;
    bool duplicate = false;
    for (auto y : active) {
      if (nearly_equal(ms[x], ms[y], same_tol)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) active.push_back(x);
  }

  std::vector<const Matrix*> ptrs;
  for (auto x : active) ptrs.push_back(&ms[x]);
  const auto blocks = linalg::connected_blocks(ptrs, 1e-15 * scale);

  Matrix sigma = Matrix::Zero(d, d);
  std::size_t iterations = 0;
  std::string method;
  for (const auto& block : blocks) {
    std::vector<Matrix> sub;
    std::vector<std::size_t> owner;
    for (auto x : active) {
      Matrix s = linalg::submatrix(ms[x], block);
      if (s.cwiseAbs().maxCoeff() <= same_tol) continue;
      bool duplicate = false;
      for (const auto& t : sub) {
        if (nearly_equal(s, t, same_tol)) {
          duplicate = true;
          break;
        }
      }
      if (duplicate) continue;
      sub.push_back(std::move(s));
      owner.push_back(x);
    }
    const auto bd = static_cast<Eigen::Index>(block.size());
    if (sub.empty()) {
      // nothing lives here; credit the first symbol so the POVM completes
      for (Eigen::Index i = 0; i < bd; ++i) {
        const auto gi = static_cast<Eigen::Index>(block[static_cast<std::size_t>(i)]);
        cert.povm_elements[active.empty() ? 0 : active.front()](gi, gi) = 1.0;
      }
      continue;
    }
    const auto r = solve_block(sub, opt);
    iterations += r.iterations;
    if (method.empty() || method == "single" || method == "diagonal") method = r.method;
    for (std::size_t s = 0; s < owner.size(); ++s) {
      for (Eigen::Index j = 0; j < bd; ++j) {
        for (Eigen::Index i = 0; i < bd; ++i) {
          cert.povm_elements[owner[s]](static_cast<Eigen::Index>(block[static_cast<std::size_t>(i)]),
                                       static_cast<Eigen::Index>(block[static_cast<std::size_t>(j)])) =
              r.povm[s](i, j);
        }
      }
    }
    for (Eigen::Index j = 0; j < bd; ++j) {
      for (Eigen::Index i = 0; i < bd; ++i) {
        sigma(static_cast<Eigen::Index>(block[static_cast<std::size_t>(i)]),
              static_cast<Eigen::Index>(block[static_cast<std::size_t>(j)])) = r.sigma(i, j);
      }
    }
  }

  // Certificate evaluated on the full, undecomposed problem.
  cert.value = 0.0;
  for (std::size_t x = 0; x < n; ++x) cert.value += real_trace_product(cert.povm_elements[x], ms[x]);
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& m : ms) min_eig = std::min(min_eig, linalg::min_eigenvalue(sigma - m));
  if (min_eig < 0.0) {
    sigma += (-min_eig) * Matrix::Identity(d, d);
    min_eig = std::numeric_limits<double>::infinity();
    for (const auto& m : ms) min_eig = std::min(min_eig, linalg::min_eigenvalue(sigma - m));
  }
  cert.sigma = sigma;
  cert.dual_value = sigma.trace().real();
  cert.gap = std::max(0.0, cert.dual_value - cert.value);
  cert.min_dual_eigenvalue = min_eig;
  cert.iterations = iterations;
  cert.method = method.empty() ? "trivial" : method;
  cert.converged = cert.gap <= opt.gap_tolerance && cert.min_dual_eigenvalue >= -tol::dual_feasibility;
  report(cert);
  return cert;
}

GuessCertificate guessing_probability(const CqState& state, const SolverOptions& options) {
  return guess_weighted(state.weighted_all(), options);
}

GuessCertificate combine_certificates(const std::vector<GuessCertificate>& parts) {
  GuessCertificate out;
  out.min_dual_eigenvalue = parts.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  out.converged = true;
  out.method = "combined";
  for (const auto& p : parts) {
    out.value += p.value;
    out.dual_value += p.dual_value;
    out.gap += p.gap;
    out.min_dual_eigenvalue = std::min(out.min_dual_eigenvalue, p.min_dual_eigenvalue);
    out.iterations += p.iterations;
    out.converged = out.converged && p.converged;
  }
  return out;
}

std::vector<Matrix> pretty_good_measurement(const std::vector<Matrix>& weighted) {
  if (weighted.empty()) throw ValidationError("pretty_good_measurement: empty alphabet");
  std::vector<Matrix> ms;
  for (const auto& m : weighted) ms.push_back(linalg::hermitian_part(m));
  return pgm(ms);
}

CertificateAudit::CertificateAudit() {
  std::lock_guard lock(audit_mutex());
  if (audit_sink() != nullptr) throw Error("a certificate audit is already active");
  audit_sink() = new std::vector<Entry>();
}

CertificateAudit::~CertificateAudit() {
  std::lock_guard lock(audit_mutex());
  delete audit_sink();
  audit_sink() = nullptr;
}

std::vector<CertificateAudit::Entry> CertificateAudit::entries() const {
  std::lock_guard lock(audit_mutex());
  return audit_sink() != nullptr ? *audit_sink() : std::vector<Entry>{};
}

}  // namespace unplab
