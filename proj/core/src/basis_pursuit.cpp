#include "sparsest/basis_pursuit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

#include "sparsest/errors.hpp"

namespace sparsest {

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius) {
  if (radius <= 0.0) return Eigen::VectorXd::Zero(v.size());
  if (v.lpNorm<1>() <= radius) return v;

  std::vector<double> mag(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) mag[static_cast<std::size_t>(i)] = std::abs(v[i]);
  std::sort(mag.begin(), mag.end(), std::greater<>());

  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t k = 0; k < mag.size(); ++k) {
    cumulative += mag[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (candidate >= mag[k]) break;
    threshold = candidate;
  }

  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]) - threshold;
    out[i] = m > 0.0 ? std::copysign(m, v[i]) : 0.0;
  }
  return out;
}

namespace {

struct Iterate {
  Eigen::VectorXd x;
  Eigen::VectorXd r;    // y - A x
  Eigen::VectorXd atr;  // A' r  (negative gradient of 0.5 ||r||^2)
};

class Solver {
 public:
  Solver(const MeasurementOperator& A, const Eigen::VectorXd& y, double eps0, const BasisPursuitOptions& opt)
      : A_(A), y_(y), sigma_(eps0), opt_(opt), ynorm_(y.norm()) {}

  RecoveryResult run();

 private:
  bool least_squares_reaches_sigma();
  void refresh(Iterate& it) const {
    it.r = y_ - A_.apply(it.x);
    it.atr = A_.apply_transpose(it.r);
  }
  double feasibility_limit() const {
    return sigma_ * (1.0 + opt_.feasibility_slack) + (sigma_ == 0.0 ? 1e-11 * ynorm_ : 0.0);
  }
  // Minimum-norm step moving the residual onto the eps0-ball: solves
  // (A A') w = r (1 - eps0/||r||) by conjugate gradients and returns x + A'w.
  Eigen::VectorXd correct(const Iterate& it);
  bool try_certify(const Iterate& it, RecoveryResult& res);
  struct Polished {
    Eigen::VectorXd x;
    Eigen::VectorXd dual;
  };
  static constexpr int kPolishRounds = 30;
  std::optional<Polished> polish(const Eigen::VectorXd& x, double budget);
  std::optional<Polished> polish_vertex(const Eigen::VectorXd& x, double budget);
  bool offer(const Eigen::VectorXd& xc, RecoveryResult& res, const Eigen::VectorXd* dual = nullptr);

  const MeasurementOperator& A_;
  const Eigen::VectorXd& y_;
  double sigma_;
  BasisPursuitOptions opt_;
  double ynorm_;
  double dual_best_ = 0.0;
  double polish_flops_ = 0.0;
  int cg_iterations_ = 0;
};

bool Solver::least_squares_reaches_sigma() {
  // CGLS on min ||A x - y||; stops as soon as the constraint is attainable.
  const double target = feasibility_limit();
  Eigen::VectorXd r = y_;
  Eigen::VectorXd s = A_.apply_transpose(r);
  const double s0 = s.norm();
  if (s0 == 0.0) return ynorm_ <= target;
  Eigen::VectorXd d = s;
  double gamma = s.squaredNorm();
  const int limit = static_cast<int>(std::min<Eigen::Index>(opt_.cg_max_iter, 2 * std::min(A_.rows(), A_.cols()) + 20));
  for (int k = 0; k < limit; ++k) {
    const Eigen::VectorXd q = A_.apply(d);
    const double qq = q.squaredNorm();
    if (qq == 0.0) break;
    const double step = gamma / qq;
    r -= step * q;
    ++cg_iterations_;
    if (r.norm() <= target) return true;
    s = A_.apply_transpose(r);
    const double gamma_next = s.squaredNorm();
    if (std::sqrt(gamma_next) <= 1e-12 * s0) return false;
    d = s + (gamma_next / gamma) * d;
    gamma = gamma_next;
  }
  // Undecided within the iteration budget; let the main loop proceed.
  return true;
}

Eigen::VectorXd Solver::correct(const Iterate& it) {
  const double rn = it.r.norm();
  if (rn <= sigma_) return it.x;
  const Eigen::VectorXd b = it.r * (1.0 - sigma_ / rn);
  const double stop = std::max(0.25 * opt_.feasibility_slack * sigma_, 1e-13 * std::max(b.norm(), 1e-300));

  Eigen::VectorXd delta = Eigen::VectorXd::Zero(A_.cols());
  Eigen::VectorXd res = b;
  Eigen::VectorXd dir = b;
  double rs = res.squaredNorm();
  for (int k = 0; k < opt_.cg_max_iter && std::sqrt(rs) > stop; ++k) {
    const Eigen::VectorXd u = A_.apply_transpose(dir);
    const Eigen::VectorXd q = A_.apply(u);
    const double curvature = dir.dot(q);
    if (!(curvature > 0.0)) break;
    const double step = rs / curvature;
    delta += step * u;
    res -= step * q;
    const double rs_next = res.squaredNorm();
    dir = res + (rs_next / rs) * dir;
    rs = rs_next;
    ++cg_iterations_;
  }
  return it.x + delta;
}

bool Solver::try_certify(const Iterate& it, RecoveryResult& res) { return offer(correct(it), res); }

// Records a candidate if it is feasible and improves on the best one; true once the gap closes.
bool Solver::offer(const Eigen::VectorXd& xc, RecoveryResult& res, const Eigen::VectorXd* dual) {
  const Eigen::VectorXd rc = y_ - A_.apply(xc);
  const double rcn = rc.norm();
  if (rcn > feasibility_limit()) return false;
  const Eigen::VectorXd& lambda = dual != nullptr ? *dual : rc;
  if (lambda.norm() > 0.0) {
    const double ginf = A_.apply_transpose(lambda).lpNorm<Eigen::Infinity>();
    if (ginf > 0.0) dual_best_ = std::max(dual_best_, (y_.dot(lambda) - sigma_ * lambda.norm()) / ginf);
  }
  const double primal = xc.lpNorm<1>();
  const double gap = (primal - dual_best_) / std::max(primal, 1e-300);
  if (primal < res.l1_value || !res.x_hat.size()) {
    res.x_hat = xc;
    res.l1_value = primal;
    res.residual_norm = rcn;
  }
  res.relative_gap = std::max((res.l1_value - dual_best_) / std::max(res.l1_value, 1e-300), 0.0);
  return gap <= opt_.tol;
}

// Active-set refinement from the iterate's support S with signs s. On S the
// minimizer of ||v||_1 with an active constraint is v = v0 - t G^-1 s, where v0
// is the restricted least-squares fit, G = A_S'A_S and t = sqrt(c / s'G^-1 s)
// with c = eps0^2 - ||y - A v0||^2. Its residual r satisfies A_S'r = t s, so
// lambda = r / t is dual feasible unless some |A_j'lambda| > 1 off S. Sign
// flips leave S; the largest violators join it with the sign of A_j'lambda.
std::optional<Solver::Polished> Solver::polish(const Eigen::VectorXd& x, double budget) {
  if (A_.kind() != MeasurementOperator::Kind::ExplicitMatrix) return std::nullopt;
  if (sigma_ == 0.0) {
    if (auto v = polish_vertex(x, budget)) return v;
  }
  const RowMatrix& M = A_.matrix();
  const Eigen::Index n = M.rows();
  const Eigen::Index p = M.cols();
  const double cutoff = 1e-10 * x.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> support;
  std::vector<double> signs;
  for (Eigen::Index i = 0; i < p; ++i) {
    if (std::abs(x[i]) > cutoff) {
      support.push_back(i);
      signs.push_back(x[i] > 0.0 ? 1.0 : -1.0);
    }
  }
  if (static_cast<Eigen::Index>(support.size()) > n) {
    // Keep the n largest magnitudes.
    std::vector<std::size_t> order(support.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    const auto keep = static_cast<std::ptrdiff_t>(n);
    std::nth_element(order.begin(), order.begin() + keep, order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(x[support[a]]) > std::abs(x[support[b]]);
    });
    order.resize(static_cast<std::size_t>(keep));
    std::sort(order.begin(), order.end());
    std::vector<Eigen::Index> s2;
    std::vector<double> g2;
    for (auto j : order) {
      s2.push_back(support[j]);
      g2.push_back(signs[j]);
    }
    support = std::move(s2);
    signs = std::move(g2);
  }
  std::vector<char> in_support(static_cast<std::size_t>(p), 0);
  std::optional<Polished> last;

  // A_S and its Gram matrix are kept across rounds and edited in place.
  auto k = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd As(n, k);
  for (Eigen::Index j = 0; j < k; ++j) As.col(j) = M.col(support[static_cast<std::size_t>(j)]);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(k, k);
  {
    const double kd = static_cast<double>(k);
    polish_flops_ += kd * kd * static_cast<double>(n);
  }
  G.selfadjointView<Eigen::Lower>().rankUpdate(As.transpose());
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();

  for (int round = 0; round < kPolishRounds; ++round) {
    k = static_cast<Eigen::Index>(support.size());
    if (k == 0 || k > n) break;
    const double kd = static_cast<double>(k);
    const double cost = kd * kd * kd / 3.0 + 4.0 * static_cast<double>(n) * kd + 2.0 * static_cast<double>(n * p);
    if (polish_flops_ + cost > budget) break;
    polish_flops_ += cost;

    const Eigen::VectorXd sgn = Eigen::Map<const Eigen::VectorXd>(signs.data(), k);
    const Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) break;
    const Eigen::VectorXd v0 = llt.solve(As.transpose() * y_);
    const Eigen::VectorXd r0 = y_ - As * v0;
    double c = sigma_ * sigma_ - r0.squaredNorm();
    if (c < 0.0) {
      if (r0.norm() > feasibility_limit()) break;
      c = 0.0;
    }
    const Eigen::VectorXd w = llt.solve(sgn);
    const double q = sgn.dot(w);
    if (!(q > 0.0)) break;
    const double t = std::sqrt(c / q);
    const Eigen::VectorXd v = v0 - t * w;

    std::vector<Eigen::Index> kept;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (v[j] * sgn[j] > 0.0) kept.push_back(j);
    }
    if (static_cast<Eigen::Index>(kept.size()) != k) {
      const auto m = static_cast<Eigen::Index>(kept.size());
      Eigen::MatrixXd As2(n, m);
      Eigen::MatrixXd G2(m, m);
      std::vector<Eigen::Index> support2;
      std::vector<double> signs2;
      for (Eigen::Index a = 0; a < m; ++a) {
        const auto ja = kept[static_cast<std::size_t>(a)];
        As2.col(a) = As.col(ja);
        for (Eigen::Index b = 0; b < m; ++b) G2(a, b) = G(ja, kept[static_cast<std::size_t>(b)]);
        support2.push_back(support[static_cast<std::size_t>(ja)]);
        signs2.push_back(signs[static_cast<std::size_t>(ja)]);
      }
      As = std::move(As2);
      G = std::move(G2);
      support = std::move(support2);
      signs = std::move(signs2);
      continue;
    }

    Polished out{Eigen::VectorXd::Zero(p), {}};
    for (Eigen::Index j = 0; j < k; ++j) out.x[support[static_cast<std::size_t>(j)]] = v[j];
    // With eps0 = 0 the residual vanishes; A_S G^-1 s is then the least-norm dual candidate.
    out.dual = t > 0.0 ? Eigen::VectorXd((y_ - As * v) / t) : Eigen::VectorXd(As * w);
    const Eigen::VectorXd g = A_.apply_transpose(out.dual);

    std::fill(in_support.begin(), in_support.end(), 0);
    for (auto i : support) in_support[static_cast<std::size_t>(i)] = 1;
    std::vector<std::pair<double, Eigen::Index>> violators;
    for (Eigen::Index i = 0; i < p; ++i) {
      if (!in_support[static_cast<std::size_t>(i)] && std::abs(g[i]) > 1.0 + 1e-9) violators.push_back({std::abs(g[i]), i});
    }
    last = std::move(out);
    if (violators.empty()) break;
    const std::size_t room = static_cast<std::size_t>(n) - support.size();
    const auto add = std::min({violators.size(), std::max<std::size_t>(4, support.size() / 32), room});
    if (add == 0) break;
    std::partial_sort(violators.begin(), violators.begin() + static_cast<std::ptrdiff_t>(add), violators.end(),
                      std::greater<>());
    const auto m = static_cast<Eigen::Index>(add);
    Eigen::MatrixXd Anew(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto i = violators[static_cast<std::size_t>(j)].second;
      Anew.col(j) = M.col(i);
      support.push_back(i);
      signs.push_back(g[i] > 0.0 ? 1.0 : -1.0);
    }
    polish_flops_ += static_cast<double>(n) * static_cast<double>(m) * (kd + static_cast<double>(m));
    Eigen::MatrixXd G2(k + m, k + m);
    G2.topLeftCorner(k, k) = G;
    G2.topRightCorner(k, m) = As.transpose() * Anew;
    G2.bottomLeftCorner(m, k) = G2.topRightCorner(k, m).transpose();
    G2.bottomRightCorner(m, m) = Anew.transpose() * Anew;
    G = std::move(G2);
    Eigen::MatrixXd As2(n, k + m);
    As2 << As, Anew;
    As = std::move(As2);
  }
  return last;
}

// Noiseless case: primal simplex on min ||v||_1 s.t. A v = y. The start is the
// iterate moved onto A_S v = y within its support S, then stripped of
// null-space directions of A_S (none of which may increase ||v||_1) until the
// columns are independent. The basis B is padded to n columns with zero
// entries; its dual is lambda = B^-T s, and a column with |A_j'lambda| > 1
// enters with the sign of A_j'lambda.
std::optional<Solver::Polished> Solver::polish_vertex(const Eigen::VectorXd& x, double budget) {
  const RowMatrix& M = A_.matrix();
  const Eigen::Index n = M.rows();
  const Eigen::Index p = M.cols();
  const double nd = static_cast<double>(n);
  const double np = nd * static_cast<double>(p);

  const double cutoff = 1e-10 * x.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> S;
  for (Eigen::Index i = 0; i < p; ++i) {
    if (std::abs(x[i]) > cutoff) S.push_back(i);
  }
  const double kd0 = static_cast<double>(std::max<std::size_t>(S.size(), static_cast<std::size_t>(n)));
  const double start_cost = 2.0 * np + 2.0 * nd * kd0 * kd0 * (kd0 - nd + 2.0);
  if (polish_flops_ + start_cost > budget) return std::nullopt;
  polish_flops_ += start_cost;

  std::vector<char> in_basis(static_cast<std::size_t>(p), 0);
  for (auto i : S) in_basis[static_cast<std::size_t>(i)] = 1;
  if (static_cast<Eigen::Index>(S.size()) < n) {
    // Too few columns to interpolate; take the ones most correlated with the residual.
    const Eigen::VectorXd g = M.transpose() * (y_ - M * x);
    std::vector<std::pair<double, Eigen::Index>> extra;
    for (Eigen::Index i = 0; i < p; ++i) {
      if (!in_basis[static_cast<std::size_t>(i)]) extra.push_back({std::abs(g[i]), i});
    }
    const auto need = static_cast<std::size_t>(n) - S.size();
    if (extra.size() < need) return std::nullopt;
    std::partial_sort(extra.begin(), extra.begin() + static_cast<std::ptrdiff_t>(need), extra.end(), std::greater<>());
    for (std::size_t j = 0; j < need; ++j) {
      S.push_back(extra[j].second);
      in_basis[static_cast<std::size_t>(extra[j].second)] = 1;
    }
  }

  auto k = static_cast<Eigen::Index>(S.size());
  Eigen::MatrixXd As(n, k);
  Eigen::VectorXd v(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    As.col(j) = M.col(S[static_cast<std::size_t>(j)]);
    v[j] = x[S[static_cast<std::size_t>(j)]];
  }
  {
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(As);
    if (cod.rank() < n) return std::nullopt;
    v += cod.solve(y_ - As * v);
  }

  auto remove = [&](Eigen::Index j) {
    in_basis[static_cast<std::size_t>(S[static_cast<std::size_t>(j)])] = 0;
    S.erase(S.begin() + j);
    const Eigen::Index last = As.cols() - 1;
    for (Eigen::Index c = j; c < last; ++c) {
      As.col(c) = As.col(c + 1);
      v[c] = v[c + 1];
    }
    As.conservativeResize(Eigen::NoChange, last);
    v.conservativeResize(last);
  };

  // Purification: each step zeroes one entry along a kernel direction.
  while (true) {
    for (Eigen::Index j = v.size() - 1; j >= 0; --j) {
      if (v[j] == 0.0) remove(j);
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(As);
    if (lu.rank() == As.cols()) break;
    Eigen::VectorXd d = lu.kernel().col(0);
    double slope = 0.0;
    for (Eigen::Index j = 0; j < v.size(); ++j) slope += (v[j] > 0.0 ? 1.0 : -1.0) * d[j];
    if (slope > 0.0) d = -d;
    Eigen::Index hit = -1;
    double t = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < 2 && hit < 0; ++attempt) {
      for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (v[j] * d[j] < 0.0 && -v[j] / d[j] < t) {
          t = -v[j] / d[j];
          hit = j;
        }
      }
      // Only possible when the slope is zero; the other direction is as good.
      if (hit < 0) d = -d;
    }
    if (hit < 0) return std::nullopt;
    v += t * d;
    v[hit] = 0.0;
  }
  if ((y_ - As * v).norm() > feasibility_limit()) return std::nullopt;

  // Pad to a square basis with zero entries, preferring columns the dual favours.
  k = static_cast<Eigen::Index>(S.size());
  std::vector<double> signs(S.size());
  for (std::size_t j = 0; j < S.size(); ++j) signs[j] = v[static_cast<Eigen::Index>(j)] > 0.0 ? 1.0 : -1.0;
  if (k < n) {
    const Eigen::VectorXd sg = Eigen::Map<const Eigen::VectorXd>(signs.data(), k);
    const Eigen::MatrixXd G = As.transpose() * As;
    const Eigen::VectorXd lambda = As * G.ldlt().solve(sg);
    const Eigen::VectorXd g = M.transpose() * lambda;
    std::vector<std::pair<double, Eigen::Index>> order;
    for (Eigen::Index i = 0; i < p; ++i) {
      if (!in_basis[static_cast<std::size_t>(i)]) order.push_back({std::abs(g[i]), i});
    }
    std::sort(order.begin(), order.end(), std::greater<>());
    Eigen::MatrixXd B(n, n);
    B.leftCols(k) = As;
    Eigen::Index filled = k;
    for (const auto& [mag, i] : order) {
      if (filled == n) break;
      B.col(filled) = M.col(i);
      if (Eigen::FullPivLU<Eigen::MatrixXd>(B.leftCols(filled + 1)).rank() <= filled) continue;
      S.push_back(i);
      signs.push_back(g[i] >= 0.0 ? 1.0 : -1.0);
      in_basis[static_cast<std::size_t>(i)] = 1;
      ++filled;
    }
    if (filled < n) return std::nullopt;
    As = std::move(B);
    v.conservativeResize(n);
    v.tail(n - k).setZero();
  }

  std::optional<Polished> last;
  const int max_pivots = static_cast<int>(std::max<Eigen::Index>(4 * n, kPolishRounds));
  for (int pivot = 0; pivot < max_pivots; ++pivot) {
    const double cost = 2.0 * nd * nd * nd / 3.0 + 2.0 * np + 6.0 * nd * nd;
    if (polish_flops_ + cost > budget) break;
    polish_flops_ += cost;

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(As);
    const Eigen::VectorXd sg = Eigen::Map<const Eigen::VectorXd>(signs.data(), n);
    v = lu.solve(y_);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (v[j] * sg[j] < 0.0) {
        if (std::abs(v[j]) > 1e-9 * v.cwiseAbs().maxCoeff()) return last;
        v[j] = 0.0;
      }
    }
    Polished out{Eigen::VectorXd::Zero(p), lu.transpose().solve(sg)};
    for (Eigen::Index j = 0; j < n; ++j) out.x[S[static_cast<std::size_t>(j)]] = v[j];
    const Eigen::VectorXd g = M.transpose() * out.dual;
    last = std::move(out);

    Eigen::Index enter = -1;
    double best = 1.0 + 1e-9;
    for (Eigen::Index i = 0; i < p; ++i) {
      if (!in_basis[static_cast<std::size_t>(i)] && std::abs(g[i]) > best) {
        best = std::abs(g[i]);
        enter = i;
      }
    }
    if (enter < 0) break;
    const double dir = g[enter] > 0.0 ? 1.0 : -1.0;
    // Raising the entering entry by theta moves the basic part by -theta dir w.
    const Eigen::VectorXd w = lu.solve(M.col(enter));
    Eigen::Index leave = -1;
    double theta = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double rate = dir * w[j] * sg[j];
      if (rate > 0.0 && std::abs(v[j]) / rate < theta) {
        theta = std::abs(v[j]) / rate;
        leave = j;
      }
    }
    if (leave < 0) break;
    in_basis[static_cast<std::size_t>(S[static_cast<std::size_t>(leave)])] = 0;
    in_basis[static_cast<std::size_t>(enter)] = 1;
    S[static_cast<std::size_t>(leave)] = enter;
    signs[static_cast<std::size_t>(leave)] = dir;
    As.col(leave) = M.col(enter);
  }
  return last;
}

RecoveryResult Solver::run() {
  RecoveryResult res;
  res.n_used = A_.rows();
  const Eigen::Index p = A_.cols();

  if (ynorm_ <= sigma_) {
    res.x_hat = Eigen::VectorXd::Zero(p);
    res.residual_norm = ynorm_;
    res.relative_gap = 0.0;
    res.converged = true;
    return res;
  }
  if (!least_squares_reaches_sigma()) {
    throw InfeasibleError("no vector satisfies ||A v - y|| <= eps0; measurements are inconsistent with the operator");
  }

  Iterate it{Eigen::VectorXd::Zero(p), y_, A_.apply_transpose(y_)};
  double tau = 0.0;
  int iter = 0;
  double last_attempt_gap = std::numeric_limits<double>::infinity();
  int last_attempt_iter = -1;

  // Initial step: exact line search along the negative gradient.
  double step = 1.0;
  {
    const Eigen::VectorXd q = A_.apply(it.atr);
    const double qq = q.squaredNorm();
    if (qq > 0.0) step = it.atr.squaredNorm() / qq;
  }
  const double step_min = 1e-10 * step;
  const double step_max = 1e10 * step;

  constexpr std::size_t kMemory = 10;
  std::array<double, kMemory> history{};

  auto newton_radius = [&](double rn, double ginf) { return tau + (rn - sigma_) * rn / ginf; };

  auto certified = [&](RecoveryResult& r, int at) {
    r.converged = true;
    r.bp_iterations = at;
    r.cg_iterations = cg_iterations_;
    r.dual_bound = dual_best_;
    return r;
  };

  // Support polishing is tried once the predicted gap is small, at growing intervals.
  constexpr double kPolishGap = 1e-2;
  constexpr int kMaxPolishInterval = 1000;
  int polish_interval = 25;
  int next_polish = 0;

  constexpr int kMaxNewtonUpdates = 500;
  while (iter < opt_.max_iter && res.newton_updates < kMaxNewtonUpdates) {
    // Newton update of the l1 radius from the current (approximate) Pareto point.
    {
      const double rn = it.r.norm();
      const double ginf = it.atr.lpNorm<Eigen::Infinity>();
      if (ginf == 0.0) break;
      double next = std::max(0.0, newton_radius(rn, ginf));
      if (sigma_ == 0.0 && rn <= feasibility_limit() && tau > 0.0) {
        // Overshoot: the iterate is feasible, so tau exceeds the optimum and
        // Newton cannot move left. Keep the point and bisect toward the dual bound.
        if (offer(it.x, res)) return certified(res, iter);
        next = dual_best_ + 0.5 * (std::min(tau, it.x.lpNorm<1>()) - dual_best_);
      }
      if (next < tau) {
        it.x = project_l1_ball(it.x, next);
        refresh(it);
      }
      tau = next;
      ++res.newton_updates;
    }

    double f = 0.5 * it.r.squaredNorm();
    history.fill(f);
    std::size_t slot = 0;
    int since_refresh = 0;

    while (iter < opt_.max_iter) {
      const double rn = it.r.norm();
      const double ginf = it.atr.lpNorm<Eigen::Infinity>();
      if (ginf == 0.0) break;
      const double ytr = y_.dot(it.r);
      const double lasso_gap = rn * rn - ytr + tau * ginf;
      dual_best_ = std::max(dual_best_, (ytr - sigma_ * rn) / ginf);

      const double predicted = rn > sigma_ ? newton_radius(rn, ginf) : it.x.lpNorm<1>();
      const double predicted_gap = (predicted - dual_best_) / std::max(predicted, 1e-300);
      const bool fresh = predicted_gap < 0.5 * last_attempt_gap || iter - last_attempt_iter >= 20;
      if (predicted_gap <= opt_.tol && fresh && iter != last_attempt_iter) {
        last_attempt_gap = std::max(predicted_gap, 0.0);
        last_attempt_iter = iter;
        if (try_certify(it, res)) return certified(res, iter);
      }
      if ((predicted_gap <= kPolishGap || sigma_ == 0.0) && iter >= next_polish) {
        next_polish = iter + polish_interval;
        polish_interval = std::min(2 * polish_interval, kMaxPolishInterval);
        // Polishing may spend as much work as the gradient iterations have.
        const double budget = 4.0 * static_cast<double>(A_.rows() * p) * (iter + 1);
        if (const auto v = polish(it.x, budget); v && offer(v->x, res, &v->dual)) return certified(res, iter);
      }

      // A feasible iterate with eps0 = 0 means tau is past the optimum; the
      // outer loop handles it.
      if (sigma_ == 0.0 && tau > 0.0 && rn <= feasibility_limit()) break;
      const double root_error = std::abs(f - 0.5 * sigma_ * sigma_);
      if (lasso_gap <= std::max(0.5 * root_error, 1e-15 * ynorm_ * ynorm_)) break;

      // Spectral projected-gradient step with nonmonotone backtracking.
      const Eigen::VectorXd d = project_l1_ball(it.x + step * it.atr, tau) - it.x;
      const double gtd = -it.atr.dot(d);
      if (!(gtd < 0.0)) break;
      const Eigen::VectorXd ad = A_.apply(d);
      const double fmax = *std::max_element(history.begin(), history.end());

      double lambda = 1.0;
      Eigen::VectorXd r_next = it.r - ad;
      double f_next = 0.5 * r_next.squaredNorm();
      for (int ls = 0; ls < 40 && f_next > fmax + 1e-4 * lambda * gtd; ++ls) {
        const double denom = 2.0 * (f_next - f - lambda * gtd);
        double trial = denom > 0.0 ? -gtd * lambda * lambda / denom : 0.5 * lambda;
        lambda = std::clamp(trial, 0.1 * lambda, 0.5 * lambda);
        r_next = it.r - lambda * ad;
        f_next = 0.5 * r_next.squaredNorm();
      }

      const Eigen::VectorXd s = lambda * d;
      it.x += s;
      if (++since_refresh >= 50) {
        it.r = y_ - A_.apply(it.x);
        since_refresh = 0;
      } else {
        it.r = std::move(r_next);
      }
      Eigen::VectorXd atr_next = A_.apply_transpose(it.r);
      const double sty = -s.dot(atr_next - it.atr);
      it.atr = std::move(atr_next);
      f = 0.5 * it.r.squaredNorm();
      history[slot] = f;
      slot = (slot + 1) % kMemory;
      step = sty > 0.0 ? std::clamp(s.squaredNorm() / sty, step_min, step_max) : step_max;
      ++iter;
    }
  }

  // Budget exhausted: return the best certified-feasible point available.
  try_certify(it, res);
  if (!res.x_hat.size()) {
    res.x_hat = correct(it);
    const Eigen::VectorXd rc = y_ - A_.apply(res.x_hat);
    res.residual_norm = rc.norm();
    res.l1_value = res.x_hat.lpNorm<1>();
    res.relative_gap = (res.l1_value - dual_best_) / std::max(res.l1_value, 1e-300);
  }
  res.converged = res.relative_gap <= opt_.tol && res.residual_norm <= feasibility_limit();
  res.bp_iterations = iter;
  res.cg_iterations = cg_iterations_;
  res.dual_bound = dual_best_;
  return res;
}

}  // namespace

RecoveryResult basis_pursuit(const MeasurementOperator& A, const Eigen::VectorXd& y, double eps0,
                             const BasisPursuitOptions& options) {
  if (y.size() != A.rows()) throw ParameterError("measurement vector length does not match operator rows");
  if (!(eps0 >= 0.0)) throw ParameterError("eps0 must be nonnegative");
  if (!(options.tol > 0.0)) throw ParameterError("tol must be positive");
  if (options.max_iter < 1) throw ParameterError("max_iter must be positive");
  Solver solver(A, y, eps0, options);
  return solver.run();
}

}  // namespace sparsest
