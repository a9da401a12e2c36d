#include "gpeio/solver/marginalization.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>

#include "gpeio/common/error.hpp"

namespace gpeio {

MarginalPrior marginalize(const FactorGraphProblem& p, std::size_t retire, const std::vector<bool>& retire_landmark,
                          MarginalizationStats* stats) {
  MarginalizationStats local;
  MarginalizationStats& st = stats ? *stats : local;
  st = {};
  const std::size_t n = p.num_knots();
  if (retire > n) throw Error(ErrorCode::kInvalidArgument, "cannot retire more knots than the problem has");
  const std::size_t nx = kKnotDim * n;
  const std::size_t nl = p.landmarks.size();
  auto retired_lm = [&](int l) { return l >= 0 && static_cast<std::size_t>(l) < retire_landmark.size() && retire_landmark[l]; };

  MatX H = MatX::Zero(nx + nl, nx + nl);
  VecX g = VecX::Zero(nx + nl);
  std::vector<char> touched(n, 0);
  evaluate_factors(p, true, [&](const FactorEval& f) {
    bool touches_retired = retired_lm(f.landmark);
    for (const KnotJacobian& kj : f.knots) touches_retired |= kj.knot < retire;
    if (f.kind == FactorKind::kMarginal) touches_retired = true;
    if (!touches_retired) return;
    if (f.landmark >= 0 && !retired_lm(f.landmark)) {
      ++st.dropped_visual;
      return;
    }
    ++st.factors;
    if (f.r.size() == 0) return;
    MatX J = MatX::Zero(f.r.size(), nx + nl);
    for (const KnotJacobian& kj : f.knots) {
      J.middleCols<kKnotDim>(kKnotDim * kj.knot) += kj.J;
      touched[kj.knot] = 1;
    }
    if (f.landmark >= 0) J.col(nx + f.landmark) += f.J_landmark;
    H.noalias() += J.transpose() * J;
    g.noalias() += J.transpose() * f.r;
  });

  std::vector<int> m_idx, r_idx;
  std::vector<std::size_t> kept_knots;
  for (std::size_t k = 0; k < n; ++k) {
    if (!touched[k] && k >= retire) continue;
    if (k >= retire) kept_knots.push_back(k);
    for (int d = 0; d < kKnotDim; ++d) {
      const std::size_t i = kKnotDim * k + d;
      if (p.is_fixed(i)) continue;
      (k < retire ? m_idx : r_idx).push_back(static_cast<int>(i));
    }
  }
  for (std::size_t l = 0; l < nl; ++l)
    if (retired_lm(static_cast<int>(l))) m_idx.push_back(static_cast<int>(nx + l));

  MarginalPrior out;
  if (r_idx.empty()) return out;
  const MatX Hmm = H(m_idx, m_idx), Hrm = H(r_idx, m_idx), Hrr = H(r_idx, r_idx);
  const VecX gm = g(m_idx), gr = g(r_idx);

  MatX Hp = Hrr;
  VecX bp = gr;
  if (!m_idx.empty()) {
    MatX A = 0.5 * (Hmm + Hmm.transpose());
    Eigen::SelfAdjointEigenSolver<MatX> es(A, Eigen::EigenvaluesOnly);
    const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
    if (es.eigenvalues().minCoeff() <= 1e-12 * top) {
      A.diagonal().array() += 1e-9 * top;
      ++st.regularized;
    }
    const Eigen::LDLT<MatX> ldlt(A);
    Hp.noalias() -= Hrm * ldlt.solve(Hrm.transpose());
    bp.noalias() -= Hrm * ldlt.solve(gm);
  }
  Hp = 0.5 * (Hp + Hp.transpose());

  Eigen::SelfAdjointEigenSolver<MatX> es(Hp);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 1e-12 * top && es.eigenvalues()(i) > 0.0) keep.push_back(i);
  if (keep.empty()) return out;

  // Columns of the prior span full knot blocks; held dimensions stay zero.
  const std::size_t nk = kept_knots.size();
  std::vector<int> col_of(nx, -1);
  for (std::size_t i = 0; i < nk; ++i)
    for (int d = 0; d < kKnotDim; ++d) col_of[kKnotDim * kept_knots[i] + d] = static_cast<int>(kKnotDim * i + d);
  out.J = MatX::Zero(keep.size(), kKnotDim * nk);
  out.r0 = VecX::Zero(keep.size());
  for (std::size_t row = 0; row < keep.size(); ++row) {
    const double lam = es.eigenvalues()(keep[row]);
    const VecX u = es.eigenvectors().col(keep[row]);
    for (std::size_t j = 0; j < r_idx.size(); ++j) out.J(row, col_of[r_idx[j]]) = std::sqrt(lam) * u(j);
    out.r0(row) = u.dot(bp) / std::sqrt(lam);
  }
  for (std::size_t k : kept_knots) {
    out.knot_times.push_back(p.trajectory.time(k));
    out.x_lin.push_back(p.trajectory.state(k));
    out.b_lin.push_back(p.biases[k]);
  }
  return out;
}

}  // namespace gpeio
