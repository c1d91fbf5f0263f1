#include "lasernoise/engine.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "lasernoise/curve_io.hpp"
#include "lasernoise/errors.hpp"

namespace lasernoise::engine {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

std::string fmt(double v) { return io::format_number(v); }

}  // namespace

LinearNoiseModel::LinearNoiseModel(Eigen::MatrixXd M, Eigen::MatrixXd L, Eigen::MatrixXd C, Eigen::RowVectorXd a,
                                   Eigen::RowVectorXd b, double shot_level, std::string label)
    : M_(std::move(M)),
      L_(std::move(L)),
      C_(std::move(C)),
      a_(std::move(a)),
      b_(std::move(b)),
      shot_level_(shot_level),
      label_(std::move(label)) {
  const auto n = M_.rows();
  const auto m = L_.cols();
  if (n == 0 || M_.cols() != n) throw ModelError(label_ + ": drift matrix must be square and non-empty");
  if (L_.rows() != n) throw ModelError(label_ + ": input matrix must have one row per state");
  if (C_.rows() != m || C_.cols() != m) throw ModelError(label_ + ": correlation matrix must be sources x sources");
  if (a_.size() != n) throw ModelError(label_ + ": observable row must have one entry per state");
  if (b_.size() != m) throw ModelError(label_ + ": feedthrough row must have one entry per source");
  if (!all_finite(M_) || !all_finite(L_) || !all_finite(C_) || !a_.allFinite() || !b_.allFinite()) {
    throw ModelError(label_ + ": non-finite matrix entry");
  }
  const double scale = std::max(1.0, C_.cwiseAbs().maxCoeff());
  if ((C_ - C_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ModelError(label_ + ": correlation matrix is not symmetric");
  }
  if (!(shot_level_ > 0.0) || !std::isfinite(shot_level_)) throw ModelError(label_ + ": shot_level must be > 0");

  const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(M_, false).eigenvalues();
  for (Eigen::Index k = 0; k < eig.size(); ++k) {
    if (!(eig[k].real() > 0.0)) {
      std::ostringstream os;
      os << label_ << ": unstable drift, eigenvalue " << eig[k].real() << (eig[k].imag() >= 0 ? "+" : "")
         << eig[k].imag() << "i has non-positive real part";
      throw ModelError(os.str());
    }
  }
}

std::string describe(const ScenarioSpec& spec) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Single& s) { os << "Single(p=" << fmt(s.p) << ")"; },
                 [&](const Fbl& s) {
                   os << "FBL(p=" << fmt(s.p) << ", lambda=" << fmt(s.lambda);
                   if (s.filter_bandwidth) os << ", filter_bandwidth=" << fmt(*s.filter_bandwidth);
                   os << ")";
                 },
                 [&](const Coupled& s) {
                   os << "Coupled(p=" << fmt(s.p) << ", kappa=" << fmt(s.kappa) << ", kappa_tilde=" << fmt(s.kappa_tilde)
                      << ", kappa0=" << fmt(s.kappa0) << ")";
                 },
                 [&](const CoupledFbl& s) {
                   os << "CoupledFBL(p=" << fmt(s.p) << ", lambda=" << fmt(s.lambda) << ", kappa=" << fmt(s.kappa)
                      << ", kappa_tilde=" << fmt(s.kappa_tilde) << ", kappa0=" << fmt(s.kappa0) << ")";
                 },
             },
             spec.system);
  if (std::holds_alternative<Coupled>(spec.system) || std::holds_alternative<CoupledFbl>(spec.system)) {
    os << (spec.detector == Detector::Measuring ? " [measuring detector]" : " [exciting detector]");
  }
  return os.str();
}

namespace {

void check_p(double p, const std::string& label) {
  if (!(p <= 1.0) || !std::isfinite(p)) throw ModelError(label + ": p must be finite and <= 1");
}

void check_coupled_steady(double kappa, double kappa_tilde, double kappa0, const SteadyState& st,
                          const std::string& label) {
  if (!(kappa > 0.0) || !(kappa_tilde > 0.0) || !(kappa0 > 0.0)) {
    throw ModelError(label + ": coupled scenarios need kappa, kappa_tilde, kappa0 > 0");
  }
  const double lhs = st.n_tilde * kappa_tilde;
  const double rhs = st.n * kappa0;
  if (!(st.n > 0.0) || std::abs(lhs - rhs) > 1e-9 * std::abs(rhs)) {
    throw ModelError(label + ": steady state inconsistent with n_tilde*kappa_tilde = n*kappa0");
  }
}

LinearNoiseModel single_laser(double p, double lambda, std::optional<double> filter, const SteadyState& st,
                              const std::string& label) {
  check_p(p, label);
  if (!(st.n > 0.0) || !(st.i_bar > 0.0)) throw ModelError(label + ": steady state needs n > 0 and i_bar > 0");
  if (!(lambda >= 0.0)) throw ModelError(label + ": lambda must be >= 0");
  const double kappa = st.i_bar / st.n;
  const double ib = st.i_bar;

  // Sources (F, S): <FF> = -p i_bar, <SS> = i_bar.
  Eigen::MatrixXd C = Eigen::Vector2d(-p * ib, ib).asDiagonal();
  Eigen::RowVectorXd b(2);
  b << 0.0, 1.0;

  if (!filter) {
    Eigen::MatrixXd M(1, 1), L(1, 2);
    Eigen::RowVectorXd a(1);
    M << (1.0 + lambda) * kappa;
    L << 1.0, -lambda;
    a << kappa;
    return {M, L, C, a, b, ib, label};
  }

  // Causal loop: state (eps, h), h the low-pass filtered current fluctuation,
  //   d eps/dt = -kappa eps - lambda (R/i_bar) h + F,  dh/dt = G (kappa eps + S - h).
  const double G = *filter;
  if (!(G > 0.0)) throw ModelError(label + ": filter_bandwidth must be > 0");
  Eigen::MatrixXd M(2, 2), L(2, 2);
  Eigen::RowVectorXd a(2);
  M << kappa, lambda, -G * kappa, G;
  L << 1.0, 0.0, 0.0, G;
  a << kappa, 0.0;
  return {M, L, C, a, b, ib, label};
}

}  // namespace

LinearNoiseModel build_model(const ScenarioSpec& spec, const SteadyState& steady) {
  const std::string label = describe(spec);
  return std::visit(
      Overloaded{
          [&](const Single& s) { return single_laser(s.p, 0.0, std::nullopt, steady, label); },
          [&](const Fbl& s) { return single_laser(s.p, s.lambda, s.filter_bandwidth, steady, label); },
          [&](const Coupled& s) {
            check_p(s.p, label);
            check_coupled_steady(s.kappa, s.kappa_tilde, s.kappa0, steady, label);
            const double k = s.kappa, kt = s.kappa_tilde, k0 = s.kappa0;
            const double n = steady.n, nt = steady.n_tilde;
            Eigen::MatrixXd M(2, 2), L = Eigen::MatrixXd::Zero(2, 3), C = Eigen::MatrixXd::Zero(3, 3);
            M << k + k0, -kt, -k0, 2.0 * kt;
            L(0, 0) = 1.0;
            L(1, 1) = 1.0;
            // Sources (F, F~, S_obs). The pump-transfer correlation <F F~> = kappa0 n
            // is what makes the measuring-laser spectrum come out exactly as the
            // closed form for every p.
            C(0, 0) = -s.p * (k + k0) * n;
            C(1, 1) = -2.0 * kt * nt;
            C(0, 1) = C(1, 0) = k0 * n;
            Eigen::RowVectorXd a(2), b(3);
            b << 0.0, 0.0, 1.0;
            double shot = 0.0;
            if (spec.detector == Detector::Measuring) {
              a << 0.0, kt;
              shot = kt * nt;
            } else {
              a << k, 0.0;
              shot = k * n;
            }
            C(2, 2) = shot;
            return LinearNoiseModel(M, L, C, a, b, shot, label);
          },
          [&](const CoupledFbl& s) {
            check_p(s.p, label);
            check_coupled_steady(s.kappa, s.kappa_tilde, s.kappa0, steady, label);
            if (!(s.lambda >= 0.0)) throw ModelError(label + ": lambda must be >= 0");
            const double k = s.kappa, kt = s.kappa_tilde, k0 = s.kappa0, l = s.lambda;
            const double n = steady.n, nt = steady.n_tilde;
            Eigen::MatrixXd M(2, 2), L = Eigen::MatrixXd::Zero(2, 4), C = Eigen::MatrixXd::Zero(4, 4);
            M << (k + k0) * (1.0 + l), -kt, -k0, 2.0 * kt;
            // Sources (F, F~, S, S~); S is the feedback detector, S~ the measuring one.
            L(0, 0) = 1.0;
            L(0, 2) = -l * (1.0 + k0 / k);
            L(1, 1) = 1.0;
            C(0, 0) = -s.p * (k + k0) * n;
            C(1, 1) = -2.0 * kt * nt;
            C(0, 1) = C(1, 0) = k0 * n;
            C(2, 2) = k * n;
            C(3, 3) = kt * nt;
            Eigen::RowVectorXd a(2), b(4);
            if (spec.detector == Detector::Measuring) {
              a << 0.0, kt;
              b << 0.0, 0.0, 0.0, 1.0;
              return LinearNoiseModel(M, L, C, a, b, kt * nt, label);
            }
            a << k, 0.0;
            b << 0.0, 0.0, 1.0, 0.0;
            return LinearNoiseModel(M, L, C, a, b, k * n, label);
          },
      },
      spec.system);
}

Eigen::RowVectorXcd response(const LinearNoiseModel& model, double omega) {
  using cd = std::complex<double>;
  Eigen::MatrixXcd A = model.drift().cast<cd>();
  A.diagonal().array() -= cd(0.0, omega);
  // v = a A^-1 L + b, computed as (A^T)^-1 a^T to avoid forming the inverse.
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A.transpose());
  const Eigen::VectorXcd y = lu.solve(model.observable().transpose().cast<cd>());
  LASERNOISE_ENSURE(y.allFinite(), "singular -i w Id + M for a stable drift");
  return y.transpose() * model.input().cast<cd>() + model.feedthrough().cast<cd>();
}

double psd_at(const LinearNoiseModel& model, double omega) {
  const Eigen::RowVectorXcd v = response(model, omega);
  const auto& C = model.correlation();
  std::complex<double> acc = 0.0;
  double magnitude = 0.0;
  for (Eigen::Index j = 0; j < C.rows(); ++j) {
    for (Eigen::Index k = 0; k < C.cols(); ++k) {
      const std::complex<double> term = v[j] * C(j, k) * std::conj(v[k]);
      acc += term;
      magnitude += std::abs(term);
    }
  }
  const double result = acc.real() / model.shot_level();
  // v C v^H is Hermitian for real symmetric C: the imaginary part is rounding only.
  LASERNOISE_ENSURE(std::abs(acc.imag()) <= 1e-10 * std::max(std::abs(acc.real()), 1e-3 * magnitude),
                    "complex spectral density for " + model.label());
  return result;
}

SpectrumCurve psd_curve(const LinearNoiseModel& model, std::span<const double> omega_grid) {
  SpectrumCurve c;
  c.label = "engine " + model.label();
  c.omega.assign(omega_grid.begin(), omega_grid.end());
  c.values.reserve(omega_grid.size());
  std::size_t negative = 0;
  double worst = 0.0;
  // Shot-normalized values are O(1); anything above -1e-9 is rounding around an exact zero.
  constexpr double kNegativeThreshold = -1e-9;
  for (double w : omega_grid) {
    const double v = psd_at(model, w);
    if (v < kNegativeThreshold) {
      ++negative;
      worst = std::min(worst, v);
    }
    c.values.push_back(v);
  }
  c.add_meta("model", model.label());
  if (negative > 0) {
    c.add_meta("warning", "negative spectral density at " + std::to_string(negative) +
                              " grid points (min " + fmt(worst) + "): scenario outside the linear theory");
  }
  c.validate();
  return c;
}

}  // namespace lasernoise::engine
