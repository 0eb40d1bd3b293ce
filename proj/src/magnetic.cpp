// SPDX-License-Identifier: Apache-2.0
#include "modspec/magnetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "modspec/parallel.hpp"

namespace modspec {

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes via Newton iteration on the Legendre recurrence.
struct QuadRule {
  RVec nodes;
  RVec weights;
};

QuadRule gauss_legendre(int n) {
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes(n - 1 - i) = x;
    rule.weights(n - 1 - i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

// Orthonormal Hermite functions psi_0..psi_{m-1} evaluated at u.
Eigen::MatrixXd hermite_functions(const RVec& u, int m) {
  Eigen::MatrixXd out(u.size(), m);
  const double norm0 = std::pow(kPi, -0.25);
  for (Eigen::Index r = 0; r < u.size(); ++r)
    out(r, 0) = norm0 * std::exp(-0.5 * u(r) * u(r));
  if (m > 1) out.col(1) = std::numbers::sqrt2 * u.cwiseProduct(out.col(0));
  for (int j = 2; j < m; ++j)
    out.col(j) = std::sqrt(2.0 / j) * u.cwiseProduct(out.col(j - 1)) -
                 std::sqrt(double(j - 1) / j) * out.col(j - 2);
  return out;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct AlphaKey {
  long p, q;
  int osc_dim, k, l;
  bool operator<(const AlphaKey& o) const {
    return std::tie(p, q, osc_dim, k, l) <
           std::tie(o.p, o.q, o.osc_dim, o.k, o.l);
  }
};

std::mutex alpha_cache_mutex;
std::map<AlphaKey, TranslationMatrix> alpha_cache;

} // namespace

RationalApprox continued_fraction_approx(double theta, long q_max) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("rational approx: theta must lie in (0,1)");
  if (q_max < 1) throw std::invalid_argument("rational approx: q_max < 1");
  // Convergents h_i / k_i of the continued fraction expansion.
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double x = theta;
  RationalApprox best{0, 1};
  for (int iter = 0; iter < 64; ++iter) {
    const double floor_x = std::floor(x);
    const long a = long(floor_x);
    const long h2 = a * h1 + h0;
    const long k2 = a * k1 + k0;
    if (k2 > q_max) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (k1 >= 1) best = RationalApprox{h1, k1};
    const double frac = x - floor_x;
    if (frac < 1e-12) break;
    x = 1.0 / frac;
  }
  return best;
}

TranslationMatrix oscillator_translation(double theta, int osc_dim, int k,
                                         int l) {
  if (osc_dim < 1)
    throw std::invalid_argument("translation: osc_dim must be >= 1");
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("translation: theta must lie in (0,1)");
  const double sigma = std::sqrt(theta / (2.0 * kPi));
  const double reach = sigma * (std::sqrt(2.0 * osc_dim + 1.0) + 8.0);
  // Support of phi_j(t) intersected with the support of phi_i(t+k).
  const double lo = std::max(-reach, -reach - k);
  const double hi = std::min(reach, reach - k);
  TranslationMatrix out{k, l, Mat::Zero(osc_dim, osc_dim), 1.0};
  if (lo >= hi) return out;

  // Panels short against both the fastest oscillator wavelength and the
  // modulation period; a 32-point rule per panel is then far beyond the
  // target accuracy. Total nodes are kept at >= 4 * osc_dim.
  const double wavenumber =
      std::sqrt(2.0 * osc_dim + 1.0) / sigma + 2.0 * kPi * std::abs(l) / theta;
  const double width = 4.0 / wavenumber;
  int panels = int(std::ceil((hi - lo) / width));
  panels = std::max(panels, (4 * osc_dim + 31) / 32);
  static const QuadRule base = gauss_legendre(32);
  const Eigen::Index total = Eigen::Index(panels) * 32;
  RVec nodes(total), weights(total);
  for (int p = 0; p < panels; ++p) {
    const double a = lo + (hi - lo) * double(p) / panels;
    const double b = lo + (hi - lo) * double(p + 1) / panels;
    for (int j = 0; j < 32; ++j) {
      nodes(p * 32 + j) = 0.5 * (a + b) + 0.5 * (b - a) * base.nodes(j);
      weights(p * 32 + j) = 0.5 * (b - a) * base.weights(j);
    }
  }

  const double root_sigma = std::sqrt(sigma);
  const Eigen::MatrixXd phi_j = hermite_functions(nodes / sigma, osc_dim) / root_sigma;
  const Eigen::MatrixXd phi_ik =
      hermite_functions((nodes.array() + double(k)).matrix() / sigma, osc_dim) /
      root_sigma;
  Vec mod(total);
  for (Eigen::Index r = 0; r < total; ++r)
    mod(r) = std::polar(weights(r), 2.0 * kPi * l * nodes(r) / theta);
  // alpha_ij = sum_r phi_i(t_r + k) e^{2 pi i l t_r / theta} w_r phi_j(t_r)
  out.alpha = (phi_ik.transpose().cast<Complex>() * mod.asDiagonal()) *
              phi_j.cast<Complex>();

  const int half = std::max(1, osc_dim / 2);
  const Mat gram = out.alpha * out.alpha.adjoint();
  double defect = 0.0;
  for (int i = 0; i < half; ++i)
    for (int n2 = 0; n2 < half; ++n2)
      defect = std::max(defect,
                        std::abs(gram(i, n2) - (i == n2 ? 1.0 : 0.0)));
  out.inner_defect = defect;
  return out;
}

MagneticModel MagneticModel::build(double theta, long q_max, int osc_dim,
                                   std::vector<FourierCoeff> coeffs, int bloch1,
                                   int bloch2) {
  if (osc_dim < 1) throw std::invalid_argument("model: osc_dim must be >= 1");
  if (bloch1 < 1 || bloch2 < 1)
    throw std::invalid_argument("model: Bloch grid must be nonempty");
  MagneticModel model;
  model.theta_requested_ = theta;
  model.approx_ = continued_fraction_approx(theta, q_max);
  if (model.approx_.p < 1 || model.approx_.p >= model.approx_.q)
    throw std::invalid_argument(
        "model: no rational approximation with denominator <= " +
        std::to_string(q_max) + " keeps theta inside (0,1)");
  if (std::abs(theta - model.approx_.value()) >
      1.0 / double(model.approx_.q * model.approx_.q) + 1e-15)
    throw std::logic_error("model: convergent quality violated");
  model.osc_dim_ = osc_dim;
  model.bloch1_ = bloch1;
  model.bloch2_ = bloch2;
  model.coeffs_ = std::move(coeffs);

  // Hermitian coefficient set: w_{-k,-l} must be stored and conjugate.
  for (const FourierCoeff& c : model.coeffs_) {
    model.coeff_l1_ += std::abs(c.w);
    if (c.k == 0 && c.l == 0) {
      if (std::abs(c.w.imag()) > 1e-14)
        throw std::invalid_argument("model: w_{0,0} must be real");
      continue;
    }
    bool paired = false;
    for (const FourierCoeff& d : model.coeffs_)
      if (d.k == -c.k && d.l == -c.l &&
          std::abs(d.w - std::conj(c.w)) <= 1e-12) {
        paired = true;
        break;
      }
    if (!paired)
      throw std::invalid_argument(
          "model: coefficient (" + std::to_string(c.k) + "," +
          std::to_string(c.l) + ") lacks its Hermitian partner");
  }

  const std::size_t npts = std::size_t(bloch1) * std::size_t(bloch2);
  std::vector<double> labels(npts), weights(npts, 1.0 / double(npts));
  std::vector<int> dims(npts, int(model.approx_.q));
  for (std::size_t g = 0; g < npts; ++g) labels[g] = double(g);
  double sum = 0.0;
  for (double w : weights) sum += w;
  weights.back() += 1.0 - sum;
  model.grid_ = make_grid(std::move(labels), std::move(weights), std::move(dims));
  return model;
}

std::pair<double, double> MagneticModel::bloch_phase(std::size_t g) const {
  const std::size_t i = g / std::size_t(bloch2_);
  const std::size_t j = g % std::size_t(bloch2_);
  return {2.0 * kPi * double(i) / double(bloch1_),
          2.0 * kPi * double(j) / double(bloch2_)};
}

TranslationMatrix translation_matrix(const MagneticModel& model, int k, int l) {
  const AlphaKey key{model.approx().p, model.approx().q, model.osc_dim(), k, l};
  {
    std::lock_guard<std::mutex> lock(alpha_cache_mutex);
    auto it = alpha_cache.find(key);
    if (it != alpha_cache.end()) return it->second;
  }
  TranslationMatrix tm =
      oscillator_translation(model.theta(), model.osc_dim(), k, l);
  std::lock_guard<std::mutex> lock(alpha_cache_mutex);
  alpha_cache.emplace(key, tm);
  return tm;
}

ModuleOperator build_delta(const MagneticModel& model) {
  const GridPtr& grid = model.bloch_grid();
  const long q = model.approx().q;
  const double theta = model.theta();
  const Eigen::Index dim = Eigen::Index(model.osc_dim()) * q;
  Mat fiber = Mat::Zero(dim, dim);
  for (int i = 0; i < model.osc_dim(); ++i)
    for (long s = 0; s < q; ++s)
      fiber(Eigen::Index(i) * q + s, Eigen::Index(i) * q + s) =
          (2.0 * i + 1.0) * theta;
  std::vector<Mat> fibers(grid->size(), fiber);
  return ModuleOperator(grid, model.osc_dim(), std::move(fibers));
}

namespace {

// Cyclic shift by k with Bloch wrap phase phi1, times the diagonal
// modulation exp(2 pi i l (m + phi2/2pi) / theta) on the s-lattice.
Mat s_lattice_factor(long q, double theta, int k, int l, double phi1,
                     double phi2) {
  Mat c = Mat::Zero(q, q);
  const double delta = phi2 / (2.0 * kPi);
  for (long m = 0; m < q; ++m) {
    const long shifted = m + k;
    long row = shifted % q;
    if (row < 0) row += q;
    const long wraps = (shifted - row) / q;
    const double arg =
        2.0 * kPi * l * (double(m) + delta) / theta + phi1 * double(wraps);
    c(row, m) = std::polar(1.0, arg);
  }
  return c;
}

} // namespace

ModuleOperator build_perturbation(const MagneticModel& model) {
  const GridPtr& grid = model.bloch_grid();
  const long q = model.approx().q;
  const double theta = model.theta();
  const Eigen::Index dim = Eigen::Index(model.osc_dim()) * q;

  // Canonical half of the coefficient set; partners enter as adjoints so W
  // is Hermitian by construction.
  struct Term {
    FourierCoeff coeff;
    Mat alpha_t;  // operator matrix on the oscillator factor
  };
  std::vector<Term> half_terms;
  Complex w00 = 0.0;
  for (const FourierCoeff& c : model.coeffs()) {
    if (c.k == 0 && c.l == 0) {
      w00 = c.w;
      continue;
    }
    if (c.k > 0 || (c.k == 0 && c.l > 0)) {
      const TranslationMatrix tm = translation_matrix(model, c.k, c.l);
      half_terms.push_back(Term{c, tm.alpha.transpose()});
    }
  }

  std::vector<Mat> fibers(grid->size());
  parallel_for(grid->size(), [&](std::size_t g) {
    const auto [phi1, phi2] = model.bloch_phase(g);
    Mat w = Mat::Zero(dim, dim);
    if (w00 != Complex(0.0))
      w += w00.real() * Mat::Identity(dim, dim);
    for (const Term& term : half_terms) {
      const Mat c = s_lattice_factor(q, theta, term.coeff.k, term.coeff.l,
                                     phi1, phi2);
      const Mat b = kron(term.alpha_t, c);
      w += term.coeff.w * b + std::conj(term.coeff.w) * b.adjoint();
    }
    fibers[g] = std::move(w);
  });
  ModuleOperator out(grid, model.osc_dim(), std::move(fibers));
  const double defect = hermitian_defect(out);
  if (defect > 1e-9)
    throw std::logic_error("perturbation: Hermitian defect " +
                           std::to_string(defect));
  return out;
}

SweepResult spectrum_sweep(const std::vector<FourierCoeff>& coeffs,
                           const std::vector<double>& thetas, long q_max,
                           int osc_dim, int bloch1, int bloch2) {
  SweepResult result;
  for (double theta : thetas) {
    RationalApprox approx;
    try {
      approx = continued_fraction_approx(theta, q_max);
    } catch (const std::exception& e) {
      result.notices.push_back("theta " + std::to_string(theta) +
                               " skipped: " + e.what());
      continue;
    }
    if (approx.p < 1 || approx.p >= approx.q) {
      std::ostringstream os;
      os << "theta " << theta << " skipped: denominator bound " << q_max
         << " leaves no valid approximation";
      result.notices.push_back(os.str());
      continue;
    }
    const MagneticModel model =
        MagneticModel::build(theta, q_max, osc_dim, coeffs, bloch1, bloch2);
    const double theta_eff = model.theta();
    const ModuleOperator w = build_perturbation(model);
    const ModuleOperator d = build_delta(model) + w;
    const double ceiling = double(osc_dim) * theta_eff;

    GapReport report;
    report.theta = theta_eff;
    report.coeff_l1 = model.coeff_l1();
    report.w_norm = sup_norm(w);
    report.hypothesis = report.w_norm < theta_eff;
    report.applicable = report.hypothesis;

    const std::size_t npts = model.bloch_grid()->size();
    std::vector<std::vector<double>> values(npts);
    parallel_for(npts, [&](std::size_t g) {
      const HermEig eig = herm_eig(d.fiber(g));
      values[g].assign(eig.values.data(), eig.values.data() + eig.values.size());
    });

    double worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < npts; ++g) {
      const auto [phi1, phi2] = model.bloch_phase(g);
      for (double value : values[g]) {
        SweepRow row;
        row.theta = theta_eff;
        row.bloch1 = phi1;
        row.bloch2 = phi2;
        row.value = value;
        row.trusted = value < ceiling;
        result.rows.push_back(row);
        if (row.trusted) {
          const double nearest =
              2.0 * theta_eff * std::round(value / (2.0 * theta_eff));
          worst_margin = std::min(worst_margin, std::abs(value - nearest));
        }
      }
    }
    report.worst_margin = worst_margin;
    if (report.applicable) {
      const double required = std::max(0.0, theta_eff - report.w_norm - 1e-6);
      report.pass = worst_margin > required;
    }
    result.reports.push_back(report);
  }
  return result;
}

BandExtraction band_eigenvalues(const MagneticModel& model, int band_index) {
  if (band_index < 1)
    throw std::invalid_argument("band: index must be >= 1");
  const double theta = model.theta();
  if (2 * band_index > model.osc_dim())
    throw std::invalid_argument(
        "band: window lies above the truncation-trust ceiling");
  const ModuleOperator w = build_perturbation(model);
  const double w_norm = sup_norm(w);
  if (!(w_norm < theta))
    throw std::runtime_error("band: gap hypothesis ||W|| < theta fails, ||W|| = " +
                             std::to_string(w_norm));
  const ModuleOperator d = build_delta(model) + w;
  const double lo = 2.0 * theta * (band_index - 1);
  const double hi = 2.0 * theta * band_index;
  const double target = double(model.approx().p) / double(model.approx().q);
  BandEigenpair band = extract_band(d, lo, hi, target);
  const long q = model.approx().q;
  for (std::size_t g = 0; g < band.window_counts.size(); ++g)
    if (band.window_counts[g] != q)
      throw std::runtime_error(
          "band: window at Bloch point " + std::to_string(g) + " holds " +
          std::to_string(band.window_counts[g]) + " states, expected " +
          std::to_string(q) + " (band overlap)");
  const double tau_inner = trace_tau(band.pair.inner_square.field()).real();
  return BandExtraction{std::move(band.pair), lo,     hi,
                        tau_inner,            std::move(band.window_counts),
                        w_norm};
}

} // namespace modspec
