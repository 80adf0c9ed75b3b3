#include "pontryagin/nevanlinna.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pontryagin/errors.hpp"
#include "pontryagin/indefinite_core.hpp"
#include "pontryagin/quadrature.hpp"

namespace pontryagin {
namespace {

constexpr Complex kI{0.0, 1.0};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void reject_on_support(const AbsContMeasure& m, Complex z) {
  if (z.imag() == 0.0 && z.real() >= m.lower() && z.real() <= m.upper()) {
    throw std::invalid_argument("stieltjes: z lies on the support of the measure");
  }
}

// sigma^(z) = (-z + sqrt(z^2 - 4s^2)) / (2 s^2) rewritten as -2 / (z + r) with
// r = sqrt(z - 2s) sqrt(z + 2s); no cancellation for large |z|.
Complex semicircle_root(double s, Complex z) { return std::sqrt(z - 2.0 * s) * std::sqrt(z + 2.0 * s); }

Complex semicircle_transform(double s, Complex z) { return -2.0 / (z + semicircle_root(s, z)); }

Complex semicircle_transform_derivative(double s, Complex z) {
  const Complex r = semicircle_root(s, z);
  return 2.0 / ((z + r) * r);
}

// Moments of 3t^2/2: m_{2j} = 3 / (2j + 3), odd moments vanish.
constexpr int kPolySeriesTerms = 24;
constexpr double kPolySeriesRadius = 4.0;

Complex poly_cubic_transform(Complex z) {
  if (std::abs(z) >= kPolySeriesRadius) {
    const Complex inv2 = 1.0 / (z * z);
    Complex term = 1.0 / z;
    Complex sum = 0.0;
    for (int j = 0; j < kPolySeriesTerms; ++j) {
      sum -= 3.0 / (2.0 * j + 3.0) * term;
      term *= inv2;
    }
    return sum;
  }
  const Complex log_ratio = std::log((z - 1.0) / (z + 1.0));
  return 3.0 * z + 1.5 * z * z * log_ratio;
}

Complex poly_cubic_transform_derivative(Complex z) {
  if (std::abs(z) >= kPolySeriesRadius) {
    const Complex inv2 = 1.0 / (z * z);
    Complex term = inv2;
    Complex sum = 0.0;
    for (int j = 0; j < kPolySeriesTerms; ++j) {
      sum += (2.0 * j + 1.0) * 3.0 / (2.0 * j + 3.0) * term;
      term *= inv2;
    }
    return sum;
  }
  const Complex log_ratio = std::log((z - 1.0) / (z + 1.0));
  return 3.0 + 3.0 * z * log_ratio + 3.0 * z * z / (z * z - 1.0);
}

double distance_to_interval(Complex z, double lo, double hi) {
  const double x = std::clamp(z.real(), lo, hi);
  return std::abs(z - x);
}

Complex custom_integral(const AbsContMeasure& m, Complex z, int power) {
  auto integrand = [&](double t) -> Complex {
    const Complex d = t - z;
    return m.density(t) / (power == 1 ? d : d * d);
  };
  if (distance_to_interval(z, m.lo, m.hi) < 0.1) return integrate_adaptive(integrand, m.lo, m.hi);
  return integrate_fixed(integrand, m.lo, m.hi, m.order);
}

std::string format_complex(Complex z) {
  std::ostringstream os;
  os.precision(10);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

double DiscreteMeasure::mass() const {
  double m = 0.0;
  for (const double w : weights) m += w;
  return m;
}

void DiscreteMeasure::validate() const {
  if (atoms.size() != weights.size()) throw std::invalid_argument("DiscreteMeasure: atoms and weights differ in length");
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (!std::isfinite(atoms[k])) throw std::invalid_argument("DiscreteMeasure: atom is not finite");
    if (!(weights[k] > 0.0) || !std::isfinite(weights[k])) {
      throw std::invalid_argument("DiscreteMeasure: weights must be positive and finite");
    }
  }
}

AbsContMeasure AbsContMeasure::semicircle(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("semicircle: scale must be positive");
  AbsContMeasure m;
  m.kind = Kind::semicircle;
  m.s = s;
  m.lo = -2.0 * s;
  m.hi = 2.0 * s;
  return m;
}

AbsContMeasure AbsContMeasure::poly_cubic() {
  AbsContMeasure m;
  m.kind = Kind::poly_cubic;
  m.lo = -1.0;
  m.hi = 1.0;
  return m;
}

AbsContMeasure AbsContMeasure::custom(std::function<double(double)> density, double lo, double hi, int order) {
  if (!density) throw std::invalid_argument("custom measure: density is empty");
  if (!(lo < hi)) throw std::invalid_argument("custom measure: empty support interval");
  AbsContMeasure m;
  m.kind = Kind::custom;
  m.density = std::move(density);
  m.lo = lo;
  m.hi = hi;
  m.order = order;
  m.custom_mass = integrate_adaptive([&](double t) { return Complex(m.density(t), 0.0); }, lo, hi).real();
  if (!(m.custom_mass > 0.0)) throw std::invalid_argument("custom measure: density has no positive mass");
  return m;
}

double AbsContMeasure::lower() const { return lo; }
double AbsContMeasure::upper() const { return hi; }

double AbsContMeasure::density_at(double t) const {
  if (t < lo || t > hi) return 0.0;
  switch (kind) {
    case Kind::semicircle: return std::sqrt(std::max(0.0, 4.0 * s * s - t * t)) / (2.0 * std::numbers::pi * s * s);
    case Kind::poly_cubic: return 1.5 * t * t;
    case Kind::custom: return density(t);
  }
  return 0.0;
}

double total_mass(const SpectralMeasure& mu) {
  return std::visit(overloaded{[](const DiscreteMeasure& d) { return d.mass(); },
                               [](const AbsContMeasure& m) {
                                 return m.kind == AbsContMeasure::Kind::custom ? m.custom_mass : 1.0;
                               }},
                    mu);
}

double support_radius(const SpectralMeasure& mu) {
  return std::visit(overloaded{[](const DiscreteMeasure& d) {
                                 double r = 0.0;
                                 for (const double t : d.atoms) r = std::max(r, std::abs(t));
                                 return r;
                               },
                               [](const AbsContMeasure& m) { return std::max(std::abs(m.lo), std::abs(m.hi)); }},
                    mu);
}

double cdf(const SpectralMeasure& mu, double x) {
  return std::visit(
      overloaded{[x](const DiscreteMeasure& d) {
                   const double mass = d.mass();
                   if (mass == 0.0) return x >= 0.0 ? 1.0 : 0.0;
                   double below = 0.0;
                   for (std::size_t k = 0; k < d.atoms.size(); ++k) {
                     if (d.atoms[k] <= x) below += d.weights[k];
                   }
                   return below / mass;
                 },
                 [x](const AbsContMeasure& m) {
                   if (x <= m.lo) return 0.0;
                   if (x >= m.hi) return 1.0;
                   switch (m.kind) {
                     case AbsContMeasure::Kind::semicircle: {
                       const double s = m.s;
                       return 0.5 + x * std::sqrt(4.0 * s * s - x * x) / (4.0 * std::numbers::pi * s * s) +
                              std::asin(x / (2.0 * s)) / std::numbers::pi;
                     }
                     case AbsContMeasure::Kind::poly_cubic: return 0.5 * (1.0 + x * x * x);
                     case AbsContMeasure::Kind::custom:
                       return integrate_adaptive([&](double t) { return Complex(m.density(t), 0.0); }, m.lo, x)
                                  .real() /
                              m.custom_mass;
                   }
                   return 0.0;
                 }},
      mu);
}

Complex stieltjes(const SpectralMeasure& mu, Complex z) {
  return std::visit(overloaded{[z](const DiscreteMeasure& d) {
                                 Complex sum = 0.0;
                                 for (std::size_t k = 0; k < d.atoms.size(); ++k) {
                                   const Complex gap = d.atoms[k] - z;
                                   if (gap == 0.0) throw std::invalid_argument("stieltjes: z coincides with an atom");
                                   sum += d.weights[k] / gap;
                                 }
                                 return sum;
                               },
                               [z](const AbsContMeasure& m) {
                                 reject_on_support(m, z);
                                 switch (m.kind) {
                                   case AbsContMeasure::Kind::semicircle: return semicircle_transform(m.s, z);
                                   case AbsContMeasure::Kind::poly_cubic: return poly_cubic_transform(z);
                                   case AbsContMeasure::Kind::custom: return custom_integral(m, z, 1);
                                 }
                                 return Complex{};
                               }},
                    mu);
}

Complex stieltjes_derivative(const SpectralMeasure& mu, Complex z) {
  return std::visit(overloaded{[z](const DiscreteMeasure& d) {
                                 Complex sum = 0.0;
                                 for (std::size_t k = 0; k < d.atoms.size(); ++k) {
                                   const Complex gap = d.atoms[k] - z;
                                   if (gap == 0.0) throw std::invalid_argument("stieltjes: z coincides with an atom");
                                   sum += d.weights[k] / (gap * gap);
                                 }
                                 return sum;
                               },
                               [z](const AbsContMeasure& m) {
                                 reject_on_support(m, z);
                                 switch (m.kind) {
                                   case AbsContMeasure::Kind::semicircle:
                                     return semicircle_transform_derivative(m.s, z);
                                   case AbsContMeasure::Kind::poly_cubic: return poly_cubic_transform_derivative(z);
                                   case AbsContMeasure::Kind::custom: return custom_integral(m, z, 2);
                                 }
                                 return Complex{};
                               }},
                    mu);
}

double N1Function::scale() const { return 1.0 + std::abs(a) + s2 * total_mass(measure) + support_radius(measure); }

Complex q_eval(const N1Function& q, Complex z) { return q.a - z + q.s2 * stieltjes(q.measure, z); }

Complex q_deriv(const N1Function& q, Complex z) { return -1.0 + q.s2 * stieltjes_derivative(q.measure, z); }

std::string_view to_string(GzntKind kind) { return kind == GzntKind::interior ? "interior" : "real"; }

DiscreteMeasure spectral_measure_of_pair(const Eigen::VectorXcd& b, const Eigen::MatrixXcd& c) {
  if (c.rows() != c.cols() || c.rows() != b.size()) {
    throw std::invalid_argument("spectral_measure_of_pair: b and C have inconsistent sizes");
  }
  DiscreteMeasure mu;
  if (b.size() == 0) return mu;
  const bool real = has_zero_imag(b) && has_zero_imag(c);
  const HermitianEigenResult eig = real ? hermitian_eig(Eigen::MatrixXd(c.real())) : hermitian_eig(c);
  const Eigen::VectorXcd d = eig.basis * b;
  const double floor = 1e-14 * b.squaredNorm();
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    const double w = std::norm(d(j));
    if (w > floor) {
      mu.atoms.push_back(eig.eigenvalues(j));
      mu.weights.push_back(w);
    }
  }
  return mu;
}

DiscreteMeasure esd(const Eigen::MatrixXd& c) {
  DiscreteMeasure mu;
  const Eigen::VectorXd ev = hermitian_eigenvalues(c);
  mu.atoms.assign(ev.data(), ev.data() + ev.size());
  mu.weights.assign(mu.atoms.size(), mu.atoms.empty() ? 0.0 : 1.0 / static_cast<double>(mu.atoms.size()));
  return mu;
}

DiscreteMeasure esd(const Eigen::MatrixXcd& c) {
  if (has_zero_imag(c)) return esd(Eigen::MatrixXd(c.real()));
  DiscreteMeasure mu;
  const Eigen::VectorXd ev = hermitian_eigenvalues(c);
  mu.atoms.assign(ev.data(), ev.data() + ev.size());
  mu.weights.assign(mu.atoms.size(), mu.atoms.empty() ? 0.0 : 1.0 / static_cast<double>(mu.atoms.size()));
  return mu;
}

Complex quadratic_resolvent(const Eigen::VectorXcd& b, const Eigen::MatrixXcd& c, Complex z) {
  if (c.rows() != c.cols() || c.rows() != b.size()) {
    throw std::invalid_argument("quadratic_resolvent: b and C have inconsistent sizes");
  }
  if (b.size() == 0) return 0.0;
  Eigen::MatrixXcd shifted = c;
  shifted.diagonal().array() -= z;
  const Eigen::VectorXcd y = Eigen::PartialPivLU<Eigen::MatrixXcd>(shifted).solve(b);
  return b.dot(y);
}

Gznt gznt_discrete(const N1Function& q, const Tolerances& tol) {
  const auto* mu = std::get_if<DiscreteMeasure>(&q.measure);
  if (mu == nullptr) throw std::invalid_argument("gznt_discrete: measure is not discrete");
  mu->validate();
  const auto n = static_cast<Eigen::Index>(mu->atoms.size());
  BlockHSelfAdjoint m;
  m.a = q.a;
  m.b.resize(n);
  m.c = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    m.b(j) = std::sqrt(q.s2 * mu->weights[static_cast<std::size_t>(j)]);
    m.c(j, j) = mu->atoms[static_cast<std::size_t>(j)];
  }
  const CanonicalCase cc = nonpositive_type_eigenvalue(m, tol);
  Gznt out;
  out.point = cc.beta;
  if (cc.label == CaseLabel::case1) {
    out.kind = GzntKind::interior;
    return out;
  }
  out.kind = GzntKind::real;
  try {
    out.limit_value = q_deriv(q, Complex(cc.beta.real(), 0.0)).real();
  } catch (const std::invalid_argument&) {
    out.limit_value = real_gznt_limit(q, cc.beta.real(), tol);
  }
  return out;
}

namespace {

struct SearchContext {
  const N1Function& q;
  const Tolerances& tol;
  double scale;
  double root_tol;

  double value(double x) const { return q_eval(q, Complex(x, 0.0)).real(); }
  double slope(double x) const { return q_deriv(q, Complex(x, 0.0)).real(); }
};

// Interior zeros of an N1 function are simple, so a genuine one ends with a
// Newton step far below Im z; a creep toward a real boundary zero does not.
bool accept_interior(const SearchContext& ctx, Complex z) {
  if (!(z.imag() >= ctx.tol.interior_im)) return false;
  const Complex fz = q_eval(ctx.q, z);
  if (!(std::abs(fz) <= ctx.root_tol)) return false;
  const Complex dz = q_deriv(ctx.q, z);
  if (dz == 0.0) return false;
  return std::abs(fz / dz) <= std::max(1e-9 * z.imag(), 1e-14 * (1.0 + std::abs(z)));
}

std::optional<Complex> damped_newton(const SearchContext& ctx, Complex z) {
  Complex fz = q_eval(ctx.q, z);
  for (int it = 0; it < 400; ++it) {
    const Complex dz = q_deriv(ctx.q, z);
    if (dz == 0.0 || !std::isfinite(std::abs(dz))) break;
    const Complex step = fz / dz;
    bool accepted = false;
    Complex zn, fn;
    for (double t = 1.0; t > 1e-12; t *= 0.5) {
      zn = z - t * step;
      if (!(zn.imag() > 0.0)) continue;
      fn = q_eval(ctx.q, zn);
      if (std::abs(fn) < std::abs(fz)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const bool tiny = std::abs(zn - z) <= 1e-15 * (1.0 + std::abs(zn));
    z = zn;
    fz = fn;
    if (tiny) break;
    if (z.imag() < 1e-3 * ctx.tol.interior_im) return std::nullopt;
  }
  return accept_interior(ctx, z) ? std::optional<Complex>(z) : std::nullopt;
}

// Root of a monotone function on [lo, hi] given opposite signs at the ends.
template <typename F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

template <typename F>
double golden_min(F&& f, double lo, double hi) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

struct RealCandidate {
  double x;
  double slope;
};

// On [p, q] the function Q is nonincreasing. Returns its zero when one exists.
std::optional<double> decreasing_zero(const SearchContext& ctx, double p, double q) {
  const double fp = ctx.value(p);
  const double fq = ctx.value(q);
  if (std::abs(fp) <= ctx.root_tol) return p;
  if (std::abs(fq) <= ctx.root_tol) return q;
  if (fp > 0.0 && fq < 0.0) return bisect([&](double x) { return ctx.value(x); }, p, q);
  return std::nullopt;
}

// Q' is convex on every gap of the support, so the set where Q' <= 0 is an
// interval on which Q decreases; a nonpositive-type zero can only live there.
std::optional<RealCandidate> search_gap(const SearchContext& ctx, double left, double right) {
  const double neg = ctx.tol.nonpositive;
  auto slope = [&](double x) { return ctx.slope(x); };
  const bool left_open = std::isinf(left);
  const bool right_open = std::isinf(right);

  double lo, hi;
  if (left_open) {
    hi = right - 1e-13 * (1.0 + std::abs(right));
    double width = 1.0;
    lo = hi - width;
    while (slope(lo) >= 0.0 && width < 1e300) lo = hi - (width *= 2.0);
  } else {
    lo = left + 1e-13 * (1.0 + std::abs(left));
  }
  if (right_open) {
    if (left_open) throw std::logic_error("search_gap: both ends open");
    double width = 1.0;
    hi = lo + width;
    while (slope(hi) >= 0.0 && width < 1e300) hi = lo + (width *= 2.0);
  } else if (!left_open) {
    hi = right - 1e-13 * (1.0 + std::abs(right));
  }
  if (!(lo < hi)) return std::nullopt;

  // Region where Q' <= 0.
  double p, q;
  if (left_open) {
    // Q' nondecreasing here.
    p = lo;
    q = slope(hi) <= 0.0 ? hi : bisect(slope, lo, hi);
  } else if (right_open) {
    // Q' nonincreasing here.
    q = hi;
    p = slope(lo) <= 0.0 ? lo : bisect(slope, lo, hi);
  } else {
    const double m = golden_min(slope, lo, hi);
    const double dmin = slope(m);
    if (dmin > neg) return std::nullopt;
    if (dmin >= 0.0) {
      if (std::abs(ctx.value(m)) <= ctx.root_tol) return RealCandidate{m, dmin};
      return std::nullopt;
    }
    p = slope(lo) <= 0.0 ? lo : bisect(slope, lo, m);
    q = slope(hi) <= 0.0 ? hi : bisect(slope, m, hi);
  }

  if (left_open) {
    // Q -> +inf at -inf; widen until positive so the bracket is complete.
    double width = 1.0;
    while (ctx.value(p) <= 0.0 && width < 1e300) p = q - (width *= 2.0);
  }
  if (right_open) {
    double width = 1.0;
    while (ctx.value(q) >= 0.0 && width < 1e300) q = p + (width *= 2.0);
  }
  const auto zero = decreasing_zero(ctx, p, q);
  if (!zero) return std::nullopt;
  const double d = ctx.slope(*zero);
  if (d > neg) return std::nullopt;
  return RealCandidate{*zero, d};
}

std::vector<std::pair<double, double>> support_pieces(const SpectralMeasure& mu) {
  std::vector<std::pair<double, double>> pieces;
  if (const auto* d = std::get_if<DiscreteMeasure>(&mu)) {
    std::set<double> atoms(d->atoms.begin(), d->atoms.end());
    for (const double t : atoms) pieces.emplace_back(t, t);
  } else {
    const auto& m = std::get<AbsContMeasure>(mu);
    pieces.emplace_back(m.lower(), m.upper());
  }
  return pieces;
}

std::optional<RealCandidate> search_off_support(const SearchContext& ctx) {
  const auto pieces = support_pieces(ctx.q.measure);
  if (pieces.empty() || ctx.q.s2 == 0.0) {
    // Q(z) = a - z.
    return RealCandidate{ctx.q.a, -1.0};
  }
  std::vector<RealCandidate> found;
  const double inf = std::numeric_limits<double>::infinity();
  auto scan = [&](double l, double r) {
    if (auto c = search_gap(ctx, l, r)) found.push_back(*c);
  };
  scan(-inf, pieces.front().first);
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) scan(pieces[k].second, pieces[k + 1].first);
  scan(pieces.back().second, inf);
  if (found.empty()) return std::nullopt;
  if (found.size() > 1) {
    std::ostringstream os;
    os << "gznt_newton: " << found.size() << " real zeros of nonpositive type:";
    for (const auto& c : found) os << " " << c.x << " (Q'=" << c.slope << ")";
    throw SearchFailure(os.str());
  }
  return found.front();
}

std::optional<double> search_support(const SearchContext& ctx) {
  const auto* m = std::get_if<AbsContMeasure>(&ctx.q.measure);
  if (m == nullptr) return std::nullopt;
  const double width = m->upper() - m->lower();
  constexpr int kGrid = 2000;
  const double h = width / kGrid;
  const double coarse_eta = 1e-3 * width;
  double best_x = m->lower();
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kGrid; ++k) {
    const double x = m->lower() + h * k;
    const double v = std::abs(q_eval(ctx.q, Complex(x, coarse_eta)));
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  const double fine_eta = 1e-6 * width;
  const double lo = std::max(m->lower(), best_x - 2.0 * h);
  const double hi = std::min(m->upper(), best_x + 2.0 * h);
  const double x0 = golden_min([&](double x) { return std::abs(q_eval(ctx.q, Complex(x, fine_eta))); }, lo, hi);
  try {
    const double limit = real_gznt_limit(ctx.q, x0, ctx.tol);
    if (limit <= ctx.tol.nonpositive) return x0;
  } catch (const NumericalError&) {
  }
  return std::nullopt;
}

}  // namespace

Gznt gznt_newton(const N1Function& q, const Tolerances& tol) {
  if (const auto* d = std::get_if<DiscreteMeasure>(&q.measure)) d->validate();
  const double scale = q.scale();
  const SearchContext ctx{q, tol, scale, tol.root_rel * (1.0 + scale)};

  std::ostringstream trail;
  for (int k = -3; k <= 3; ++k) {
    const Complex start = kI * std::ldexp(scale, k);
    const auto root = damped_newton(ctx, start);
    if (root) return {*root, GzntKind::interior, std::nullopt};
    trail << " start " << format_complex(start) << " -> " << (root ? format_complex(*root) : "no root") << ";";
  }

  if (const auto real = search_off_support(ctx)) {
    return {Complex(real->x, 0.0), GzntKind::real, real->slope};
  }
  if (const auto x0 = search_support(ctx)) {
    return {Complex(*x0, 0.0), GzntKind::real, real_gznt_limit(q, *x0, tol)};
  }
  throw SearchFailure("gznt_newton: no generalized zero of nonpositive type found (a = " + std::to_string(q.a) +
                      ", s2 = " + std::to_string(q.s2) + ");" + trail.str());
}

double real_gznt_limit(const N1Function& q, double x0, const Tolerances& tol) {
  constexpr int kSteps = 5;
  std::array<Complex, kSteps> ratio{};
  double eta = 1e-2;
  for (int k = 0; k < kSteps; ++k, eta *= 0.1) {
    const Complex dz(0.0, eta);
    ratio[static_cast<std::size_t>(k)] = q_eval(q, x0 + dz) / dz;
  }
  // Two Richardson levels for an error expansion in powers of eta.
  std::array<Complex, kSteps - 1> level1{};
  for (std::size_t k = 0; k + 1 < kSteps; ++k) level1[k] = (10.0 * ratio[k + 1] - ratio[k]) / 9.0;
  std::array<Complex, kSteps - 2> level2{};
  for (std::size_t k = 0; k + 1 < level1.size(); ++k) level2[k] = (100.0 * level1[k + 1] - level1[k]) / 99.0;

  const double limit = level2.back().real();
  double lo = level2.front().real(), hi = lo;
  for (const Complex& v : level2) {
    lo = std::min(lo, v.real());
    hi = std::max(hi, v.real());
  }
  if (!std::isfinite(limit) || hi - lo > tol.limit_spread * std::max(1.0, std::abs(limit))) {
    throw NumericalError("real_gznt_limit: limit did not stabilize at x0 = " + std::to_string(x0));
  }
  return limit;
}

int negative_squares(const std::function<Complex(Complex)>& q, std::span<const Complex> points, double tol) {
  const auto k = static_cast<Eigen::Index>(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].imag() > 0.0)) throw std::invalid_argument("negative_squares: points must lie in the upper half-plane");
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(points[i] - points[j]) <= 1e-14 * (1.0 + std::abs(points[i]))) {
        throw std::invalid_argument("negative_squares: coincident points");
      }
    }
  }
  if (k == 0) return 0;
  std::vector<Complex> values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) values[i] = q(points[i]);
  Eigen::MatrixXcd kernel(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      kernel(i, j) = (values[ui] - std::conj(values[uj])) / (points[ui] - std::conj(points[uj]));
    }
  }
  kernel = (0.5 * (kernel + kernel.adjoint())).eval();
  const Eigen::VectorXd ev = hermitian_eigenvalues(kernel);
  const double floor = -tol * max_abs(kernel);
  return static_cast<int>((ev.array() <= floor).count());
}

int negative_squares(const N1Function& q, std::span<const Complex> points, double tol) {
  return negative_squares([&](Complex z) { return q_eval(q, z); }, points, tol);
}

nlohmann::json measure_to_json(const SpectralMeasure& mu) {
  return std::visit(overloaded{[](const DiscreteMeasure& d) {
                                 return nlohmann::json{{"kind", "discrete"}, {"atoms", d.atoms}, {"weights", d.weights}};
                               },
                               [](const AbsContMeasure& m) {
                                 switch (m.kind) {
                                   case AbsContMeasure::Kind::semicircle:
                                     return nlohmann::json{{"kind", "semicircle"}, {"s", m.s}};
                                   case AbsContMeasure::Kind::poly_cubic: return nlohmann::json{{"kind", "poly_cubic"}};
                                   case AbsContMeasure::Kind::custom: break;
                                 }
                                 throw std::invalid_argument("measure_to_json: custom densities are not serializable");
                               }},
                    mu);
}

SpectralMeasure measure_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw std::invalid_argument("measure: expected an object with a string field \"kind\"");
  }
  const std::string kind = j["kind"];
  auto allow = [&](std::initializer_list<const char*> fields) {
    for (const auto& [key, value] : j.items()) {
      if (std::find_if(fields.begin(), fields.end(), [&](const char* f) { return key == f; }) == fields.end()) {
        throw std::invalid_argument("measure: unknown field \"" + key + "\" for kind \"" + kind + "\"");
      }
    }
  };
  try {
    if (kind == "discrete") {
      allow({"kind", "atoms", "weights"});
      DiscreteMeasure d{j.at("atoms").get<std::vector<double>>(), j.at("weights").get<std::vector<double>>()};
      d.validate();
      return d;
    }
    if (kind == "semicircle") {
      allow({"kind", "s"});
      return AbsContMeasure::semicircle(j.value("s", 1.0));
    }
    if (kind == "poly_cubic") {
      allow({"kind"});
      return AbsContMeasure::poly_cubic();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("measure: ") + e.what());
  }
  throw std::invalid_argument("measure: unknown kind \"" + kind + "\"");
}

}  // namespace pontryagin
