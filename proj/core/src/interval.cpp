#include "dsq/interval.hpp"

#include <algorithm>
#include <variant>

namespace dsq {

void ensure_extended_exponent_range() {
  // MPFR keeps the exponent range per thread when built with TLS support.
  thread_local bool done = false;
  if (done) return;
  mpfr_set_emax(mpfr_get_emax_max());
  mpfr_set_emin(mpfr_get_emin_min());
  done = true;
}

Interval::Interval(unsigned precision_bits) : precision_(std::max(precision_bits, 2U)) {
  ensure_extended_exponent_range();
  mpfr_init2(lo_, precision_);
  mpfr_init2(hi_, precision_);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Interval& other) : precision_(other.precision_) {
  mpfr_init2(lo_, precision_);
  mpfr_init2(hi_, precision_);
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& other) noexcept : Interval(other.precision_) {
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
}

Interval& Interval::operator=(Interval other) noexcept {
  std::swap(precision_, other.precision_);
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::exact(const Rational& x, unsigned precision_bits) {
  Interval out(precision_bits);
  mpfr_set_q(out.lo_, x.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(out.hi_, x.get_mpq_t(), MPFR_RNDU);
  return out;
}

Interval Interval::hull(const Rational& lo, const Rational& hi, unsigned precision_bits) {
  if (lo > hi) throw Error(ErrorKind::invalid_parameter, "interval hull with lo > hi");
  Interval out(precision_bits);
  mpfr_set_q(out.lo_, lo.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(out.hi_, hi.get_mpq_t(), MPFR_RNDU);
  return out;
}

bool Interval::contains(const Rational& x) const {
  if (mpfr_nan_p(lo_) || mpfr_nan_p(hi_)) return false;
  return mpfr_cmp_q(lo_, x.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, x.get_mpq_t()) >= 0;
}

bool Interval::is_point() const { return mpfr_equal_p(lo_, hi_) != 0; }
bool Interval::lo_positive() const { return mpfr_sgn(lo_) > 0; }
bool Interval::is_zero() const { return mpfr_zero_p(lo_) && mpfr_zero_p(hi_); }

Interval Interval::width() const {
  Interval out(precision_);
  mpfr_sub(out.lo_, hi_, lo_, MPFR_RNDD);
  mpfr_sub(out.hi_, hi_, lo_, MPFR_RNDU);
  return out;
}

double Interval::lo_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Interval::hi_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }

namespace {

std::string render(mpfr_srcptr x, int digits, bool round_up) {
  char* buffer = nullptr;
  const int n = round_up ? mpfr_asprintf(&buffer, "%.*RUe", digits, x) : mpfr_asprintf(&buffer, "%.*RDe", digits, x);
  if (n < 0 || buffer == nullptr) return "?";
  std::string out(buffer);
  mpfr_free_str(buffer);
  return out;
}

unsigned joint_precision(const Interval& a, const Interval& b) {
  return std::max(a.precision_bits(), b.precision_bits());
}

bool any_nan(const Interval& x) { return mpfr_nan_p(x.lo()) || mpfr_nan_p(x.hi()); }

}  // namespace

std::string Interval::lo_string(int digits) const { return render(lo_, digits, false); }
std::string Interval::hi_string(int digits) const { return render(hi_, digits, true); }

Interval operator+(const Interval& a, const Interval& b) {
  Interval out(joint_precision(a, b));
  mpfr_add(out.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(out.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return out;
}

Interval operator-(const Interval& a, const Interval& b) {
  Interval out(joint_precision(a, b));
  mpfr_sub(out.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(out.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return out;
}

Interval operator*(const Interval& a, const Interval& b) {
  const unsigned prec = joint_precision(a, b);
  Interval out(prec);
  mpfr_t down, up;
  mpfr_init2(down, prec);
  mpfr_init2(up, prec);
  mpfr_set_inf(out.lo_, 1);
  mpfr_set_inf(out.hi_, -1);
  bool nan = false;
  for (mpfr_srcptr x : {a.lo_, a.hi_}) {
    for (mpfr_srcptr y : {b.lo_, b.hi_}) {
      mpfr_mul(down, x, y, MPFR_RNDD);
      mpfr_mul(up, x, y, MPFR_RNDU);
      if (mpfr_nan_p(down) || mpfr_nan_p(up)) {
        nan = true;
        continue;
      }
      mpfr_min(out.lo_, out.lo_, down, MPFR_RNDD);
      mpfr_max(out.hi_, out.hi_, up, MPFR_RNDU);
    }
  }
  if (nan) {
    // 0 * inf: fall back to the whole line, which is still an enclosure.
    mpfr_set_inf(out.lo_, -1);
    mpfr_set_inf(out.hi_, 1);
  }
  mpfr_clear(down);
  mpfr_clear(up);
  return out;
}

Interval operator/(const Interval& a, const Interval& b) {
  if (mpfr_sgn(b.lo_) <= 0 && mpfr_sgn(b.hi_) >= 0) {
    throw Error(ErrorKind::domain_error, "interval division by an interval containing zero");
  }
  const unsigned prec = joint_precision(a, b);
  Interval inverse(prec);
  mpfr_ui_div(inverse.lo_, 1, b.hi_, MPFR_RNDD);
  mpfr_ui_div(inverse.hi_, 1, b.lo_, MPFR_RNDU);
  return a * inverse;
}

Interval exp(const Interval& x) {
  Interval out(x.precision_);
  mpfr_exp(out.lo_, x.lo_, MPFR_RNDD);
  mpfr_exp(out.hi_, x.hi_, MPFR_RNDU);
  return out;
}

Interval log(const Interval& x) {
  if (mpfr_sgn(x.lo_) <= 0) throw Error(ErrorKind::domain_error, "log of a nonpositive interval");
  Interval out(x.precision_);
  mpfr_log(out.lo_, x.lo_, MPFR_RNDD);
  mpfr_log(out.hi_, x.hi_, MPFR_RNDU);
  return out;
}

Interval log_max1(const Interval& x) {
  if (mpfr_cmp_ui(x.lo_, 1) < 0) throw Error(ErrorKind::domain_error, "Log t requires t >= 1");
  Interval out = log(x);
  if (mpfr_cmp_ui(out.lo_, 1) < 0) mpfr_set_ui(out.lo_, 1, MPFR_RNDD);
  if (mpfr_cmp_ui(out.hi_, 1) < 0) mpfr_set_ui(out.hi_, 1, MPFR_RNDU);
  return out;
}

Interval pow(const Interval& base, const Interval& exponent) {
  if (any_nan(base) || any_nan(exponent)) throw Error(ErrorKind::domain_error, "NaN in power");
  if (mpfr_sgn(base.lo_) <= 0) {
    throw Error(ErrorKind::domain_error, "fractional power of a nonpositive base");
  }
  return exp(exponent * log(base));
}

Interval pow_int(const Interval& base, long n) {
  if (n < 0) {
    Interval one = Interval::exact(Rational(1), base.precision_);
    return one / pow_int(base, -n);
  }
  Interval result = Interval::exact(Rational(1), base.precision_);
  Interval square = base;
  unsigned long k = static_cast<unsigned long>(n);
  // Repeated squaring widens more than direct multiplication for intervals
  // straddling zero; only positive bases take that path.
  if (mpfr_sgn(base.lo_) > 0) {
    while (k > 0) {
      if (k & 1UL) result = result * square;
      k >>= 1;
      if (k > 0) square = square * square;
    }
    return result;
  }
  for (unsigned long i = 0; i < k; ++i) result = result * base;
  return result;
}

// ---------------------------------------------------------------------------
// Expr

struct Expr::Node {
  enum class Kind { constant, exp, log_max1, add, sub, mul, div, pow };
  Kind kind;
  Rational value;  // constant value, or t for log_max1
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

Interval eval_node(const Expr::Node& node, unsigned bits) {
  using Kind = Expr::Node::Kind;
  switch (node.kind) {
    case Kind::constant: return Interval::exact(node.value, bits);
    case Kind::exp: return exp(eval_node(*node.a, bits));
    case Kind::log_max1: return log_max1(Interval::exact(node.value, bits));
    case Kind::add: return eval_node(*node.a, bits) + eval_node(*node.b, bits);
    case Kind::sub: return eval_node(*node.a, bits) - eval_node(*node.b, bits);
    case Kind::mul: return eval_node(*node.a, bits) * eval_node(*node.b, bits);
    case Kind::div: return eval_node(*node.a, bits) / eval_node(*node.b, bits);
    case Kind::pow: {
      const Expr::Node& exponent = *node.b;
      if (exponent.kind == Kind::constant && is_integer(exponent.value) && exponent.value.get_num().fits_slong_p()) {
        return pow_int(eval_node(*node.a, bits), exponent.value.get_num().get_si());
      }
      return pow(eval_node(*node.a, bits), eval_node(exponent, bits));
    }
  }
  throw Error(ErrorKind::invalid_parameter, "corrupt expression node");
}

}  // namespace

Expr Expr::constant(const Rational& value) {
  return Expr(std::make_shared<const Node>(Node{Node::Kind::constant, value, nullptr, nullptr}));
}

Expr Expr::exp(const Expr& x) {
  return Expr(std::make_shared<const Node>(Node{Node::Kind::exp, Rational(0), x.node_, nullptr}));
}

Expr Expr::log_max1(const Rational& t) {
  if (t < 1) throw Error(ErrorKind::domain_error, "Log t requires t >= 1");
  return Expr(std::make_shared<const Node>(Node{Node::Kind::log_max1, t, nullptr, nullptr}));
}

Expr Expr::pow(const Expr& exponent) const {
  return Expr(std::make_shared<const Node>(Node{Node::Kind::pow, Rational(0), node_, exponent.node_}));
}

Expr operator+(const Expr& a, const Expr& b) {
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Expr::Node::Kind::add, Rational(0), a.node_, b.node_}));
}
Expr operator-(const Expr& a, const Expr& b) {
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Expr::Node::Kind::sub, Rational(0), a.node_, b.node_}));
}
Expr operator*(const Expr& a, const Expr& b) {
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Expr::Node::Kind::mul, Rational(0), a.node_, b.node_}));
}
Expr operator/(const Expr& a, const Expr& b) {
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Expr::Node::Kind::div, Rational(0), a.node_, b.node_}));
}

Interval Expr::eval(unsigned precision_bits) const {
  ensure_extended_exponent_range();
  return eval_node(*node_, precision_bits);
}

const Rational* Expr::as_constant() const { return node_->kind == Node::Kind::constant ? &node_->value : nullptr; }

Interval interval_eval(const Rational& base, std::span<const PowerFactor> factors, unsigned precision_bits) {
  ensure_extended_exponent_range();
  Interval acc = Interval::exact(base, precision_bits);
  for (const auto& factor : factors) acc = acc * factor.base.pow(factor.exponent).eval(precision_bits);
  return acc;
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict compare_le(const Rational& lhs, const Interval& rhs) {
  if (any_nan(rhs)) return Verdict::inconclusive;
  if (mpfr_cmp_q(rhs.lo(), lhs.get_mpq_t()) >= 0) return Verdict::holds;
  if (mpfr_cmp_q(rhs.hi(), lhs.get_mpq_t()) < 0) return Verdict::violated;
  return Verdict::inconclusive;
}

Verdict compare_gt(const Rational& lhs, const Interval& rhs) {
  if (any_nan(rhs)) return Verdict::inconclusive;
  if (mpfr_cmp_q(rhs.hi(), lhs.get_mpq_t()) < 0) return Verdict::holds;
  if (mpfr_cmp_q(rhs.lo(), lhs.get_mpq_t()) >= 0) return Verdict::violated;
  return Verdict::inconclusive;
}

bool exceeds_scaled_rational_power(const Rational& lhs, const Rational& scale, const Rational& ratio,
                                   const Rational& exponent) {
  if (lhs < 0 || scale < 0 || ratio < 0 || exponent <= 0) {
    throw Error(ErrorKind::domain_error, "scaled rational power needs nonnegative data and a positive exponent");
  }
  if (!exponent.get_num().fits_ulong_p() || !exponent.get_den().fits_ulong_p()) {
    throw Error(ErrorKind::resource_limit, "exponent too large for exact comparison");
  }
  const unsigned long a = exponent.get_num().get_ui();
  const unsigned long b = exponent.get_den().get_ui();
  const Rational left = rational_pow(lhs, static_cast<long>(b));
  const Rational right = rational_pow(scale, static_cast<long>(b)) * rational_pow(ratio, static_cast<long>(a));
  return left > right;
}

}  // namespace dsq
