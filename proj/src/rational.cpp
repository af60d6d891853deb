#include "ectrl/rational.hpp"

#include <charconv>
#include <cmath>

#include "ectrl/error.hpp"

namespace ectrl {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

Rational parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = s.substr(e + 1);
    s = s.substr(0, e);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6)
      throw Error(ErrorCode::Parse, "bad exponent in '" + std::string(text) + "'");
    exponent = std::stol(std::string(exp_text));
    if (exp_negative) exponent = -exponent;
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = s.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
        (whole.empty() && frac.empty()))
      throw Error(ErrorCode::Parse, "bad decimal '" + std::string(text) + "'");
    digits = std::string(whole) + std::string(frac);
    exponent -= static_cast<long>(frac.size());
  } else {
    if (!all_digits(s)) throw Error(ErrorCode::Parse, "bad number '" + std::string(text) + "'");
    digits = std::string(s);
  }
  BigInt mantissa(digits, 10);
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational q = exponent >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw Error(ErrorCode::Parse, "empty rational");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw Error(ErrorCode::Parse, "zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  return parse_decimal(text);
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::Parse, "non-finite number");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error(ErrorCode::Parse, "cannot format number");
  return parse_decimal(std::string_view(buf, static_cast<std::size_t>(end - buf)));
}

double to_double(const Rational& q) {
  const BigInt& num = q.get_num();
  const BigInt& den = q.get_den();
  if (num == 0) return 0.0;
  const auto num_bits = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2));
  const auto den_bits = static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
  if (num_bits <= 53 && den_bits <= 53) return num.get_d() / den.get_d();  // one IEEE division
  // Quotient with at least 65 bits plus a sticky bit, then round to 53.
  const long shift = 65 - num_bits + den_bits;
  BigInt n = abs(num), d = den;
  if (shift >= 0)
    n <<= static_cast<mp_bitcnt_t>(shift);
  else
    d <<= static_cast<mp_bitcnt_t>(-shift);
  BigInt quotient, remainder;
  mpz_tdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  if (remainder != 0) quotient |= 1;
  const auto bits = static_cast<long>(mpz_sizeinbase(quotient.get_mpz_t(), 2));
  const long drop = bits - 53;
  BigInt mantissa = quotient >> static_cast<mp_bitcnt_t>(drop);
  const BigInt low = quotient - (mantissa << static_cast<mp_bitcnt_t>(drop));
  const BigInt half = BigInt(1) << static_cast<mp_bitcnt_t>(drop - 1);
  if (low > half || (low == half && mpz_odd_p(mantissa.get_mpz_t()))) ++mantissa;
  const double magnitude = std::ldexp(mantissa.get_d(), static_cast<int>(drop - shift));
  return num < 0 ? -magnitude : magnitude;
}

std::string format_rational(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace ectrl
