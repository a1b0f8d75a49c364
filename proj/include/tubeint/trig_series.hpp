#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <utility>

namespace tubeint {

/// Finite sum of terms tau^k (a cos(n tau) + b sin(n tau)) with k, n >= 0.
///
/// Closed under addition, multiplication, differentiation and integration
/// from 0, which is all the perturbation series need: every order is a
/// trigonometric polynomial with polynomial (secular) prefactors.
class TrigSeries {
 public:
  struct Coef {
    double c = 0.0;  ///< cos coefficient
    double s = 0.0;  ///< sin coefficient
  };
  using Key = std::pair<int, int>;  ///< (power of tau, frequency)

  TrigSeries() = default;

  static TrigSeries constant(double value) {
    TrigSeries out;
    out.add(0, 0, value, 0.0);
    return out;
  }
  static TrigSeries cos_term(double coef, int freq, int power = 0) {
    TrigSeries out;
    out.add(power, freq, coef, 0.0);
    return out;
  }
  static TrigSeries sin_term(double coef, int freq, int power = 0) {
    TrigSeries out;
    out.add(power, freq, 0.0, coef);
    return out;
  }

  /// Adds tau^power (c cos(freq tau) + s sin(freq tau)); negative frequencies are folded.
  TrigSeries& add(int power, int freq, double c, double s) {
    if (freq < 0) {
      freq = -freq;
      s = -s;
    }
    if (freq == 0) s = 0.0;
    if (c == 0.0 && s == 0.0) return *this;
    Coef& slot = terms_[{power, freq}];
    slot.c += c;
    slot.s += s;
    return *this;
  }

  const std::map<Key, Coef>& terms() const { return terms_; }

  Coef coefficient(int power, int freq) const {
    const auto it = terms_.find({power, freq});
    return it == terms_.end() ? Coef{} : it->second;
  }

  double evaluate(double tau) const {
    double sum = 0.0;
    for (const auto& [key, coef] : terms_) {
      const auto [power, freq] = key;
      const double angle = static_cast<double>(freq) * tau;
      double v = coef.c * std::cos(angle);
      if (coef.s != 0.0) v += coef.s * std::sin(angle);
      sum += v * std::pow(tau, power);
    }
    return sum;
  }

  /// Highest tau power carrying a coefficient above tol; 0 means strictly periodic.
  int secular_degree(double tol = 0.0) const {
    int degree = 0;
    for (const auto& [key, coef] : terms_)
      if (std::abs(coef.c) > tol || std::abs(coef.s) > tol) degree = std::max(degree, key.first);
    return degree;
  }

  TrigSeries derivative() const {
    TrigSeries out;
    for (const auto& [key, coef] : terms_) {
      const auto [k, n] = key;
      // d/dtau of the trig part
      out.add(k, n, n * coef.s, -n * coef.c);
      // d/dtau of tau^k
      if (k > 0) out.add(k - 1, n, k * coef.c, k * coef.s);
    }
    return out;
  }

  /// int_0^tau of the series.
  TrigSeries integral() const {
    TrigSeries out;
    for (const auto& [key, coef] : terms_) {
      const auto [k, n] = key;
      if (coef.c != 0.0) out += antiderivative(k, n, true) * coef.c;
      if (coef.s != 0.0) out += antiderivative(k, n, false) * coef.s;
    }
    out.add(0, 0, -out.evaluate(0.0), 0.0);
    return out;
  }

  TrigSeries& operator+=(const TrigSeries& rhs) {
    for (const auto& [key, coef] : rhs.terms_) add(key.first, key.second, coef.c, coef.s);
    return *this;
  }
  TrigSeries& operator-=(const TrigSeries& rhs) { return *this += rhs * -1.0; }
  TrigSeries& operator*=(double scale) {
    for (auto& [key, coef] : terms_) {
      coef.c *= scale;
      coef.s *= scale;
    }
    return *this;
  }

  friend TrigSeries operator+(TrigSeries a, const TrigSeries& b) { return a += b; }
  friend TrigSeries operator-(TrigSeries a, const TrigSeries& b) { return a -= b; }
  friend TrigSeries operator*(TrigSeries a, double s) { return a *= s; }
  friend TrigSeries operator*(double s, TrigSeries a) { return a *= s; }

  friend TrigSeries operator*(const TrigSeries& a, const TrigSeries& b) {
    TrigSeries out;
    for (const auto& [ka, ca] : a.terms_) {
      for (const auto& [kb, cb] : b.terms_) {
        const int k = ka.first + kb.first;
        const int m = ka.second;
        const int n = kb.second;
        // cos m cos n, sin m sin n, sin m cos n, cos m sin n
        const double cc = 0.5 * ca.c * cb.c;
        const double ss = 0.5 * ca.s * cb.s;
        const double sc = 0.5 * ca.s * cb.c;
        const double cs = 0.5 * ca.c * cb.s;
        out.add(k, m - n, cc + ss, sc - cs);
        out.add(k, m + n, cc - ss, sc + cs);
      }
    }
    return out;
  }

  /// Largest |coefficient difference| against another series.
  double max_abs_difference(const TrigSeries& other) const {
    const TrigSeries diff = *this - other;
    double m = 0.0;
    for (const auto& [key, coef] : diff.terms_)
      m = std::max({m, std::abs(coef.c), std::abs(coef.s)});
    return m;
  }

 private:
  // Indefinite integral of tau^k cos(n tau) (is_cos) or tau^k sin(n tau).
  static TrigSeries antiderivative(int k, int n, bool is_cos) {
    if (n == 0) {
      if (!is_cos) return {};
      TrigSeries out;
      out.add(k + 1, 0, 1.0 / (k + 1), 0.0);
      return out;
    }
    const double inv = 1.0 / n;
    TrigSeries out;
    if (is_cos) {
      // tau^k sin(n tau)/n - (k/n) int tau^(k-1) sin(n tau)
      out.add(k, n, 0.0, inv);
      if (k > 0) out -= antiderivative(k - 1, n, false) * (k * inv);
    } else {
      // -tau^k cos(n tau)/n + (k/n) int tau^(k-1) cos(n tau)
      out.add(k, n, -inv, 0.0);
      if (k > 0) out += antiderivative(k - 1, n, true) * (k * inv);
    }
    return out;
  }

  std::map<Key, Coef> terms_;
};

}  // namespace tubeint
