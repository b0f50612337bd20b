#include "squashkit/keyrate.hpp"

#include <cmath>
#include <stdexcept>

namespace squashkit {

double binary_entropy(double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("binary_entropy: argument outside [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

Bb84Rates bb84_rates(double p_single, double e, bool paper_literal, double f_ec) {
  if (p_single < 0.0 || p_single > 1.0)
    throw std::invalid_argument("bb84_rates: p_single outside [0, 1]");
  if (e < 0.0 || e > 0.5) throw std::invalid_argument("bb84_rates: e outside [0, 1/2]");
  if (f_ec < 1.0) throw std::invalid_argument("bb84_rates: error-correction factor below 1");
  Bb84Rates rates;
  rates.e_pp = p_single * e + 0.5 * (1.0 - p_single);
  const double ec_leak = f_ec * binary_entropy(rates.e_pp);
  rates.r_standard = 1.0 - ec_leak - binary_entropy(rates.e_pp);
  const double delta_basic = paper_literal
                                 ? binary_entropy(std::min(
                                       1.0, (1.0 - p_single) + p_single * binary_entropy(e)))
                                 : (1.0 - p_single) + p_single * binary_entropy(e);
  rates.r_improved = 1.0 - ec_leak - delta_basic;
  return rates;
}

double six_state_eve_information(double q) {
  if (q < 0.0 || q > 0.5)
    throw std::invalid_argument("six_state_eve_information: Q outside [0, 1/2]");
  if (q == 0.0) return 0.0;
  return q + (1.0 - q) * binary_entropy((1.0 - 1.5 * q) / (1.0 - q));
}

double six_state_penalty_rate(double q, double p_flip) {
  if (q < 0.0 || q > 0.5)
    throw std::invalid_argument("six_state_penalty_rate: Q outside [0, 1/2]");
  if (p_flip < 0.0 || p_flip > 0.5)
    throw std::invalid_argument("six_state_penalty_rate: flip probability outside [0, 1/2]");
  const double q_penalized = (1.0 - p_flip) * q + p_flip * (1.0 - q);
  return 1.0 - binary_entropy(q) - six_state_eve_information(q_penalized);
}

}  // namespace squashkit
