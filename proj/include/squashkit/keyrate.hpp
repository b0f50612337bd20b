#pragma once

// Closed-form asymptotic key rates for detectors described by a squashing
// model: the BB84 rate with double clicks randomly assigned (standard vs
// the improved error-correction accounting) and the six-state rate under
// the noisy postprocessing penalty.

namespace squashkit {

// Binary entropy in bits; throws outside [0, 1].
double binary_entropy(double x);

struct Bb84Rates {
  double e_pp = 0.0;        // error rate after double-click randomization
  double r_standard = 0.0;  // 1 - (1 + f_ec) h(e_pp)
  double r_improved = 0.0;  // 1 - f_ec h(e_pp) - delta_basic
};

// p_single: probability of a single click; e: error rate within single
// clicks. delta_basic = (1 - p_single) + p_single h(e) charges privacy
// leakage at the unprocessed data; paper_literal instead evaluates the
// nested form h((1 - p_single) + p_single h(e)). f_ec >= 1 scales the
// error-correction leakage (1 = Shannon limit).
Bb84Rates bb84_rates(double p_single, double e, bool paper_literal = false, double f_ec = 1.0);

// Eve's information for the one-way six-state protocol at sifted error Q.
double six_state_eve_information(double q);

// Six-state rate 1 - h(Q) - I_E(Q') where the postprocessing penalty flips
// each sifted bit with probability p_flip: Q' = (1 - p_flip) Q + p_flip (1 - Q).
double six_state_penalty_rate(double q, double p_flip = 1.0 / 6.0);

}  // namespace squashkit
