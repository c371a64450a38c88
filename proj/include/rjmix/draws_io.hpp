#pragma once

#include <cstdint>
#include <string>

#include "rjmix/gb2_chain.hpp"
#include "rjmix/rjmcmc.hpp"

namespace rjmix {

// Draws CSV: one row per kept iteration, parameter block prefixed by R:
//   iteration,R,w_1..w_R,mu_1..mu_R,sigma2_1..sigma2_R,mu,tau2,beta,
//   log_lik,bd_accept,sc_accept
// Numbers are 17-significant-digit decimal strings, so a round trip
// reproduces the in-memory doubles exactly. A '#' comment line with the
// model name leads the file; the JSON sidecar carries the run metadata.
void write_draws_csv(const Draws& draws, const std::string& path);
Draws read_draws_csv(const std::string& path);

// GB2 draws use a fixed four-column parameter block:
//   iteration,a,b,p,q,log_lik
void write_gb2_draws_csv(const Gb2Draws& draws, const std::string& path);
Gb2Draws read_gb2_draws_csv(const std::string& path);

// Model tag from a draws CSV header line ("mln" or "gb2").
std::string peek_draws_model(const std::string& path);

// Write a file atomically: stream into path.tmp, then rename.
void atomic_write_text(const std::string& path, const std::string& content);

}  // namespace rjmix
