#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "proxframe/frame.hpp"

namespace proxframe {

/// The two-row frame (1, c)^T, c >= 1.
FrameXd toy1d_frame(double c);

/// Random L x N matrix with orthonormal columns (T*T = I_N), L >= N.
FrameXd parseval_frame(long l, long n, std::uint64_t seed = 0);

/// Random Gaussian L x N full-rank frame; retries with bumped seeds (at most
/// 10 times) if a draw is numerically rank deficient.
FrameXd random_full_rank_frame(long l, long n, std::uint64_t seed = 0);

FrameXd identity_frame(long n);

/// Parses the "kind:key=value,..." mini-language used by the CLI, e.g.
/// "toy1d:c=2", "identity:n=4", "parseval:l=6,n=3", "random:l=8,n=3,seed=1".
/// Builds the corresponding frame.
FrameXd make_gallery(const std::string& spec);

}  // namespace proxframe
