#pragma once

#include <ostream>

#include "optmut/error.hpp"

namespace optmut::cli {

// Exit codes of the `optmut` command.
enum Exit : int {
  kOk = 0,
  kSuiteFailed = 1,        // check-external verdict other than pass
  kNoOptimum = 2,          // infeasible or unbounded
  kInputError = 3,
  kIterationLimit = 4,
  kBaselineBroken = 5,     // also UnbindableSuite
  kCampaignFailed = 6,
  kProviderError = 7,
};

int exit_code_for(ErrorCode code);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace optmut::cli
