#pragma once

namespace rieszlab::cli {

/// Exit codes: 0 success, 2 configuration error, 3 non-convergence or
/// divergence, 4 internal invariant violation, 1 anything else.
int run(int argc, char** argv);

}  // namespace rieszlab::cli
