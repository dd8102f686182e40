#pragma once

namespace dlp {

// Execution policy for the batch kernels. Serial is the reference
// implementation; Parallel runs the same arithmetic over OpenMP threads
// with a fixed chunk layout so results are reproducible for a given
// thread count.
enum class Exec { Serial, Parallel };

} // namespace dlp
