#pragma once

namespace felod {

/// Selects the OpenMP kernel or the serial reference loop. Both produce bit-identical results.
enum class Execution { Serial, Parallel };

}  // namespace felod
