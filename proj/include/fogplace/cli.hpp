#pragma once

namespace fogplace {

// Entry point behind the fogplace binary. Returns 0 on success, 1 on runtime
// failure, 2 on usage errors.
int cli_main(int argc, const char* const* argv);

}  // namespace fogplace
